#ifndef SEGLOSS_METRICS_HPP
#define SEGLOSS_METRICS_HPP

#include <cstddef>
#include <optional>

#include "segloss/core.hpp"

// Hard-threshold evaluation metrics. Vacuous ratios (zero denominator) are
// defined as 1.0 so that trivially perfect predictions score perfectly.

namespace segloss {

struct HardConfusion {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

/// 1 where p >= threshold. threshold must lie in (0, 1).
Mask binarize(const ProbabilityMap& p, double threshold = 0.5);

HardConfusion hard_confusion(const Mask& pred, const Mask& truth);

double dice_coefficient(const HardConfusion& c);
double sensitivity(const HardConfusion& c);
double specificity(const HardConfusion& c);

double dice_coefficient(const Mask& pred, const Mask& truth);
double sensitivity(const Mask& pred, const Mask& truth);
double specificity(const Mask& pred, const Mask& truth);

/// Symmetric Hausdorff distance between the two masks' boundaries; empty
/// when either boundary is empty.
std::optional<double> boundary_hausdorff(const Mask& pred, const Mask& truth);

struct MetricSummary {
    double dice = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

MetricSummary evaluate(const Mask& pred, const Mask& truth);

}  // namespace segloss

#endif  // SEGLOSS_METRICS_HPP
