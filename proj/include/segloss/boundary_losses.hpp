#ifndef SEGLOSS_BOUNDARY_LOSSES_HPP
#define SEGLOSS_BOUNDARY_LOSSES_HPP

#include "segloss/core.hpp"

// Boundary-aware losses. The distance maps and curve distances they use are
// computed from the current prediction but are held constant when
// differentiating: each loss is split into a "terms" step that freezes the
// geometry and a value/gradient pair that consumes it.

namespace segloss {

/// Per-pixel weight d_y^alpha + d_p^alpha, where d_y and d_p are distance
/// maps to the boundaries of y and of (p >= threshold). An empty boundary
/// contributes zero.
struct HausdorffTerms {
    RealGrid weight;
};

HausdorffTerms hausdorff_dt_terms(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
double hausdorff_dt_loss(const Mask& y, const ProbabilityMap& p, const HausdorffTerms& terms);
GradientMap hausdorff_dt_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                       const HausdorffTerms& terms);
/// Mean of (p - y)^2 (d_y^alpha + d_p^alpha).
double hausdorff_dt_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// Cross-entropy coefficient 1 + E, where E is the mean distance from the
/// predicted boundary to the true boundary (or d_y per pixel when
/// cfg.shape_per_pixel is set).
struct ShapeAwareTerms {
    RealGrid coefficient;
    double curve_distance = 0.0;  ///< E; 0 in per-pixel mode or on fallback
};

ShapeAwareTerms shape_aware_terms(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
double shape_aware_loss(const Mask& y, const ProbabilityMap& p, const ShapeAwareTerms& terms,
                        const LossConfig& cfg);
GradientMap shape_aware_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                      const ShapeAwareTerms& terms, const LossConfig& cfg);
double shape_aware_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

}  // namespace segloss

#endif  // SEGLOSS_BOUNDARY_LOSSES_HPP
