#ifndef SEGLOSS_DISTRIBUTION_LOSSES_HPP
#define SEGLOSS_DISTRIBUTION_LOSSES_HPP

#include "segloss/core.hpp"

// Cross-entropy family. Every loss here reads probabilities through the
// epsilon clamp, and the clamp is part of the differentiated function:
// gradients vanish where p sits outside (epsilon, 1 - epsilon).

namespace segloss {

/// Per-pixel binary cross-entropy -(y log p~ + (1 - y) log(1 - p~)).
RealGrid cross_entropy_map(const Mask& y, const ProbabilityMap& p, double epsilon);
/// Per-pixel d CE_i / d p_i, including the clamp slope.
RealGrid cross_entropy_slope(const Mask& y, const ProbabilityMap& p, double epsilon);

double bce(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap bce_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// Positive pixels weighted by cfg.beta (> 0). beta > 1 trades false
/// negatives for false positives; beta < 1 does the opposite.
double weighted_bce(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap weighted_bce_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// Image-level weight beta = 1 - sum(y) / (H * W) on positives and 1 - beta
/// on negatives.
double balanced_bce(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap balanced_bce_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
double balanced_bce_weight(const Mask& y);

/// Mean of -a (1 - p_t)^gamma log p_t. a = alpha for every pixel, or
/// alpha / (1 - alpha) on foreground / background when cfg.alpha_balanced.
/// gamma = 0 with alpha = 1 is exactly bce.
double focal(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap focal_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// (1 / N) sum (1 + phi_i) CE_i with a caller-supplied nonnegative distance map.
double distance_penalized_ce(const Mask& y, const ProbabilityMap& p, const DistanceMap& phi,
                             const LossConfig& cfg);
GradientMap distance_penalized_ce_gradient(const Mask& y, const ProbabilityMap& p,
                                           const DistanceMap& phi, const LossConfig& cfg);

}  // namespace segloss

#endif  // SEGLOSS_DISTRIBUTION_LOSSES_HPP
