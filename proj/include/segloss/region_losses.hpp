#ifndef SEGLOSS_REGION_LOSSES_HPP
#define SEGLOSS_REGION_LOSSES_HPP

#include "segloss/core.hpp"

// Overlap-based losses over image-wide soft sums. None of these take a log
// of a probability, so none of them clamp.

namespace segloss {

/// Image-level soft Dice coefficient (2 sum(y p) + s) / (sum(y) + sum(p) + s).
/// Throws DomainError when s = 0 and both sums vanish.
double soft_dice_coefficient(const Mask& y, const ProbabilityMap& p, double smooth);

double dice_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap dice_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// Tversky index (tp + s) / (tp + beta fp + (1 - beta) fn + s) on soft counts.
double tversky_index(const Mask& y, const ProbabilityMap& p, double beta, double smooth);

double tversky_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap tversky_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// (1 - TI)^gamma for the single foreground class. gamma outside [1, 3]
/// raises a warning but is still evaluated.
double focal_tversky_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap focal_tversky_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                        const LossConfig& cfg);

/// 1 - (w sens + (1 - w) spec) with sens = tp / (tp + fn + eps) and
/// spec = tn / (tn + fp + eps) on soft counts.
double sensitivity_specificity_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap sensitivity_specificity_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                                  const LossConfig& cfg);

/// log(cosh(x)) as |x| + log1p(exp(-2|x|)) - log 2.
double log_cosh(double x) noexcept;

/// log cosh of the Dice loss; its gradient is tanh(DL) times the Dice gradient.
double log_cosh_dice_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap log_cosh_dice_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                        const LossConfig& cfg);

}  // namespace segloss

#endif  // SEGLOSS_REGION_LOSSES_HPP
