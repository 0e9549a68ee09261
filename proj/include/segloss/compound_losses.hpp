#ifndef SEGLOSS_COMPOUND_LOSSES_HPP
#define SEGLOSS_COMPOUND_LOSSES_HPP

#include <span>
#include <vector>

#include "segloss/core.hpp"

namespace segloss {

/// alpha * L_mbce + (1 - alpha) * dice_loss, with
/// L_mbce = mean -(beta y log p~ + (1 - beta)(1 - y) log(1 - p~)).
double combo_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap combo_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// w_dice (-ln DC)^gamma + w_cross mean(w_label (-ln p~_l)^gamma). DC is the
/// smoothed soft Dice coefficient clamped to [epsilon, 1].
double exp_log_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
GradientMap exp_log_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

// Structural similarity loss. e compares locally standardised truth and
// prediction; pixels with e <= ssl_beta * e_max are abandoned (f = 0).
// e, f and the local statistics are frozen coefficients.
struct SslTerms {
    RealGrid error;      ///< e
    RealGrid weight;     ///< e * f
    double error_max = 0.0;
    double kept = 0.0;   ///< M = sum f
};

SslTerms ssl_terms(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);
/// (1 / M) sum e f CE; zero when no pixel is kept.
double ssl_loss(const Mask& y, const ProbabilityMap& p, const SslTerms& terms, const LossConfig& cfg);
GradientMap ssl_loss_gradient(const Mask& y, const ProbabilityMap& p, const SslTerms& terms,
                              const LossConfig& cfg);
double ssl_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

enum class ErrorMaxScope { per_image, per_batch };

/// Mini-batch form: M sums f over every image in the batch.
double ssl_loss_batch(std::span<const Mask> ys, std::span<const ProbabilityMap> ps,
                      const LossConfig& cfg, ErrorMaxScope scope = ErrorMaxScope::per_image);

}  // namespace segloss

#endif  // SEGLOSS_COMPOUND_LOSSES_HPP
