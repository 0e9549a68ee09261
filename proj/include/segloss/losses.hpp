#ifndef SEGLOSS_LOSSES_HPP
#define SEGLOSS_LOSSES_HPP

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "segloss/boundary_losses.hpp"
#include "segloss/compound_losses.hpp"
#include "segloss/core.hpp"

// Uniform dispatch over every loss: value, analytic gradient, and the frozen
// coefficients (distance maps, curve distances, structural weights) that
// both depend on.

namespace segloss {

enum class LossId {
    bce,
    weighted_bce,
    balanced_bce,
    focal,
    distance_penalized_ce,
    dice,
    tversky,
    focal_tversky,
    sens_spec,
    log_cosh_dice,
    hausdorff_dt,
    shape_aware,
    combo,
    exp_log,
    ssl,
};

inline constexpr std::array kAllLosses{
    LossId::bce,          LossId::weighted_bce,  LossId::balanced_bce, LossId::focal,
    LossId::distance_penalized_ce, LossId::dice, LossId::tversky,      LossId::focal_tversky,
    LossId::sens_spec,    LossId::log_cosh_dice, LossId::hausdorff_dt, LossId::shape_aware,
    LossId::combo,        LossId::exp_log,       LossId::ssl,
};
static_assert(kAllLosses.size() == 15);

/// Default set for fit/report and the convergence suite.
inline constexpr std::array kExperimentLosses{
    LossId::bce,           LossId::weighted_bce, LossId::focal,
    LossId::dice,          LossId::tversky,      LossId::focal_tversky,
    LossId::sens_spec,     LossId::exp_log,      LossId::log_cosh_dice,
};

std::string_view loss_name(LossId id);
std::optional<LossId> parse_loss_id(std::string_view name);
/// Comma-separated canonical names, in registry order.
std::string valid_loss_names();

/// Coefficients held constant under differentiation.
using FrozenCoefficients = std::variant<std::monostate, HausdorffTerms, ShapeAwareTerms, SslTerms>;

FrozenCoefficients freeze(LossId id, const Mask& y, const ProbabilityMap& p, const LossConfig& cfg);

/// Only distance_penalized_ce reads phi, and it throws DomainError without one.
double loss_value(LossId id, const Mask& y, const ProbabilityMap& p, const LossConfig& cfg,
                  const DistanceMap* phi = nullptr);
double loss_value(LossId id, const Mask& y, const ProbabilityMap& p, const LossConfig& cfg,
                  const DistanceMap* phi, const FrozenCoefficients& frozen);

GradientMap analytic_gradient(LossId id, const Mask& y, const ProbabilityMap& p,
                              const LossConfig& cfg, const DistanceMap* phi = nullptr);
GradientMap analytic_gradient(LossId id, const Mask& y, const ProbabilityMap& p,
                              const LossConfig& cfg, const DistanceMap* phi,
                              const FrozenCoefficients& frozen);

}  // namespace segloss

#endif  // SEGLOSS_LOSSES_HPP
