#include "segloss/losses.hpp"

#include "segloss/distribution_losses.hpp"
#include "segloss/region_losses.hpp"

namespace segloss {

namespace {

struct NamedLoss {
    LossId id;
    std::string_view name;
};

constexpr std::array<NamedLoss, 15> kNames{{
    {LossId::bce, "bce"},
    {LossId::weighted_bce, "weighted_bce"},
    {LossId::balanced_bce, "balanced_bce"},
    {LossId::focal, "focal"},
    {LossId::distance_penalized_ce, "distance_penalized_ce"},
    {LossId::dice, "dice"},
    {LossId::tversky, "tversky"},
    {LossId::focal_tversky, "focal_tversky"},
    {LossId::sens_spec, "sens_spec"},
    {LossId::log_cosh_dice, "log_cosh_dice"},
    {LossId::hausdorff_dt, "hausdorff_dt"},
    {LossId::shape_aware, "shape_aware"},
    {LossId::combo, "combo"},
    {LossId::exp_log, "exp_log"},
    {LossId::ssl, "ssl"},
}};

const DistanceMap& require_phi(const DistanceMap* phi)
{
    if (phi == nullptr) {
        throw DomainError("distance_penalized_ce requires a distance map (phi)");
    }
    return *phi;
}

template <typename T>
const T& frozen_as(const FrozenCoefficients& frozen, LossId id)
{
    if (const T* t = std::get_if<T>(&frozen)) {
        return *t;
    }
    throw DomainError("frozen coefficients do not belong to loss " + std::string(loss_name(id)));
}

}  // namespace

std::string_view loss_name(LossId id)
{
    for (const auto& entry : kNames) {
        if (entry.id == id) {
            return entry.name;
        }
    }
    throw DomainError("unknown loss id");
}

std::optional<LossId> parse_loss_id(std::string_view name)
{
    for (const auto& entry : kNames) {
        if (entry.name == name) {
            return entry.id;
        }
    }
    return std::nullopt;
}

std::string valid_loss_names()
{
    std::string out;
    for (const auto& entry : kNames) {
        if (!out.empty()) {
            out += ", ";
        }
        out += entry.name;
    }
    return out;
}

FrozenCoefficients freeze(LossId id, const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    switch (id) {
        case LossId::hausdorff_dt:
            return hausdorff_dt_terms(y, p, cfg);
        case LossId::shape_aware:
            return shape_aware_terms(y, p, cfg);
        case LossId::ssl:
            return ssl_terms(y, p, cfg);
        default:
            return std::monostate{};
    }
}

double loss_value(LossId id, const Mask& y, const ProbabilityMap& p, const LossConfig& cfg,
                  const DistanceMap* phi)
{
    return loss_value(id, y, p, cfg, phi, freeze(id, y, p, cfg));
}

double loss_value(LossId id, const Mask& y, const ProbabilityMap& p, const LossConfig& cfg,
                  const DistanceMap* phi, const FrozenCoefficients& frozen)
{
    switch (id) {
        case LossId::bce: return bce(y, p, cfg);
        case LossId::weighted_bce: return weighted_bce(y, p, cfg);
        case LossId::balanced_bce: return balanced_bce(y, p, cfg);
        case LossId::focal: return focal(y, p, cfg);
        case LossId::distance_penalized_ce: return distance_penalized_ce(y, p, require_phi(phi), cfg);
        case LossId::dice: return dice_loss(y, p, cfg);
        case LossId::tversky: return tversky_loss(y, p, cfg);
        case LossId::focal_tversky: return focal_tversky_loss(y, p, cfg);
        case LossId::sens_spec: return sensitivity_specificity_loss(y, p, cfg);
        case LossId::log_cosh_dice: return log_cosh_dice_loss(y, p, cfg);
        case LossId::hausdorff_dt:
            return hausdorff_dt_loss(y, p, frozen_as<HausdorffTerms>(frozen, id));
        case LossId::shape_aware:
            return shape_aware_loss(y, p, frozen_as<ShapeAwareTerms>(frozen, id), cfg);
        case LossId::combo: return combo_loss(y, p, cfg);
        case LossId::exp_log: return exp_log_loss(y, p, cfg);
        case LossId::ssl: return ssl_loss(y, p, frozen_as<SslTerms>(frozen, id), cfg);
    }
    throw DomainError("unknown loss id");
}

GradientMap analytic_gradient(LossId id, const Mask& y, const ProbabilityMap& p,
                              const LossConfig& cfg, const DistanceMap* phi)
{
    return analytic_gradient(id, y, p, cfg, phi, freeze(id, y, p, cfg));
}

GradientMap analytic_gradient(LossId id, const Mask& y, const ProbabilityMap& p,
                              const LossConfig& cfg, const DistanceMap* phi,
                              const FrozenCoefficients& frozen)
{
    switch (id) {
        case LossId::bce: return bce_gradient(y, p, cfg);
        case LossId::weighted_bce: return weighted_bce_gradient(y, p, cfg);
        case LossId::balanced_bce: return balanced_bce_gradient(y, p, cfg);
        case LossId::focal: return focal_gradient(y, p, cfg);
        case LossId::distance_penalized_ce:
            return distance_penalized_ce_gradient(y, p, require_phi(phi), cfg);
        case LossId::dice: return dice_loss_gradient(y, p, cfg);
        case LossId::tversky: return tversky_loss_gradient(y, p, cfg);
        case LossId::focal_tversky: return focal_tversky_loss_gradient(y, p, cfg);
        case LossId::sens_spec: return sensitivity_specificity_loss_gradient(y, p, cfg);
        case LossId::log_cosh_dice: return log_cosh_dice_loss_gradient(y, p, cfg);
        case LossId::hausdorff_dt:
            return hausdorff_dt_loss_gradient(y, p, frozen_as<HausdorffTerms>(frozen, id));
        case LossId::shape_aware:
            return shape_aware_loss_gradient(y, p, frozen_as<ShapeAwareTerms>(frozen, id), cfg);
        case LossId::combo: return combo_loss_gradient(y, p, cfg);
        case LossId::exp_log: return exp_log_loss_gradient(y, p, cfg);
        case LossId::ssl: return ssl_loss_gradient(y, p, frozen_as<SslTerms>(frozen, id), cfg);
    }
    throw DomainError("unknown loss id");
}

}  // namespace segloss
