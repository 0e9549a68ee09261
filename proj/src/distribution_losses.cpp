#include "segloss/distribution_losses.hpp"

#include <cmath>

namespace segloss {

namespace {

void check_inputs(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg, const char* what)
{
    require_same_shape(y.shape(), p.shape(), what);
    cfg.validate_common();
}

double inverse_count(const Mask& y)
{
    return 1.0 / static_cast<double>(y.size());
}

}  // namespace

RealGrid cross_entropy_map(const Mask& y, const ProbabilityMap& p, double epsilon)
{
    require_same_shape(y.shape(), p.shape(), "cross_entropy_map");
    RealGrid out(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i] ? 1.0 : 0.0;
        const double pc = clamp_prob(p[i], epsilon);
        out[i] = -(yi * std::log(pc) + (1.0 - yi) * std::log(1.0 - pc));
    }
    return out;
}

RealGrid cross_entropy_slope(const Mask& y, const ProbabilityMap& p, double epsilon)
{
    require_same_shape(y.shape(), p.shape(), "cross_entropy_slope");
    RealGrid out(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], epsilon);
        const double d = y[i] ? -1.0 / pc : 1.0 / (1.0 - pc);
        out[i] = d * clamp_slope(p[i], epsilon);
    }
    return out;
}

double bce(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "bce");
    return reduce_mean(cross_entropy_map(y, p, cfg.epsilon));
}

GradientMap bce_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "bce");
    GradientMap g = cross_entropy_slope(y, p, cfg.epsilon);
    const double scale = inverse_count(y);
    for (auto& v : g.values()) {
        v *= scale;
    }
    return g;
}

namespace {

void check_beta_positive(const LossConfig& cfg)
{
    if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) {
        throw ConfigError("weighted_bce requires beta > 0");
    }
}

// -(wp * y log p~ + wn * (1 - y) log(1 - p~)) and its derivative.
double weighted_mean(const Mask& y, const ProbabilityMap& p, double eps, double wp, double wn)
{
    RealGrid terms(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i] ? 1.0 : 0.0;
        const double pc = clamp_prob(p[i], eps);
        terms[i] = -(wp * yi * std::log(pc) + wn * (1.0 - yi) * std::log(1.0 - pc));
    }
    return reduce_mean(terms);
}

GradientMap weighted_slope(const Mask& y, const ProbabilityMap& p, double eps, double wp,
                           double wn)
{
    GradientMap g(y.shape(), 0.0);
    const double scale = inverse_count(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], eps);
        const double d = y[i] ? -wp / pc : wn / (1.0 - pc);
        g[i] = d * clamp_slope(p[i], eps) * scale;
    }
    return g;
}

}  // namespace

double weighted_bce(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "weighted_bce");
    check_beta_positive(cfg);
    return weighted_mean(y, p, cfg.epsilon, cfg.beta, 1.0);
}

GradientMap weighted_bce_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "weighted_bce");
    check_beta_positive(cfg);
    return weighted_slope(y, p, cfg.epsilon, cfg.beta, 1.0);
}

double balanced_bce_weight(const Mask& y)
{
    return 1.0 - static_cast<double>(y.count()) / static_cast<double>(y.size());
}

double balanced_bce(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "balanced_bce");
    const double beta = balanced_bce_weight(y);
    return weighted_mean(y, p, cfg.epsilon, beta, 1.0 - beta);
}

GradientMap balanced_bce_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "balanced_bce");
    const double beta = balanced_bce_weight(y);
    return weighted_slope(y, p, cfg.epsilon, beta, 1.0 - beta);
}

namespace {

void check_focal(const LossConfig& cfg)
{
    if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
        throw ConfigError("focal requires gamma >= 0");
    }
    if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) {
        throw ConfigError("focal requires alpha in [0, 1]");
    }
}

double focal_scale(const LossConfig& cfg, bool foreground)
{
    if (!cfg.alpha_balanced) {
        return cfg.alpha;
    }
    return foreground ? cfg.alpha : 1.0 - cfg.alpha;
}

}  // namespace

double focal(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "focal");
    check_focal(cfg);
    RealGrid terms(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], cfg.epsilon);
        const double pt = y[i] ? pc : 1.0 - pc;
        const double modulation = std::pow(1.0 - pt, cfg.gamma);
        terms[i] = -(focal_scale(cfg, y[i] != 0) * modulation * std::log(pt));
    }
    return reduce_mean(terms);
}

GradientMap focal_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "focal");
    check_focal(cfg);
    GradientMap g(y.shape(), 0.0);
    const double scale = inverse_count(y);
    const double gamma = cfg.gamma;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], cfg.epsilon);
        const double pt = y[i] ? pc : 1.0 - pc;
        const double q = 1.0 - pt;
        // d/dpt of -(1 - pt)^gamma log pt
        double d = -std::pow(q, gamma) / pt;
        if (gamma != 0.0) {
            d += gamma * std::pow(q, gamma - 1.0) * std::log(pt);
        }
        const double dpt = y[i] ? 1.0 : -1.0;
        g[i] = focal_scale(cfg, y[i] != 0) * d * dpt * clamp_slope(p[i], cfg.epsilon) * scale;
    }
    return g;
}

namespace {

void check_phi(const Mask& y, const DistanceMap& phi)
{
    require_same_shape(y.shape(), phi.shape(), "distance_penalized_ce");
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (!(phi[i] >= 0.0) || !std::isfinite(phi[i])) {
            throw DomainError("distance map value at index " + std::to_string(i) +
                              " is negative or not finite");
        }
    }
}

}  // namespace

double distance_penalized_ce(const Mask& y, const ProbabilityMap& p, const DistanceMap& phi,
                             const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "distance_penalized_ce");
    check_phi(y, phi);
    RealGrid terms = cross_entropy_map(y, p, cfg.epsilon);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        terms[i] *= 1.0 + phi[i];
    }
    return reduce_mean(terms);
}

GradientMap distance_penalized_ce_gradient(const Mask& y, const ProbabilityMap& p,
                                           const DistanceMap& phi, const LossConfig& cfg)
{
    check_inputs(y, p, cfg, "distance_penalized_ce");
    check_phi(y, phi);
    GradientMap g = cross_entropy_slope(y, p, cfg.epsilon);
    const double scale = inverse_count(y);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] *= (1.0 + phi[i]) * scale;
    }
    return g;
}

}  // namespace segloss
