#include "segloss/compound_losses.hpp"

#include <algorithm>
#include <cmath>

#include "segloss/distribution_losses.hpp"
#include "segloss/geometry.hpp"
#include "segloss/region_losses.hpp"

namespace segloss {

namespace {

void check_unit(double v, const char* name)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(std::string(name) + " must lie in [0, 1]");
    }
}

void check_nonnegative(double v, const char* name)
{
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string(name) + " must be a finite value >= 0");
    }
}

}  // namespace

double combo_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "combo_loss");
    cfg.validate_common();
    check_unit(cfg.alpha, "combo alpha");
    check_unit(cfg.beta, "combo beta");
    RealGrid terms(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i] ? 1.0 : 0.0;
        const double pc = clamp_prob(p[i], cfg.epsilon);
        terms[i] = -(cfg.beta * yi * std::log(pc) + (1.0 - cfg.beta) * (1.0 - yi) * std::log(1.0 - pc));
    }
    const double mbce = reduce_mean(terms);
    return cfg.alpha * mbce + (1.0 - cfg.alpha) * dice_loss(y, p, cfg);
}

GradientMap combo_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "combo_loss");
    cfg.validate_common();
    check_unit(cfg.alpha, "combo alpha");
    check_unit(cfg.beta, "combo beta");
    GradientMap g = dice_loss_gradient(y, p, cfg);
    const double scale = 1.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], cfg.epsilon);
        const double d = y[i] ? -cfg.beta / pc : (1.0 - cfg.beta) / (1.0 - pc);
        const double mbce = d * clamp_slope(p[i], cfg.epsilon) * scale;
        g[i] = cfg.alpha * mbce + (1.0 - cfg.alpha) * g[i];
    }
    return g;
}

namespace {

void check_exp_log(const LossConfig& cfg)
{
    cfg.validate_common();
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) {
        throw ConfigError("exp_log requires gamma > 0");
    }
    check_nonnegative(cfg.w_dice, "w_dice");
    check_nonnegative(cfg.w_cross, "w_cross");
    check_nonnegative(cfg.w_label, "w_label");
}

// d/dx x^gamma, with the gamma = 1 case exact.
double power_slope(double x, double gamma)
{
    return gamma == 1.0 ? 1.0 : gamma * std::pow(x, gamma - 1.0);
}

}  // namespace

double exp_log_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "exp_log_loss");
    check_exp_log(cfg);
    const double dc = std::clamp(soft_dice_coefficient(y, p, cfg.smooth), cfg.epsilon, 1.0);
    const double dice_term = std::pow(-std::log(dc), cfg.gamma);

    RealGrid terms(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], cfg.epsilon);
        const double pl = y[i] ? pc : 1.0 - pc;
        terms[i] = cfg.w_label * std::pow(-std::log(pl), cfg.gamma);
    }
    const double cross_term = reduce_mean(terms);
    return cfg.w_dice * dice_term + cfg.w_cross * cross_term;
}

GradientMap exp_log_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "exp_log_loss");
    check_exp_log(cfg);
    const double raw_dc = soft_dice_coefficient(y, p, cfg.smooth);
    // The clamp on DC is flat outside (epsilon, 1).
    double dice_scale = 0.0;
    if (raw_dc > cfg.epsilon && raw_dc < 1.0) {
        dice_scale = cfg.w_dice * power_slope(-std::log(raw_dc), cfg.gamma) / raw_dc;
    }
    // d(-ln DC)/dp = -(dDC/dp)/DC = (d dice_loss/dp)/DC
    GradientMap g = dice_loss_gradient(y, p, cfg);
    const double scale = 1.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = clamp_prob(p[i], cfg.epsilon);
        const double pl = y[i] ? pc : 1.0 - pc;
        const double dx = y[i] ? -1.0 / pc : 1.0 / (1.0 - pc);
        const double cross = cfg.w_label * power_slope(-std::log(pl), cfg.gamma) * dx *
                             clamp_slope(p[i], cfg.epsilon) * scale;
        g[i] = dice_scale * g[i] + cfg.w_cross * cross;
    }
    return g;
}

namespace {

void check_ssl(const LossConfig& cfg)
{
    cfg.validate_common();
    check_unit(cfg.ssl_beta, "ssl_beta");
    if (!(cfg.c4 > 0.0) || !std::isfinite(cfg.c4)) {
        throw ConfigError("c4 must be > 0");
    }
}

// e before thresholding.
RealGrid structural_error(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    const RealGrid yr = y.as_real();
    const LocalStats sy = local_stats(yr, cfg.window);
    const LocalStats sp = local_stats(p.grid(), cfg.window);
    RealGrid e(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = (yr[i] - sy.mean[i] + cfg.c4) / (sy.std[i] + cfg.c4);
        const double b = (p[i] - sp.mean[i] + cfg.c4) / (sp.std[i] + cfg.c4);
        e[i] = std::fabs(a - b);
    }
    return e;
}

SslTerms threshold_terms(RealGrid error, double error_max, double ssl_beta)
{
    SslTerms t{std::move(error), RealGrid(), error_max, 0.0};
    t.weight = RealGrid(t.error.shape(), 0.0);
    const double cut = ssl_beta * error_max;
    for (std::size_t i = 0; i < t.error.size(); ++i) {
        if (t.error[i] > cut) {
            t.weight[i] = t.error[i];
            t.kept += 1.0;
        }
    }
    return t;
}

double max_of(const RealGrid& g)
{
    return *std::max_element(g.values().begin(), g.values().end());
}

double weighted_ce_sum(const Mask& y, const ProbabilityMap& p, const RealGrid& weight, double eps)
{
    RealGrid ce = cross_entropy_map(y, p, eps);
    for (std::size_t i = 0; i < ce.size(); ++i) {
        ce[i] = weight[i] * ce[i];
    }
    return reduce_sum(ce);
}

}  // namespace

SslTerms ssl_terms(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "ssl_loss");
    check_ssl(cfg);
    RealGrid e = structural_error(y, p, cfg);
    const double e_max = max_of(e);
    return threshold_terms(std::move(e), e_max, cfg.ssl_beta);
}

double ssl_loss(const Mask& y, const ProbabilityMap& p, const SslTerms& terms, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "ssl_loss");
    require_same_shape(y.shape(), terms.weight.shape(), "ssl_loss");
    cfg.validate_common();
    if (terms.kept == 0.0) {
        return 0.0;
    }
    return weighted_ce_sum(y, p, terms.weight, cfg.epsilon) / terms.kept;
}

GradientMap ssl_loss_gradient(const Mask& y, const ProbabilityMap& p, const SslTerms& terms,
                              const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "ssl_loss");
    require_same_shape(y.shape(), terms.weight.shape(), "ssl_loss");
    cfg.validate_common();
    GradientMap g = cross_entropy_slope(y, p, cfg.epsilon);
    if (terms.kept == 0.0) {
        for (auto& v : g.values()) {
            v = 0.0;
        }
        return g;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = terms.weight[i] * g[i] / terms.kept;
    }
    return g;
}

double ssl_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    return ssl_loss(y, p, ssl_terms(y, p, cfg), cfg);
}

double ssl_loss_batch(std::span<const Mask> ys, std::span<const ProbabilityMap> ps,
                      const LossConfig& cfg, ErrorMaxScope scope)
{
    if (ys.size() != ps.size() || ys.empty()) {
        throw ShapeError("ssl_loss_batch needs equally many (nonzero) masks and predictions");
    }
    check_ssl(cfg);
    std::vector<RealGrid> errors;
    errors.reserve(ys.size());
    double batch_max = 0.0;
    for (std::size_t n = 0; n < ys.size(); ++n) {
        require_same_shape(ys[n].shape(), ps[n].shape(), "ssl_loss_batch");
        errors.push_back(structural_error(ys[n], ps[n], cfg));
        batch_max = std::max(batch_max, max_of(errors.back()));
    }
    double total = 0.0;
    double kept = 0.0;
    for (std::size_t n = 0; n < ys.size(); ++n) {
        const double e_max = scope == ErrorMaxScope::per_batch ? batch_max : max_of(errors[n]);
        const SslTerms t = threshold_terms(std::move(errors[n]), e_max, cfg.ssl_beta);
        total += weighted_ce_sum(ys[n], ps[n], t.weight, cfg.epsilon);
        kept += t.kept;
    }
    return kept == 0.0 ? 0.0 : total / kept;
}

}  // namespace segloss
