#include "segloss/region_losses.hpp"

#include <cmath>
#include <numbers>

namespace segloss {

namespace {

struct DiceSums {
    double intersection = 0.0;  // sum y p
    double total = 0.0;         // sum y + sum p
};

DiceSums dice_sums(const Mask& y, const ProbabilityMap& p)
{
    DiceSums s;
    double sum_p = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i]) {
            s.intersection += p[i];
        }
        sum_p += p[i];
    }
    s.total = static_cast<double>(y.count()) + sum_p;
    return s;
}

void check_smooth(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg, const char* what)
{
    require_same_shape(y.shape(), p.shape(), what);
    cfg.validate_common();
}

void check_beta_unit(double beta, const char* what)
{
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw ConfigError(std::string(what) + " requires beta in [0, 1]");
    }
}

}  // namespace

double soft_dice_coefficient(const Mask& y, const ProbabilityMap& p, double smooth)
{
    require_same_shape(y.shape(), p.shape(), "dice");
    if (!(smooth >= 0.0)) {
        throw ConfigError("smooth must be >= 0");
    }
    const DiceSums s = dice_sums(y, p);
    const double denominator = s.total + smooth;
    if (denominator == 0.0) {
        throw DomainError("dice is undefined with smooth = 0 on an empty mask and prediction");
    }
    return (2.0 * s.intersection + smooth) / denominator;
}

double dice_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_smooth(y, p, cfg, "dice_loss");
    return 1.0 - soft_dice_coefficient(y, p, cfg.smooth);
}

GradientMap dice_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_smooth(y, p, cfg, "dice_loss");
    const DiceSums s = dice_sums(y, p);
    const double denominator = s.total + cfg.smooth;
    if (denominator == 0.0) {
        throw DomainError("dice is undefined with smooth = 0 on an empty mask and prediction");
    }
    const double numerator = 2.0 * s.intersection + cfg.smooth;
    const double inv_sq = 1.0 / (denominator * denominator);
    GradientMap g(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i] ? 1.0 : 0.0;
        g[i] = -(2.0 * yi * denominator - numerator) * inv_sq;
    }
    return g;
}

namespace {

struct TverskyParts {
    double numerator = 0.0;
    double denominator = 0.0;
};

TverskyParts tversky_parts(const Mask& y, const ProbabilityMap& p, double beta, double smooth)
{
    const SoftConfusion c = soft_confusion(y, p);
    TverskyParts t;
    t.numerator = c.tp + smooth;
    t.denominator = c.tp + beta * c.fp + (1.0 - beta) * c.fn + smooth;
    if (t.denominator == 0.0) {
        throw DomainError("tversky index is undefined with smooth = 0 on an empty mask and prediction");
    }
    return t;
}

// d TI / d p_i; the denominator's derivative is beta for every pixel.
GradientMap tversky_index_gradient(const Mask& y, const TverskyParts& t, double beta)
{
    GradientMap g(y.shape(), 0.0);
    const double inv_sq = 1.0 / (t.denominator * t.denominator);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double yi = y[i] ? 1.0 : 0.0;
        g[i] = (yi * t.denominator - t.numerator * beta) * inv_sq;
    }
    return g;
}

}  // namespace

double tversky_index(const Mask& y, const ProbabilityMap& p, double beta, double smooth)
{
    require_same_shape(y.shape(), p.shape(), "tversky");
    check_beta_unit(beta, "tversky");
    const TverskyParts t = tversky_parts(y, p, beta, smooth);
    return t.numerator / t.denominator;
}

double tversky_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_smooth(y, p, cfg, "tversky_loss");
    return 1.0 - tversky_index(y, p, cfg.beta, cfg.smooth);
}

GradientMap tversky_loss_gradient(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_smooth(y, p, cfg, "tversky_loss");
    check_beta_unit(cfg.beta, "tversky");
    GradientMap g = tversky_index_gradient(y, tversky_parts(y, p, cfg.beta, cfg.smooth), cfg.beta);
    for (auto& v : g.values()) {
        v = -v;
    }
    return g;
}

namespace {

void check_focal_tversky(const LossConfig& cfg)
{
    if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) {
        throw ConfigError("focal_tversky requires gamma > 0");
    }
    if (cfg.gamma < 1.0 || cfg.gamma > 3.0) {
        warn("focal_tversky gamma " + std::to_string(cfg.gamma) +
             " is outside the recommended range [1, 3]");
    }
}

}  // namespace

double focal_tversky_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_focal_tversky(cfg);
    return std::pow(tversky_loss(y, p, cfg), cfg.gamma);
}

GradientMap focal_tversky_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                        const LossConfig& cfg)
{
    check_focal_tversky(cfg);
    const double base = tversky_loss(y, p, cfg);
    GradientMap g = tversky_loss_gradient(y, p, cfg);
    double outer = 0.0;
    if (cfg.gamma == 1.0) {
        outer = 1.0;
    } else if (base > 0.0) {
        outer = cfg.gamma * std::pow(base, cfg.gamma - 1.0);
    }
    for (auto& v : g.values()) {
        v *= outer;
    }
    return g;
}

namespace {

void check_w(const LossConfig& cfg)
{
    if (!(cfg.w >= 0.0 && cfg.w <= 1.0)) {
        throw ConfigError("sensitivity_specificity requires w in [0, 1]");
    }
}

}  // namespace

double sensitivity_specificity_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    check_smooth(y, p, cfg, "sensitivity_specificity_loss");
    check_w(cfg);
    const SoftConfusion c = soft_confusion(y, p);
    const double sens = c.tp / (c.tp + c.fn + cfg.epsilon);
    const double spec = c.tn / (c.tn + c.fp + cfg.epsilon);
    return 1.0 - (cfg.w * sens + (1.0 - cfg.w) * spec);
}

GradientMap sensitivity_specificity_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                                  const LossConfig& cfg)
{
    check_smooth(y, p, cfg, "sensitivity_specificity_loss");
    check_w(cfg);
    // tp + fn and tn + fp do not depend on p.
    const SoftConfusion c = soft_confusion(y, p);
    const double positive = c.tp + c.fn + cfg.epsilon;
    const double negative = c.tn + c.fp + cfg.epsilon;
    GradientMap g(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        g[i] = y[i] ? -cfg.w / positive : (1.0 - cfg.w) / negative;
    }
    return g;
}

double log_cosh(double x) noexcept
{
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double log_cosh_dice_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    return log_cosh(dice_loss(y, p, cfg));
}

GradientMap log_cosh_dice_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                        const LossConfig& cfg)
{
    const double slope = std::tanh(dice_loss(y, p, cfg));
    GradientMap g = dice_loss_gradient(y, p, cfg);
    for (auto& v : g.values()) {
        v *= slope;
    }
    return g;
}

}  // namespace segloss
