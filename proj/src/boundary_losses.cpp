#include "segloss/boundary_losses.hpp"

#include <algorithm>
#include <cmath>

#include "segloss/distribution_losses.hpp"
#include "segloss/geometry.hpp"
#include "segloss/metrics.hpp"

namespace segloss {

namespace {

void check_threshold(const LossConfig& cfg)
{
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) {
        throw ConfigError("threshold must lie in (0, 1)");
    }
}

}  // namespace

HausdorffTerms hausdorff_dt_terms(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "hausdorff_dt_loss");
    check_threshold(cfg);
    if (!(cfg.hd_alpha >= 1.0) || !std::isfinite(cfg.hd_alpha)) {
        throw ConfigError("hd_alpha must be >= 1");
    }
    const DistanceMap dy = boundary_distance_map(y);
    const DistanceMap dp = boundary_distance_map(binarize(p, cfg.threshold));
    HausdorffTerms terms{RealGrid(y.shape(), 0.0)};
    for (std::size_t i = 0; i < y.size(); ++i) {
        terms.weight[i] = std::pow(dy[i], cfg.hd_alpha) + std::pow(dp[i], cfg.hd_alpha);
    }
    return terms;
}

double hausdorff_dt_loss(const Mask& y, const ProbabilityMap& p, const HausdorffTerms& terms)
{
    require_same_shape(y.shape(), p.shape(), "hausdorff_dt_loss");
    require_same_shape(y.shape(), terms.weight.shape(), "hausdorff_dt_loss");
    RealGrid values(y.shape(), 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double err = p[i] - (y[i] ? 1.0 : 0.0);
        values[i] = err * err * terms.weight[i];
    }
    return reduce_mean(values);
}

GradientMap hausdorff_dt_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                       const HausdorffTerms& terms)
{
    require_same_shape(y.shape(), p.shape(), "hausdorff_dt_loss");
    require_same_shape(y.shape(), terms.weight.shape(), "hausdorff_dt_loss");
    GradientMap g(y.shape(), 0.0);
    const double scale = 2.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double err = p[i] - (y[i] ? 1.0 : 0.0);
        g[i] = scale * err * terms.weight[i];
    }
    return g;
}

double hausdorff_dt_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    return hausdorff_dt_loss(y, p, hausdorff_dt_terms(y, p, cfg));
}

ShapeAwareTerms shape_aware_terms(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    require_same_shape(y.shape(), p.shape(), "shape_aware_loss");
    check_threshold(cfg);
    ShapeAwareTerms terms{RealGrid(y.shape(), 1.0), 0.0};

    const PixelSet truth_boundary = extract_boundary(y);
    if (truth_boundary.empty()) {
        warn("shape_aware_loss: ground truth has no boundary, falling back to bce");
        return terms;
    }
    const DistanceMap dy = distance_transform(y.shape(), truth_boundary);
    if (cfg.shape_per_pixel) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            terms.coefficient[i] = 1.0 + dy[i];
        }
        return terms;
    }

    const PixelSet predicted_boundary = extract_boundary(binarize(p, cfg.threshold));
    // An empty prediction has no curve to measure; charge it the farthest
    // distance any pixel has from the true curve.
    const double e = predicted_boundary.empty()
                         ? *std::max_element(dy.values().begin(), dy.values().end())
                         : mean_point_to_set_distance(predicted_boundary, truth_boundary);
    terms.curve_distance = e;
    for (auto& v : terms.coefficient.values()) {
        v = 1.0 + e;
    }
    return terms;
}

double shape_aware_loss(const Mask& y, const ProbabilityMap& p, const ShapeAwareTerms& terms,
                        const LossConfig& cfg)
{
    cfg.validate_common();
    require_same_shape(y.shape(), terms.coefficient.shape(), "shape_aware_loss");
    RealGrid ce = cross_entropy_map(y, p, cfg.epsilon);
    for (std::size_t i = 0; i < ce.size(); ++i) {
        ce[i] = terms.coefficient[i] * ce[i];
    }
    return reduce_mean(ce);
}

GradientMap shape_aware_loss_gradient(const Mask& y, const ProbabilityMap& p,
                                      const ShapeAwareTerms& terms, const LossConfig& cfg)
{
    cfg.validate_common();
    require_same_shape(y.shape(), terms.coefficient.shape(), "shape_aware_loss");
    GradientMap g = cross_entropy_slope(y, p, cfg.epsilon);
    const double scale = 1.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] *= terms.coefficient[i] * scale;
    }
    return g;
}

double shape_aware_loss(const Mask& y, const ProbabilityMap& p, const LossConfig& cfg)
{
    return shape_aware_loss(y, p, shape_aware_terms(y, p, cfg), cfg);
}

}  // namespace segloss
