#include "segloss/metrics.hpp"

#include "segloss/geometry.hpp"

namespace segloss {

Mask binarize(const ProbabilityMap& p, double threshold)
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("threshold must lie in (0, 1)");
    }
    std::vector<std::uint8_t> bits(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        bits[i] = p[i] >= threshold ? 1 : 0;
    }
    return Mask(p.shape(), std::move(bits));
}

HardConfusion hard_confusion(const Mask& pred, const Mask& truth)
{
    require_same_shape(pred.shape(), truth.shape(), "metrics");
    HardConfusion c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i]) {
            (pred[i] ? c.tp : c.fn) += 1;
        } else {
            (pred[i] ? c.fp : c.tn) += 1;
        }
    }
    return c;
}

double dice_coefficient(const HardConfusion& c)
{
    const std::size_t denominator = 2 * c.tp + c.fp + c.fn;
    if (denominator == 0) {
        return 1.0;
    }
    return static_cast<double>(2 * c.tp) / static_cast<double>(denominator);
}

double sensitivity(const HardConfusion& c)
{
    if (c.tp + c.fn == 0) {
        return 1.0;
    }
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
}

double specificity(const HardConfusion& c)
{
    if (c.tn + c.fp == 0) {
        return 1.0;
    }
    return static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
}

double dice_coefficient(const Mask& pred, const Mask& truth)
{
    return dice_coefficient(hard_confusion(pred, truth));
}

double sensitivity(const Mask& pred, const Mask& truth)
{
    return sensitivity(hard_confusion(pred, truth));
}

double specificity(const Mask& pred, const Mask& truth)
{
    return specificity(hard_confusion(pred, truth));
}

std::optional<double> boundary_hausdorff(const Mask& pred, const Mask& truth)
{
    require_same_shape(pred.shape(), truth.shape(), "metrics");
    const PixelSet a = extract_boundary(pred);
    const PixelSet b = extract_boundary(truth);
    if (a.empty() || b.empty()) {
        return std::nullopt;
    }
    return hausdorff_distance(a, b);
}

MetricSummary evaluate(const Mask& pred, const Mask& truth)
{
    const HardConfusion c = hard_confusion(pred, truth);
    return {dice_coefficient(c), sensitivity(c), specificity(c)};
}

}  // namespace segloss
