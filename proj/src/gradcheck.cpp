#include "segloss/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "segloss/random.hpp"

namespace segloss {

GradientMap finite_diff_gradient(const std::function<double(const ProbabilityMap&)>& functional,
                                 const ProbabilityMap& p, double h)
{
    if (!(h > 0.0)) {
        throw ConfigError("finite-difference step must be positive");
    }
    GradientMap g(p.shape(), 0.0);
    RealGrid work = p.grid();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double original = work[i];
        work[i] = original + h;
        const double up = functional(ProbabilityMap(work));
        work[i] = original - h;
        const double down = functional(ProbabilityMap(work));
        work[i] = original;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

GradientMap finite_diff_gradient(LossId id, const Mask& y, const ProbabilityMap& p,
                                 const LossConfig& cfg, const DistanceMap* phi, double h)
{
    const FrozenCoefficients frozen = freeze(id, y, p, cfg);
    return finite_diff_gradient(
        [&](const ProbabilityMap& q) { return loss_value(id, y, q, cfg, phi, frozen); }, p, h);
}

GradCheckResult compare_gradients(LossId id, const GradientMap& analytic,
                                  const GradientMap& numeric, const GradCheckTolerance& tol)
{
    require_same_shape(analytic.shape(), numeric.shape(), "compare_gradients");
    GradCheckResult result;
    result.loss = id;
    result.passed = true;
    const std::size_t width = analytic.shape().width;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double a = analytic[i];
        const double n = numeric[i];
        const double abs_err = std::fabs(a - n);
        const double scale = std::max(std::fabs(a), std::fabs(n));
        const bool small = scale < tol.small_gradient;
        const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;

        bool ok = rel_err < tol.relative;
        if (small) {
            ok = ok || abs_err < tol.abs_floor;
        } else {
            result.max_rel_error = std::max(result.max_rel_error, rel_err);
        }
        if (!std::isfinite(a) || !std::isfinite(n)) {
            ok = false;
        }
        result.max_abs_error = std::max(result.max_abs_error, abs_err);

        // Failing pixels outrank passing ones; ties broken by relative error.
        const double score = (ok ? 0.0 : 2.0) + rel_err / (1.0 + rel_err);
        if (score > worst_score) {
            worst_score = score;
            result.worst_pixel = {i / width, i % width};
        }
        result.passed = result.passed && ok;
    }
    return result;
}

GradCheckInstance make_gradcheck_instance(std::uint64_t seed, Shape shape)
{
    validate_shape(shape);
    Rng rng(seed);
    std::vector<std::uint8_t> bits(shape.size());
    for (auto& b : bits) {
        b = rng.coin() ? 1 : 0;
    }
    std::vector<double> probs(shape.size());
    for (auto& v : probs) {
        v = rng.uniform(0.2, 0.8);
    }
    Mask truth(shape, std::move(bits));
    DistanceMap phi = boundary_distance_map(truth, true);
    return {std::move(truth), ProbabilityMap(shape, std::move(probs)), std::move(phi)};
}

std::vector<GradCheckResult> run_gradcheck(const std::vector<LossId>& ids, std::uint64_t seed,
                                           Shape shape, const GradCheckTolerance& tol,
                                           const LossConfig& cfg)
{
    if (shape.height < 2 || shape.width < 2) {
        throw ConfigError("gradient check needs at least a 2x2 grid");
    }
    const GradCheckInstance inst = make_gradcheck_instance(seed, shape);
    std::vector<GradCheckResult> results;
    results.reserve(ids.size());
    for (LossId id : ids) {
        const FrozenCoefficients frozen = freeze(id, inst.truth, inst.pred, cfg);
        const GradientMap analytic =
            analytic_gradient(id, inst.truth, inst.pred, cfg, &inst.phi, frozen);
        const GradientMap numeric = finite_diff_gradient(id, inst.truth, inst.pred, cfg, &inst.phi);
        results.push_back(compare_gradients(id, analytic, numeric, tol));
    }
    return results;
}

}  // namespace segloss
