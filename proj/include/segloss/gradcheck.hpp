#ifndef SEGLOSS_GRADCHECK_HPP
#define SEGLOSS_GRADCHECK_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "segloss/geometry.hpp"
#include "segloss/losses.hpp"

namespace segloss {

struct GradCheckResult {
    LossId loss = LossId::bce;
    double max_rel_error = 0.0;  ///< over pixels whose gradient magnitude is >= small_gradient
    double max_abs_error = 0.0;  ///< over all pixels
    Pixel worst_pixel{};
    bool passed = false;
};

struct GradCheckTolerance {
    double relative = 1e-5;
    double abs_floor = 1e-8;        ///< absolute tolerance for near-zero gradients
    double small_gradient = 1e-6;   ///< below this magnitude the absolute floor applies
};

/// Central differences of an arbitrary functional of p.
GradientMap finite_diff_gradient(const std::function<double(const ProbabilityMap&)>& functional,
                                 const ProbabilityMap& p, double h = 1e-5);

/// Central differences of a loss with its frozen coefficients pinned to the
/// values computed from the unperturbed p.
GradientMap finite_diff_gradient(LossId id, const Mask& y, const ProbabilityMap& p,
                                 const LossConfig& cfg, const DistanceMap* phi, double h = 1e-5);

/// Pixelwise comparison. A pixel passes when its relative error is below
/// tolerance, or when both gradients are below small_gradient and their
/// difference is below abs_floor.
GradCheckResult compare_gradients(LossId id, const GradientMap& analytic,
                                  const GradientMap& numeric, const GradCheckTolerance& tol);

/// Random instance used by the gradient check for one seed: iid fair-coin
/// mask, probabilities uniform in [0.2, 0.8], phi the normalized distance to
/// the mask boundary.
struct GradCheckInstance {
    Mask truth;
    ProbabilityMap pred;
    DistanceMap phi;
};
GradCheckInstance make_gradcheck_instance(std::uint64_t seed, Shape shape);

std::vector<GradCheckResult> run_gradcheck(const std::vector<LossId>& ids, std::uint64_t seed,
                                           Shape shape, const GradCheckTolerance& tol,
                                           const LossConfig& cfg = {});

}  // namespace segloss

#endif  // SEGLOSS_GRADCHECK_HPP
