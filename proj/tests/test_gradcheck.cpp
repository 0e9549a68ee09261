#include <doctest.h>

#include <cmath>
#include <limits>

#include "segloss/gradcheck.hpp"
#include "test_support.hpp"

using namespace segloss;
using segloss::test::mask;
using segloss::test::prob;

TEST_CASE("finite differences of simple functionals")
{
    const auto p = prob(2, 2, {0.2, 0.4, 0.6, 0.8});
    const auto g = finite_diff_gradient(
        [](const ProbabilityMap& q) {
            double s = 0.0;
            for (double v : q.values()) s += v * v;
            return s;
        },
        p);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(g[i] == doctest::Approx(2.0 * p[i]).epsilon(1e-9));
    }
    const auto gb = finite_diff_gradient(LossId::bce, mask(1, 1, {1}), prob(1, 1, {0.5}), LossConfig{}, nullptr);
    CHECK(std::fabs(gb[0] + 2.0) <= 1e-8);
}

TEST_CASE("every loss has a gradient")
{
    const auto inst = make_gradcheck_instance(1, Shape{4, 4});
    for (LossId id : kAllLosses) {
        const auto g = analytic_gradient(id, inst.truth, inst.pred, LossConfig{}, &inst.phi);
        CHECK(g.shape() == inst.truth.shape());
    }
}

TEST_CASE("all losses pass at 8x8, seed 42")
{
    const std::vector<LossId> ids(kAllLosses.begin(), kAllLosses.end());
    for (const auto& r : run_gradcheck(ids, 42, Shape{8, 8}, GradCheckTolerance{})) {
        INFO(loss_name(r.loss));
        CHECK(r.passed);
    }
}

TEST_CASE("a corrupted gradient is caught at the right pixel")
{
    const auto inst = make_gradcheck_instance(3, Shape{8, 8});
    const LossConfig cfg;
    auto analytic = analytic_gradient(LossId::dice, inst.truth, inst.pred, cfg);
    const auto numeric = finite_diff_gradient(LossId::dice, inst.truth, inst.pred, cfg, nullptr);
    analytic.at(5, 2) *= 1.1;
    const auto r = compare_gradients(LossId::dice, analytic, numeric, GradCheckTolerance{});
    CHECK_FALSE(r.passed);
    CHECK(r.worst_pixel == Pixel{5, 2});
}

TEST_CASE("tolerance extremes")
{
    const std::vector<LossId> ids(kAllLosses.begin(), kAllLosses.end());
    GradCheckTolerance loose;
    loose.relative = std::numeric_limits<double>::infinity();
    for (const auto& r : run_gradcheck(ids, 7, Shape{8, 8}, loose)) {
        CHECK(r.passed);
    }
    GradCheckTolerance zero;
    zero.relative = 0.0;
    bool any_failed = false;
    for (const auto& r : run_gradcheck(ids, 7, Shape{8, 8}, zero)) {
        any_failed = any_failed || !r.passed;
    }
    CHECK(any_failed);
    CHECK_THROWS_AS(run_gradcheck(ids, 7, Shape{1, 8}, GradCheckTolerance{}), Error);
}

TEST_CASE("dice gradient at its minimum points uphill in every feasible direction")
{
    const auto y = mask(3, 3, {1, 1, 0, 1, 0, 0, 0, 0, 1});
    std::vector<double> pv;
    for (auto b : y.values()) {
        pv.push_back(b ? 0.999 : 0.001);
    }
    const auto p = prob(3, 3, pv);
    LossConfig cfg;
    cfg.smooth = 0.0;
    const auto g = analytic_gradient(LossId::dice, y, p, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) {
        // Feasible moves: down on foreground, up on background.
        const double directional = y[i] ? -g[i] : g[i];
        CHECK(directional >= -1e-6);
    }
}
