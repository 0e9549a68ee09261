#include <doctest.h>

#include <cmath>

#include "segloss/boundary_losses.hpp"
#include "segloss/distribution_losses.hpp"
#include "segloss/geometry.hpp"
#include "segloss/metrics.hpp"
#include "test_support.hpp"

using namespace segloss;
using segloss::test::mask;
using segloss::test::prob;

namespace {

Mask centre_pixel()
{
    return mask(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
}

ProbabilityMap soft(const Mask& m, double on, double off)
{
    RealGrid g(m.shape(), off);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i]) {
            g[i] = on;
        }
    }
    return ProbabilityMap(std::move(g));
}

}  // namespace

TEST_CASE("hausdorff_dt_loss vanishes on perfect predictions")
{
    const LossConfig cfg;
    const auto y = mask(3, 4, {0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 1, 0});
    CHECK(hausdorff_dt_loss(y, ProbabilityMap::from_mask(y), cfg) == 0.0);
}

TEST_CASE("hausdorff_dt_loss on a 3x3 centre pixel")
{
    LossConfig cfg;
    const auto p = prob(3, 3, std::vector<double>(9, 0.5));
    // p >= 0.5 everywhere, so the predicted boundary is the outer ring and
    // d_p is 1 at the centre: (0.25 * (4 * 1 + 4 * 2) + 0.25 * 1) / 9.
    CHECK(hausdorff_dt_loss(centre_pixel(), p, cfg) == doctest::Approx(3.25 / 9.0).epsilon(1e-14));
    // A threshold above 0.5 leaves an empty predicted boundary; only d_y remains.
    cfg.threshold = 0.6;
    CHECK(hausdorff_dt_loss(centre_pixel(), p, cfg) == doctest::Approx(3.0 / 9.0).epsilon(1e-14));
    CHECK(hausdorff_dt_loss(centre_pixel(), p, cfg) == doctest::Approx(0.333333).epsilon(1e-6));
}

TEST_CASE("hausdorff_dt_loss grows with alpha when a distant pixel is wrong")
{
    LossConfig cfg;
    const Mask y = mask(1, 6, {1, 1, 0, 0, 0, 0});
    const auto p = prob(1, 6, {0.9, 0.9, 0.1, 0.1, 0.1, 0.8});
    const double a2 = hausdorff_dt_loss(y, p, cfg);
    cfg.hd_alpha = 4.0;
    CHECK(hausdorff_dt_loss(y, p, cfg) > a2);
}

TEST_CASE("hausdorff_dt_loss ignores pixels where p equals y")
{
    const LossConfig cfg;
    const Mask y = mask(2, 4, {1, 1, 0, 0, 1, 1, 0, 0});
    const auto p = prob(2, 4, {1.0, 0.7, 0.0, 0.2, 1.0, 0.6, 0.3, 0.0});
    const auto terms = hausdorff_dt_terms(y, p, cfg);
    const auto q = prob(2, 4, {1.0, 0.7, 0.0, 0.2, 1.0, 0.6, 0.3, 0.0});
    CHECK(hausdorff_dt_loss(y, q, terms) == hausdorff_dt_loss(y, p, terms));
    const auto g = hausdorff_dt_loss_gradient(y, p, terms);
    CHECK(g[0] == 0.0);
    CHECK(g[2] == 0.0);
}

TEST_CASE("shape_aware_loss")
{
    const LossConfig cfg;
    const auto y = mask(3, 3, {1, 1, 0, 1, 1, 0, 0, 0, 0});
    const auto perfect = ProbabilityMap::from_mask(y);
    const auto t = shape_aware_terms(y, perfect, cfg);
    CHECK(t.curve_distance == 0.0);
    CHECK(shape_aware_loss(y, perfect, cfg) == bce(y, perfect, cfg));

    // A 2x2 block shifted one column to the right.
    Mask truth(Shape{4, 4});
    Mask shifted(Shape{4, 4});
    for (std::size_t r = 1; r <= 2; ++r) {
        truth.set(r, 1, true);
        truth.set(r, 2, true);
        shifted.set(r, 2, true);
        shifted.set(r, 3, true);
    }
    const auto p = soft(shifted, 0.9, 0.1);
    const PixelSet pred_boundary = extract_boundary(binarize(p));
    const PixelSet true_boundary = extract_boundary(truth);
    double total = 0.0;
    for (const auto& a : pred_boundary) {
        double best = INFINITY;
        for (const auto& b : true_boundary) {
            best = std::min(best, std::hypot(double(a.row) - double(b.row), double(a.col) - double(b.col)));
        }
        total += best;
    }
    const double e = total / static_cast<double>(pred_boundary.size());
    CHECK(e == 0.5);
    CHECK(shape_aware_terms(truth, p, cfg).curve_distance == e);
    CHECK(shape_aware_loss(truth, p, cfg) == doctest::Approx((1.0 + e) * bce(truth, p, cfg)).epsilon(1e-14));

    ShapeAwareTerms unit{RealGrid(truth.shape(), 2.0), 1.0};
    CHECK(shape_aware_loss(truth, p, unit, cfg) == doctest::Approx(2.0 * bce(truth, p, cfg)).epsilon(1e-14));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [yy, pp] = test::random_pair(seed, Shape{6, 6});
        CHECK(shape_aware_loss(yy, pp, cfg) >= bce(yy, pp, cfg));
    }
}

TEST_CASE("shape_aware_loss without a true boundary falls back to bce")
{
    const LossConfig cfg;
    int warnings = 0;
    auto previous = set_warning_handler([&](const std::string&) { ++warnings; });
    const Mask empty(Shape{3, 3});
    const auto p = prob(3, 3, std::vector<double>(9, 0.3));
    const double v = shape_aware_loss(empty, p, cfg);
    set_warning_handler(previous);
    CHECK(warnings == 1);
    CHECK(v == bce(empty, p, cfg));
}

TEST_CASE("shape_aware per-pixel mode uses 1 + d_y")
{
    LossConfig cfg;
    cfg.shape_per_pixel = true;
    const auto y = centre_pixel();
    const auto p = prob(3, 3, std::vector<double>(9, 0.4));
    const auto t = shape_aware_terms(y, p, cfg);
    CHECK(t.coefficient.at(0, 0) == 1.0 + std::sqrt(2.0));
    CHECK(t.coefficient.at(1, 1) == 1.0);
}
