#include <doctest.h>

#include <cmath>

#include "segloss/distribution_losses.hpp"
#include "segloss/region_losses.hpp"
#include "segloss/harness.hpp"
#include "test_support.hpp"

using namespace segloss;
using segloss::test::mask;
using segloss::test::prob;

TEST_CASE("dice_loss")
{
    const LossConfig cfg;
    CHECK(dice_loss(mask(2, 2, {0, 0, 0, 0}), prob(2, 2, {0, 0, 0, 0}), cfg) == 0.0);
    CHECK(dice_loss(mask(1, 1, {1}), prob(1, 1, {1.0}), cfg) == 0.0);
    CHECK(dice_loss(mask(1, 1, {1}), prob(1, 1, {0.0}), cfg) == 0.5);

    // Symmetric in its arguments for binary p.
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = test::random_pair(seed, Shape{5, 5});
        const auto b = test::random_pair(seed + 100, Shape{5, 5});
        CHECK(dice_loss(a.y, ProbabilityMap::from_mask(b.y), cfg) ==
              doctest::Approx(dice_loss(b.y, ProbabilityMap::from_mask(a.y), cfg)).epsilon(1e-15));
    }
}

TEST_CASE("tversky_loss")
{
    LossConfig cfg;
    cfg.beta = 0.3;
    CHECK(tversky_loss(mask(1, 1, {1}), prob(1, 1, {0.0}), cfg) ==
          doctest::Approx(1.0 - 1.0 / 1.7).epsilon(1e-14));
    CHECK(tversky_loss(mask(1, 1, {1}), prob(1, 1, {0.0}), cfg) == doctest::Approx(0.411765).epsilon(1e-6));
    for (double beta : {0.0, 0.3, 0.5, 1.0}) {
        cfg.beta = beta;
        const auto y = mask(2, 2, {1, 0, 1, 1});
        CHECK(tversky_loss(y, ProbabilityMap::from_mask(y), cfg) == 0.0);
    }
    cfg.beta = 0.5;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto [y, p] = test::random_pair(seed, Shape{6, 6});
        const auto c = soft_confusion(y, p);
        const double closed = 1.0 - (c.tp + cfg.smooth) / (c.tp + 0.5 * (c.fp + c.fn) + cfg.smooth);
        CHECK(std::fabs(tversky_loss(y, p, cfg) - closed) <= 1e-12);
    }
    // With no smoothing the beta = 1/2 index is the Dice coefficient.
    cfg.smooth = 0.0;
    const auto [y, p] = test::random_pair(7, Shape{6, 6});
    CHECK(tversky_loss(y, p, cfg) == doctest::Approx(dice_loss(y, p, cfg)).epsilon(1e-13));
    cfg.beta = 1.5;
    CHECK_THROWS_AS(tversky_loss(y, p, cfg), ConfigError);
}

TEST_CASE("focal_tversky_loss")
{
    LossConfig cfg;
    cfg.beta = 0.3;
    cfg.gamma = 2.0;
    CHECK(focal_tversky_loss(mask(1, 1, {1}), prob(1, 1, {0.0}), cfg) ==
          doctest::Approx(0.169550).epsilon(1e-5));
    cfg.gamma = 1.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [y, p] = test::random_pair(seed, Shape{5, 4});
        CHECK(focal_tversky_loss(y, p, cfg) == tversky_loss(y, p, cfg));
    }
    cfg.gamma = 3.0;
    const auto y = mask(2, 2, {1, 0, 0, 1});
    CHECK(focal_tversky_loss(y, ProbabilityMap::from_mask(y), cfg) == 0.0);

    int warnings = 0;
    auto previous = set_warning_handler([&](const std::string&) { ++warnings; });
    cfg.gamma = 0.5;
    focal_tversky_loss(y, prob(2, 2, {0.5, 0.5, 0.5, 0.5}), cfg);
    set_warning_handler(previous);
    CHECK(warnings == 1);
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(focal_tversky_loss(y, ProbabilityMap::from_mask(y), cfg), ConfigError);
}

TEST_CASE("sensitivity_specificity_loss")
{
    LossConfig cfg;
    const auto y = mask(2, 3, {1, 0, 1, 0, 0, 1});
    CHECK(sensitivity_specificity_loss(y, ProbabilityMap::from_mask(y), cfg) <= 1e-6);
    cfg.w = 1.0;
    CHECK(sensitivity_specificity_loss(mask(1, 1, {1}), prob(1, 1, {0.25}), cfg) ==
          doctest::Approx(0.75).epsilon(1e-6));
    cfg.w = 0.0;
    const auto p1 = prob(2, 3, {0.1, 0.4, 0.2, 0.3, 0.6, 0.9});
    const auto p2 = prob(2, 3, {0.8, 0.4, 0.7, 0.3, 0.6, 0.05});
    CHECK(sensitivity_specificity_loss(y, p1, cfg) == sensitivity_specificity_loss(y, p2, cfg));
}

TEST_CASE("log_cosh_dice_loss")
{
    CHECK(log_cosh(0.0) == 0.0);
    CHECK(log_cosh(0.5) == doctest::Approx(std::log(std::cosh(0.5))).epsilon(1e-15));
    CHECK(log_cosh(0.5) == doctest::Approx(0.120115).epsilon(1e-5));
    CHECK(log_cosh(800.0) == doctest::Approx(800.0 - std::log(2.0)));

    const LossConfig cfg;
    const auto y = mask(1, 1, {1});
    CHECK(log_cosh_dice_loss(y, prob(1, 1, {1.0}), cfg) == 0.0);
    CHECK(log_cosh_dice_loss(y, prob(1, 1, {0.0}), cfg) == doctest::Approx(log_cosh(0.5)));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto [yy, pp] = test::random_pair(seed, Shape{6, 6}, 0.0, 1.0);
        const double dl = dice_loss(yy, pp, cfg);
        const double lc = log_cosh_dice_loss(yy, pp, cfg);
        CHECK(lc <= dl);
        CHECK(lc >= 0.0);
        CHECK(lc <= std::log(std::cosh(1.0)));
        const auto g = log_cosh_dice_loss_gradient(yy, pp, cfg);
        const auto gd = dice_loss_gradient(yy, pp, cfg);
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(std::fabs(g[i] - std::tanh(dl) * gd[i]) <= 1e-12);
        }
    }
}

TEST_CASE("region losses stay in [0, 1]")
{
    LossConfig cfg;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto [y, p] = test::random_pair(seed, Shape{5, 7}, 0.0, 1.0);
        for (double v : {dice_loss(y, p, cfg), tversky_loss(y, p, cfg), focal_tversky_loss(y, p, cfg),
                         sensitivity_specificity_loss(y, p, cfg)}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("class imbalance separates bce from dice")
{
    SyntheticMaskSpec spec;
    spec.kind = MaskKind::sparse;
    spec.shape = Shape{64, 64};
    spec.fraction = 0.01;
    const Mask y = generate_mask(spec);
    LossConfig cfg;
    const ProbabilityMap p(RealGrid(y.shape(), cfg.epsilon));
    // Only the 41 foreground pixels pay -ln(eps); at eps = 1e-7 that is about 0.161.
    const double f = 41.0 / 4096.0;
    const double closed = f * -std::log(cfg.epsilon) + (1.0 - f) * -std::log1p(-cfg.epsilon);
    CHECK(bce(y, p, cfg) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(dice_loss(y, p, cfg) > 0.9);
    CHECK(bce(y, p, cfg) < dice_loss(y, p, cfg) / 5.0);

    cfg.epsilon = 1e-4;
    const ProbabilityMap q(RealGrid(y.shape(), cfg.epsilon));
    CHECK(bce(y, q, cfg) < 0.1);
    CHECK(dice_loss(y, q, cfg) > 0.9);
}
