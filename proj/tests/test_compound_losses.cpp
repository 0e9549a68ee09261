#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "segloss/compound_losses.hpp"
#include "segloss/distribution_losses.hpp"
#include "segloss/region_losses.hpp"
#include "test_support.hpp"

using namespace segloss;
using segloss::test::mask;
using segloss::test::prob;

namespace {

// Straight-line structural loss: local statistics with mirror padding,
// normalized error, threshold, weighted cross-entropy.
double ssl_oracle(const Mask& y, const ProbabilityMap& p, double c4, int window, double beta, double eps)
{
    const long h = static_cast<long>(y.shape().height);
    const long w = static_cast<long>(y.shape().width);
    const long half = window / 2;
    auto reflect = [](long i, long n) {
        if (i < 0) return -i;
        if (i >= n) return 2 * (n - 1) - i;
        return i;
    };
    auto stats = [&](auto value, long r, long c, double& mean, double& sd) {
        double s = 0.0;
        for (long dr = -half; dr <= half; ++dr)
            for (long dc = -half; dc <= half; ++dc)
                s += value(reflect(r + dr, h), reflect(c + dc, w));
        mean = s / (window * window);
        double v = 0.0;
        for (long dr = -half; dr <= half; ++dr)
            for (long dc = -half; dc <= half; ++dc) {
                const double d = value(reflect(r + dr, h), reflect(c + dc, w)) - mean;
                v += d * d;
            }
        sd = std::sqrt(v / (window * window));
    };
    auto yv = [&](long r, long c) { return static_cast<double>(y.at(r, c)); };
    auto pv = [&](long r, long c) { return p.at(r, c); };
    std::vector<double> e;
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double my, sy, mp, sp;
            stats(yv, r, c, my, sy);
            stats(pv, r, c, mp, sp);
            e.push_back(std::fabs((yv(r, c) - my + c4) / (sy + c4) - (pv(r, c) - mp + c4) / (sp + c4)));
        }
    }
    const double emax = *std::max_element(e.begin(), e.end());
    double total = 0.0;
    double kept = 0.0;
    for (long i = 0; i < h * w; ++i) {
        if (e[i] > beta * emax) {
            const double q = std::clamp(p[i], eps, 1.0 - eps);
            total += e[i] * -(y[i] ? std::log(q) : std::log(1.0 - q));
            kept += 1.0;
        }
    }
    return kept == 0.0 ? 0.0 : total / kept;
}

}  // namespace

TEST_CASE("combo_loss")
{
    LossConfig cfg;
    cfg.alpha = 1.0;
    cfg.beta = 0.5;
    CHECK(combo_loss(mask(1, 1, {1}), prob(1, 1, {0.5}), cfg) ==
          doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    CHECK(combo_loss(mask(1, 1, {1}), prob(1, 1, {0.5}), cfg) == doctest::Approx(0.346574).epsilon(1e-6));

    cfg.alpha = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [y, p] = test::random_pair(seed, Shape{5, 5});
        CHECK(combo_loss(y, p, cfg) == dice_loss(y, p, cfg));
    }
    cfg.alpha = 0.3;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [y, p] = test::random_pair(seed, Shape{5, 5});
        LossConfig pure = cfg;
        pure.alpha = 1.0;
        const double mbce = combo_loss(y, p, pure);
        const double dl = dice_loss(y, p, cfg);
        const double v = combo_loss(y, p, cfg);
        CHECK(v >= std::min(mbce, dl) - 1e-15);
        CHECK(v <= std::max(mbce, dl) + 1e-15);
    }
    const auto y = mask(2, 2, {1, 0, 0, 1});
    CHECK(combo_loss(y, ProbabilityMap::from_mask(y), cfg) <= 1e-6);
    cfg.beta = 1.2;
    CHECK_THROWS_AS(combo_loss(y, ProbabilityMap::from_mask(y), cfg), ConfigError);
}

TEST_CASE("exp_log_loss")
{
    LossConfig cfg;
    cfg.gamma = 2.0;
    cfg.w_dice = 1.0;
    cfg.w_cross = 0.0;
    CHECK(exp_log_loss(mask(1, 1, {1}), prob(1, 1, {0.5}), cfg) ==
          doctest::Approx(std::pow(std::log(0.8), 2)).epsilon(1e-14));
    CHECK(exp_log_loss(mask(1, 1, {1}), prob(1, 1, {0.5}), cfg) == doctest::Approx(0.049793).epsilon(1e-5));

    cfg.gamma = 1.0;
    cfg.w_dice = 0.0;
    cfg.w_cross = 1.0;
    cfg.w_label = 1.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto [y, p] = test::random_pair(seed, Shape{6, 6});
        CHECK(std::fabs(exp_log_loss(y, p, cfg) - bce(y, p, cfg)) <= 1e-12);
    }

    cfg = LossConfig{};
    const auto y = mask(2, 3, {1, 0, 1, 1, 0, 0});
    CHECK(exp_log_loss(y, ProbabilityMap::from_mask(y), cfg) <= 1e-12);
    cfg.gamma = 0.0;
    CHECK_THROWS_AS(exp_log_loss(y, ProbabilityMap::from_mask(y), cfg), ConfigError);
}

TEST_CASE("ssl_loss")
{
    LossConfig cfg;
    const auto y = mask(4, 4, {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0});
    CHECK(ssl_loss(y, ProbabilityMap::from_mask(y), cfg) == 0.0);
    CHECK(ssl_terms(y, ProbabilityMap::from_mask(y), cfg).kept == 0.0);

    // One flipped pixel.
    std::vector<double> flipped(y.as_real().vector());
    flipped[5] = 0.0;
    const auto p = prob(4, 4, flipped);
    cfg.c4 = 0.01;
    cfg.window = 3;
    cfg.ssl_beta = 0.1;
    CHECK(ssl_loss(y, p, cfg) == doctest::Approx(ssl_oracle(y, p, 0.01, 3, 0.1, cfg.epsilon)).epsilon(1e-12));

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [yy, pp] = test::random_pair(seed, Shape{6, 7});
        CHECK(ssl_loss(yy, pp, cfg) ==
              doctest::Approx(ssl_oracle(yy, pp, cfg.c4, cfg.window, cfg.ssl_beta, cfg.epsilon)).epsilon(1e-12));
    }

    // Threshold off: every pixel with e > 0 is kept.
    cfg.ssl_beta = 0.0;
    const auto [yy, pp] = test::random_pair(3, Shape{5, 5});
    const auto t = ssl_terms(yy, pp, cfg);
    double kept = 0.0;
    for (double e : t.error.values()) {
        kept += e > 0.0 ? 1.0 : 0.0;
    }
    CHECK(t.kept == kept);

    cfg.c4 = 0.0;
    CHECK_THROWS_AS(ssl_loss(yy, pp, cfg), ConfigError);
    cfg.c4 = 0.01;
    cfg.ssl_beta = 1.5;
    CHECK_THROWS_AS(ssl_loss(yy, pp, cfg), ConfigError);
}

TEST_CASE("ssl_loss ignores abandoned pixels")
{
    LossConfig cfg;
    const auto [y, p] = test::random_pair(11, Shape{6, 6});
    const auto terms = ssl_terms(y, p, cfg);
    std::vector<double> moved(p.values().begin(), p.values().end());
    for (std::size_t i = 0; i < moved.size(); ++i) {
        if (terms.weight[i] == 0.0) {
            moved[i] = 0.5 * (moved[i] + 0.5);
        }
    }
    CHECK(ssl_loss(y, prob(6, 6, moved), terms, cfg) == ssl_loss(y, p, terms, cfg));
}

TEST_CASE("ssl_loss_batch")
{
    LossConfig cfg;
    const auto a = test::random_pair(1, Shape{5, 5});
    const auto b = test::random_pair(2, Shape{5, 5});
    const std::vector<Mask> ys{a.y};
    const std::vector<ProbabilityMap> ps{a.p};
    CHECK(ssl_loss_batch(ys, ps, cfg, ErrorMaxScope::per_image) == ssl_loss(a.y, a.p, cfg));
    const std::vector<Mask> ys2{a.y, b.y};
    const std::vector<ProbabilityMap> ps2{a.p, b.p};
    CHECK(std::isfinite(ssl_loss_batch(ys2, ps2, cfg, ErrorMaxScope::per_batch)));
    CHECK_THROWS_AS(ssl_loss_batch(ys2, ps, cfg, ErrorMaxScope::per_image), ShapeError);
}
