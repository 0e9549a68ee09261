#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "segloss/geometry.hpp"
#include "test_support.hpp"

using namespace segloss;
using segloss::test::mask;

namespace {

double brute_distance(const Pixel& a, const Pixel& b)
{
    const double dr = static_cast<double>(a.row) - static_cast<double>(b.row);
    const double dc = static_cast<double>(a.col) - static_cast<double>(b.col);
    return std::sqrt(dr * dr + dc * dc);
}

double brute_nearest(const Pixel& x, const PixelSet& set)
{
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : set) {
        best = std::min(best, brute_distance(x, s));
    }
    return best;
}

PixelSet random_points(Rng& rng, std::size_t max_points, std::size_t extent)
{
    PixelSet out;
    const std::size_t n = 1 + rng.below(max_points);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({rng.below(extent), rng.below(extent)});
    }
    return out;
}

Mask random_mask(Rng& rng, Shape shape)
{
    Mask m(shape);
    for (std::size_t r = 0; r < shape.height; ++r) {
        for (std::size_t c = 0; c < shape.width; ++c) {
            m.set(r, c, rng.uniform() < 0.3);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("extract_boundary")
{
    CHECK(extract_boundary(mask(3, 3, {1, 1, 1, 1, 1, 1, 1, 1, 1})).size() == 8);
    const auto single = extract_boundary(mask(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0}));
    REQUIRE(single.size() == 1);
    CHECK(single[0] == Pixel{1, 1});
    const auto block = extract_boundary(mask(4, 4, {0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0}));
    CHECK(block.size() == 4);
    CHECK(extract_boundary(Mask(Shape{3, 3})).empty());

    // Brute-force neighbour oracle.
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const Mask m = random_mask(rng, Shape{9, 11});
        PixelSet oracle;
        for (std::size_t r = 0; r < 9; ++r) {
            for (std::size_t c = 0; c < 11; ++c) {
                if (!m.at(r, c)) {
                    continue;
                }
                const bool edge = r == 0 || c == 0 || r == 8 || c == 10;
                if (edge || !m.at(r - 1, c) || !m.at(r + 1, c) || !m.at(r, c - 1) || !m.at(r, c + 1)) {
                    oracle.push_back({r, c});
                }
            }
        }
        CHECK(extract_boundary(m) == oracle);
    }
}

TEST_CASE("distance_transform small cases")
{
    const auto d = distance_transform(Shape{3, 3}, PixelSet{{1, 1}});
    CHECK(d.at(0, 0) == std::sqrt(2.0));
    CHECK(d.at(0, 1) == 1.0);
    CHECK(d.at(1, 1) == 0.0);

    PixelSet all;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
            all.push_back({r, c});
        }
    }
    const auto z = distance_transform(Shape{4, 5}, all);
    CHECK(std::all_of(z.values().begin(), z.values().end(), [](double v) { return v == 0.0; }));

    CHECK_THROWS_AS(distance_transform(Shape{3, 3}, PixelSet{}), DomainError);
    CHECK_THROWS_AS(distance_transform(Shape{3, 3}, PixelSet{{3, 0}}), DomainError);
}

TEST_CASE("distance_transform equals brute force on random boundaries")
{
    Rng rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Mask m = random_mask(rng, Shape{16, 16});
        const PixelSet sources = extract_boundary(m);
        if (sources.empty()) {
            continue;
        }
        const auto d = distance_transform(m.shape(), sources);
        bool exact = true;
        for (std::size_t r = 0; r < 16; ++r) {
            for (std::size_t c = 0; c < 16; ++c) {
                exact = exact && d.at(r, c) == brute_nearest({r, c}, sources);
            }
        }
        CHECK(exact);
        // 1-Lipschitz across adjacent pixels.
        for (std::size_t r = 0; r < 16; ++r) {
            for (std::size_t c = 0; c + 1 < 16; ++c) {
                CHECK(std::fabs(d.at(r, c) - d.at(r, c + 1)) <= 1.0 + 1e-12);
                CHECK(std::fabs(d.at(c, r) - d.at(c + 1, r)) <= 1.0 + 1e-12);
            }
        }
        ++checked;
    }
    CHECK(checked >= 190);
}

TEST_CASE("distance_transform on non-square grids")
{
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const Shape s{1 + rng.below(20), 1 + rng.below(20)};
        PixelSet src{{rng.below(s.height), rng.below(s.width)}, {rng.below(s.height), rng.below(s.width)}};
        const auto d = distance_transform(s, src);
        for (std::size_t r = 0; r < s.height; ++r) {
            for (std::size_t c = 0; c < s.width; ++c) {
                CHECK(d.at(r, c) == brute_nearest({r, c}, src));
            }
        }
    }
}

TEST_CASE("boundary_distance_map")
{
    const Mask m = mask(3, 3, {0, 0, 0, 0, 1, 0, 0, 0, 0});
    const auto raw = boundary_distance_map(m);
    CHECK(raw.at(0, 0) == std::sqrt(2.0));
    const auto norm = boundary_distance_map(m, true);
    CHECK(norm.at(0, 0) == 1.0);
    CHECK(norm.at(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    const auto none = boundary_distance_map(Mask(Shape{2, 2}));
    CHECK(none == DistanceMap(Shape{2, 2}, 0.0));
}

TEST_CASE("hausdorff_distance")
{
    CHECK(hausdorff_distance({{0, 0}}, {{3, 4}}) == 5.0);
    const PixelSet a{{0, 0}, {2, 5}, {7, 1}};
    CHECK(hausdorff_distance(a, a) == 0.0);
    CHECK_THROWS_AS(hausdorff_distance(a, {}), DomainError);

    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const PixelSet x = random_points(rng, 20, 30);
        const PixelSet y = random_points(rng, 20, 30);
        const PixelSet z = random_points(rng, 20, 30);
        double xy = 0.0;
        for (const auto& p : x) {
            xy = std::max(xy, brute_nearest(p, y));
        }
        double yx = 0.0;
        for (const auto& p : y) {
            yx = std::max(yx, brute_nearest(p, x));
        }
        CHECK(directed_hausdorff_distance(x, y) == xy);
        CHECK(hausdorff_distance(x, y) == std::max(xy, yx));
        CHECK(hausdorff_distance(x, y) == hausdorff_distance(y, x));
        CHECK(hausdorff_distance(x, z) <= hausdorff_distance(x, y) + hausdorff_distance(y, z) + 1e-12);
    }
}

TEST_CASE("mean_point_to_set_distance")
{
    CHECK(mean_point_to_set_distance({{0, 0}, {0, 2}}, {{0, 0}}) == 1.0);
    const PixelSet a{{1, 1}, {4, 2}};
    CHECK(mean_point_to_set_distance(a, a) == 0.0);
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const PixelSet x = random_points(rng, 20, 25);
        const PixelSet y = random_points(rng, 20, 25);
        double total = 0.0;
        for (const auto& p : x) {
            total += brute_nearest(p, y);
        }
        CHECK(mean_point_to_set_distance(x, y) == doctest::Approx(total / x.size()).epsilon(1e-15));
    }
}

TEST_CASE("local_stats")
{
    std::vector<double> v(9);
    for (int i = 0; i < 9; ++i) {
        v[i] = i;
    }
    const RealGrid g(Shape{3, 3}, v);
    const auto s = local_stats(g, 3);
    CHECK(s.mean.at(1, 1) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(s.std.at(1, 1) == doctest::Approx(std::sqrt(60.0 / 9.0)).epsilon(1e-14));

    const RealGrid c(Shape{4, 5}, 0.7);
    const auto sc = local_stats(c, 3);
    CHECK(sc.mean == c);
    CHECK(sc.std == RealGrid(Shape{4, 5}, 0.0));

    const auto s1 = local_stats(g, 1);
    CHECK(s1.mean == g);
    CHECK(s1.std == RealGrid(Shape{3, 3}, 0.0));

    CHECK_THROWS_AS(local_stats(g, 2), ConfigError);
    CHECK_THROWS_AS(local_stats(g, 5), ConfigError);
    CHECK_THROWS_AS(local_stats(g, 0), ConfigError);
}
