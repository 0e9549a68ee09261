#include "segloss/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace segloss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t squared_distance(const Pixel& a, const Pixel& b)
{
    const auto dr = static_cast<std::int64_t>(a.row) - static_cast<std::int64_t>(b.row);
    const auto dc = static_cast<std::int64_t>(a.col) - static_cast<std::int64_t>(b.col);
    return dr * dr + dc * dc;
}

// Smallest squared distance from x to any point of b.
std::int64_t nearest_squared(const Pixel& x, const PixelSet& b)
{
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const auto& y : b) {
        best = std::min(best, squared_distance(x, y));
    }
    return best;
}

void require_nonempty(const PixelSet& a, const PixelSet& b, const char* what)
{
    if (a.empty() || b.empty()) {
        throw DomainError(std::string(what) + " requires two nonempty pixel sets");
    }
}

}  // namespace

PixelSet extract_boundary(const Mask& mask)
{
    const Shape s = mask.shape();
    PixelSet out;
    for (std::size_t r = 0; r < s.height; ++r) {
        for (std::size_t c = 0; c < s.width; ++c) {
            if (!mask.at(r, c)) {
                continue;
            }
            const bool edge = r == 0 || c == 0 || r + 1 == s.height || c + 1 == s.width;
            if (edge || !mask.at(r - 1, c) || !mask.at(r + 1, c) || !mask.at(r, c - 1) ||
                !mask.at(r, c + 1)) {
                out.push_back({r, c});
            }
        }
    }
    return out;
}

PixelSet foreground_pixels(const Mask& mask)
{
    const Shape s = mask.shape();
    PixelSet out;
    for (std::size_t r = 0; r < s.height; ++r) {
        for (std::size_t c = 0; c < s.width; ++c) {
            if (mask.at(r, c)) {
                out.push_back({r, c});
            }
        }
    }
    return out;
}

void squared_distance_1d(std::span<const double> f, std::span<double> out)
{
    const std::size_t n = f.size();
    // Lower envelope of the parabolas (x - q)^2 + f(q) over finite samples q.
    std::vector<std::size_t> vertex(n);
    std::vector<double> boundary(n + 1);
    std::size_t k = 0;
    bool any = false;
    for (std::size_t q = 0; q < n; ++q) {
        if (!std::isfinite(f[q])) {
            continue;
        }
        const double fq = f[q] + static_cast<double>(q) * static_cast<double>(q);
        if (!any) {
            any = true;
            vertex[0] = q;
            boundary[0] = -kInf;
            boundary[1] = kInf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const std::size_t v = vertex[k];
            const double fv = f[v] + static_cast<double>(v) * static_cast<double>(v);
            s = (fq - fv) / (2.0 * static_cast<double>(q) - 2.0 * static_cast<double>(v));
            if (s <= boundary[k] && k > 0) {
                --k;
                continue;
            }
            break;
        }
        ++k;
        vertex[k] = q;
        boundary[k] = s;
        boundary[k + 1] = kInf;
    }
    if (!any) {
        std::fill(out.begin(), out.end(), kInf);
        return;
    }
    k = 0;
    for (std::size_t x = 0; x < n; ++x) {
        const double xd = static_cast<double>(x);
        while (boundary[k + 1] < xd) {
            ++k;
        }
        const double d = xd - static_cast<double>(vertex[k]);
        out[x] = d * d + f[vertex[k]];
    }
}

DistanceMap distance_transform(Shape shape, const PixelSet& sources)
{
    validate_shape(shape);
    if (sources.empty()) {
        throw DomainError("distance_transform requires a nonempty source set");
    }
    RealGrid sq(shape, kInf);
    for (const auto& px : sources) {
        if (px.row >= shape.height || px.col >= shape.width) {
            throw DomainError("source pixel lies outside the grid");
        }
        sq.at(px.row, px.col) = 0.0;
    }

    const std::size_t h = shape.height;
    const std::size_t w = shape.width;
    std::vector<double> line(std::max(h, w));
    std::vector<double> result(std::max(h, w));

    for (std::size_t c = 0; c < w; ++c) {
        for (std::size_t r = 0; r < h; ++r) {
            line[r] = sq.at(r, c);
        }
        squared_distance_1d(std::span(line).first(h), std::span(result).first(h));
        for (std::size_t r = 0; r < h; ++r) {
            sq.at(r, c) = result[r];
        }
    }
    for (std::size_t r = 0; r < h; ++r) {
        const auto row = sq.values().subspan(r * w, w);
        squared_distance_1d(row, std::span(result).first(w));
        for (std::size_t c = 0; c < w; ++c) {
            row[c] = result[c];
        }
    }
    for (auto& v : sq.values()) {
        v = std::sqrt(v);
    }
    return sq;
}

DistanceMap boundary_distance_map(const Mask& mask, bool normalize)
{
    const PixelSet boundary = extract_boundary(mask);
    if (boundary.empty()) {
        return DistanceMap(mask.shape(), 0.0);
    }
    DistanceMap d = distance_transform(mask.shape(), boundary);
    if (normalize) {
        const double top = *std::max_element(d.values().begin(), d.values().end());
        if (top > 0.0) {
            for (auto& v : d.values()) {
                v /= top;
            }
        }
    }
    return d;
}

double directed_hausdorff_distance(const PixelSet& a, const PixelSet& b)
{
    require_nonempty(a, b, "hausdorff_distance");
    std::int64_t worst = 0;
    for (const auto& x : a) {
        worst = std::max(worst, nearest_squared(x, b));
    }
    return std::sqrt(static_cast<double>(worst));
}

double hausdorff_distance(const PixelSet& a, const PixelSet& b)
{
    return std::max(directed_hausdorff_distance(a, b), directed_hausdorff_distance(b, a));
}

double mean_point_to_set_distance(const PixelSet& a, const PixelSet& b)
{
    require_nonempty(a, b, "mean_point_to_set_distance");
    double total = 0.0;
    for (const auto& x : a) {
        total += std::sqrt(static_cast<double>(nearest_squared(x, b)));
    }
    return total / static_cast<double>(a.size());
}

LocalStats local_stats(const RealGrid& grid, int window)
{
    const Shape s = grid.shape();
    if (window < 1 || window % 2 == 0) {
        throw ConfigError("local window must be a positive odd integer");
    }
    if (static_cast<std::size_t>(window) > std::min(s.height, s.width)) {
        throw ConfigError("local window " + std::to_string(window) + " exceeds grid " +
                          to_string(s));
    }
    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    const auto reflect = [](std::ptrdiff_t i, std::ptrdiff_t n) {
        if (i < 0) {
            return -i;
        }
        if (i >= n) {
            return 2 * (n - 1) - i;
        }
        return i;
    };

    LocalStats out{RealGrid(s, 0.0), RealGrid(s, 0.0)};
    const auto h = static_cast<std::ptrdiff_t>(s.height);
    const auto w = static_cast<std::ptrdiff_t>(s.width);
    const double count = static_cast<double>(window) * static_cast<double>(window);
    std::vector<double> samples(static_cast<std::size_t>(window) * static_cast<std::size_t>(window));

    for (std::ptrdiff_t r = 0; r < h; ++r) {
        for (std::ptrdiff_t c = 0; c < w; ++c) {
            std::size_t n = 0;
            for (std::ptrdiff_t dr = -half; dr <= half; ++dr) {
                const auto rr = static_cast<std::size_t>(reflect(r + dr, h));
                for (std::ptrdiff_t dc = -half; dc <= half; ++dc) {
                    const auto cc = static_cast<std::size_t>(reflect(c + dc, w));
                    samples[n++] = grid.at(rr, cc);
                }
            }
            const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
            const auto idx = static_cast<std::size_t>(r * w + c);
            if (*lo == *hi) {
                out.mean[idx] = *lo;
                out.std[idx] = 0.0;
                continue;
            }
            double sum = 0.0;
            for (double v : samples) {
                sum += v;
            }
            const double mean = sum / count;
            double sq = 0.0;
            for (double v : samples) {
                sq += (v - mean) * (v - mean);
            }
            out.mean[idx] = mean;
            out.std[idx] = std::sqrt(sq / count);
        }
    }
    return out;
}

}  // namespace segloss
