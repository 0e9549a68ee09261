#ifndef SEGLOSS_GEOMETRY_HPP
#define SEGLOSS_GEOMETRY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "segloss/core.hpp"

namespace segloss {

struct Pixel {
    std::size_t row = 0;
    std::size_t col = 0;
    friend constexpr auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Unique, in-bounds pixel coordinates in row-major order of discovery.
using PixelSet = std::vector<Pixel>;

/// Foreground pixels with at least one background 4-neighbour. Pixels on the
/// image border count as touching background.
PixelSet extract_boundary(const Mask& mask);

/// Foreground pixels of a mask, row-major.
PixelSet foreground_pixels(const Mask& mask);

/// Exact Euclidean distance to the nearest source pixel. Separable lower
/// envelope of parabolas over squared distances, square root at the end.
/// Throws DomainError for an empty source set.
DistanceMap distance_transform(Shape shape, const PixelSet& sources);

/// Distance map to the mask's boundary, all zeros when the boundary is empty.
/// With normalize set, the map is divided by its maximum (when positive).
DistanceMap boundary_distance_map(const Mask& mask, bool normalize = false);

/// Squared 1-D distance transform of a sampled function; infinite samples
/// are not sources. Exposed for testing.
void squared_distance_1d(std::span<const double> f, std::span<double> out);

/// max over a of the distance to the nearest point of b.
double directed_hausdorff_distance(const PixelSet& a, const PixelSet& b);
/// Symmetric Hausdorff distance; both sets must be nonempty.
double hausdorff_distance(const PixelSet& a, const PixelSet& b);
/// Mean over a of the distance to the nearest point of b.
double mean_point_to_set_distance(const PixelSet& a, const PixelSet& b);

struct LocalStats {
    RealGrid mean;
    RealGrid std;  ///< population standard deviation
};

/// Window statistics centred at each pixel, mirror-reflected at the border
/// (index -1 maps to 1). window must be odd and at most min(H, W).
LocalStats local_stats(const RealGrid& grid, int window);

}  // namespace segloss

#endif  // SEGLOSS_GEOMETRY_HPP
