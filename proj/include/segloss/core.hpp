#ifndef SEGLOSS_CORE_HPP
#define SEGLOSS_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace segloss {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two grids that must share a shape do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A configuration value is outside its documented range.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Input data violates a value-level precondition (empty set, bad range).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Warnings are non-fatal; the default handler writes to stderr.
using WarningHandler = std::function<void(const std::string&)>;
WarningHandler set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct Shape {
    std::size_t height = 0;
    std::size_t width = 0;

    /// Desk-scale guard on H*W.
    static constexpr std::size_t kMaxPixels = std::size_t{1} << 26;

    constexpr std::size_t size() const noexcept { return height * width; }
    friend constexpr bool operator==(const Shape&, const Shape&) = default;
};

/// Throws ShapeError unless height, width >= 1 and H*W <= 2^26.
void validate_shape(Shape shape);
std::string to_string(Shape shape);
void require_same_shape(Shape a, Shape b, const char* what);

/// Row-major H x W grid.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(Shape shape, T fill = T{}) : shape_(shape), values_(shape.size(), fill)
    {
        validate_shape(shape);
    }
    Grid(Shape shape, std::vector<T> values) : shape_(shape), values_(std::move(values))
    {
        validate_shape(shape);
        if (values_.size() != shape.size()) {
            throw ShapeError("grid of shape " + to_string(shape) + " given " +
                             std::to_string(values_.size()) + " values");
        }
    }

    Shape shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    T& operator[](std::size_t i) { return values_[i]; }
    const T& operator[](std::size_t i) const { return values_[i]; }
    T& at(std::size_t row, std::size_t col) { return values_[row * shape_.width + col]; }
    const T& at(std::size_t row, std::size_t col) const { return values_[row * shape_.width + col]; }

    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }
    const std::vector<T>& vector() const noexcept { return values_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Shape shape_{};
    std::vector<T> values_;
};

using RealGrid = Grid<double>;
using LogitMap = RealGrid;
using GradientMap = RealGrid;
/// Euclidean distance (in pixels) to the nearest pixel of a source set.
using DistanceMap = RealGrid;

/// Binary ground-truth mask. Every value is exactly 0 or 1.
class Mask {
public:
    Mask() = default;
    explicit Mask(Shape shape) : grid_(shape, std::uint8_t{0}) {}
    Mask(Shape shape, std::vector<std::uint8_t> values);

    Shape shape() const noexcept { return grid_.shape(); }
    std::size_t size() const noexcept { return grid_.size(); }
    std::uint8_t operator[](std::size_t i) const { return grid_[i]; }
    std::uint8_t at(std::size_t row, std::size_t col) const { return grid_.at(row, col); }
    void set(std::size_t row, std::size_t col, bool on) { grid_.at(row, col) = on ? 1 : 0; }
    std::span<const std::uint8_t> values() const noexcept { return grid_.values(); }

    std::size_t count() const noexcept;
    /// The mask as a real grid of 0.0 / 1.0.
    RealGrid as_real() const;

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    Grid<std::uint8_t> grid_;
};

/// Per-pixel probabilities, each in [0, 1].
class ProbabilityMap {
public:
    ProbabilityMap() = default;
    explicit ProbabilityMap(RealGrid grid);
    ProbabilityMap(Shape shape, std::vector<double> values)
        : ProbabilityMap(RealGrid(shape, std::move(values))) {}

    static ProbabilityMap from_mask(const Mask& mask);

    Shape shape() const noexcept { return grid_.shape(); }
    std::size_t size() const noexcept { return grid_.size(); }
    double operator[](std::size_t i) const { return grid_[i]; }
    double at(std::size_t row, std::size_t col) const { return grid_.at(row, col); }
    std::span<const double> values() const noexcept { return grid_.values(); }
    const RealGrid& grid() const noexcept { return grid_; }

    friend bool operator==(const ProbabilityMap&, const ProbabilityMap&) = default;

private:
    RealGrid grid_;
};

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Every tunable coefficient used by the loss family. Each loss validates
/// only the fields it reads.
struct LossConfig {
    double epsilon = 1e-7;     ///< probability clamp, (0, 0.5)
    double smooth = 1.0;       ///< Dice/Tversky additive constant
    double beta = 0.5;         ///< WBCE positive weight, Tversky FP weight, Combo class weight
    double alpha = 0.5;        ///< focal scale, Combo mixing weight
    bool alpha_balanced = false;  ///< focal: alpha on foreground, 1 - alpha on background
    double gamma = 2.0;        ///< focusing exponent (focal, focal Tversky, exp-log)
    double w = 0.5;            ///< sensitivity weight in the sens/spec loss
    double w_dice = 1.0;
    double w_cross = 1.0;
    double w_label = 1.0;
    double c4 = 0.01;          ///< SSL stability factor
    int window = 3;            ///< SSL local window side (odd)
    double ssl_beta = 0.1;     ///< SSL abandonment threshold relative to e_max
    double hd_alpha = 2.0;     ///< Hausdorff distance-map exponent
    double threshold = 0.5;    ///< binarization threshold for boundary-based coefficients
    bool shape_per_pixel = false;  ///< shape-aware: per-pixel d_y instead of the scalar curve distance

    /// Checks the fields every loss shares (epsilon, smooth).
    void validate_common() const;
    /// Checks every field against its general range. Individual losses may
    /// narrow a range further (Tversky needs beta <= 1).
    void validate() const;
};

/// Sets one field from "key=value" text. Throws ConfigError for unknown keys
/// or unparsable values; does not range-check.
void apply_config_override(LossConfig& cfg, std::string_view assignment);

// ---------------------------------------------------------------------------
// Numeric helpers
// ---------------------------------------------------------------------------

/// Clamps every value into [epsilon, 1 - epsilon]. Requires 0 < epsilon < 0.5.
ProbabilityMap clamp_prob(const ProbabilityMap& p, double epsilon);
double clamp_prob(double p, double epsilon);

/// d clamp(p) / dp: 1 strictly inside (epsilon, 1 - epsilon), else 0.
inline double clamp_slope(double p, double epsilon) noexcept
{
    return (p > epsilon && p < 1.0 - epsilon) ? 1.0 : 0.0;
}

double sigmoid(double z) noexcept;
ProbabilityMap sigmoid(const LogitMap& z);

/// Soft (probabilistic) confusion counts.
struct SoftConfusion {
    double tp = 0.0;
    double fp = 0.0;
    double tn = 0.0;
    double fn = 0.0;
};

SoftConfusion soft_confusion(const Mask& y, const ProbabilityMap& p);

/// Row-major sequential sum; bitwise reproducible. Throws DomainError on empty input.
double reduce_sum(std::span<const double> values);
double reduce_mean(std::span<const double> values);
inline double reduce_sum(const RealGrid& g) { return reduce_sum(g.values()); }
inline double reduce_mean(const RealGrid& g) { return reduce_mean(g.values()); }

/// Reads SEGLOSS_THREADS; falls back to hardware concurrency (at least 1).
unsigned thread_budget();

}  // namespace segloss

#endif  // SEGLOSS_CORE_HPP
