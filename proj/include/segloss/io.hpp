#ifndef SEGLOSS_IO_HPP
#define SEGLOSS_IO_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "segloss/core.hpp"

// Text formats: ASCII PGM ("P2", maxval 255) for masks and comma-separated
// rows for real grids.

namespace segloss {

/// Malformed input; line and column are 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Pixels above 127 are foreground. '#' starts a comment running to end of line.
Mask parse_mask(std::string_view text);
std::string serialize_mask(const Mask& mask);

enum class GridKind {
    real,         ///< any finite value
    probability,  ///< values in [0, 1]
    distance,     ///< values >= 0
};

RealGrid parse_grid(std::string_view text, GridKind kind = GridKind::real);
ProbabilityMap parse_probability_map(std::string_view text);
/// Shortest decimal form that reads back to the same double.
std::string serialize_grid(const RealGrid& grid);

/// Locale-independent shortest round-trip formatting.
std::string format_shortest(double v);
/// Fixed-point with the given number of decimals, locale-independent.
std::string format_fixed(double v, int decimals);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace segloss

#endif  // SEGLOSS_IO_HPP
