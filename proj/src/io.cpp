#include "segloss/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace segloss {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(line == 0 ? message
                      : "line " + std::to_string(line) +
                            (column == 0 ? std::string() : ", column " + std::to_string(column)) +
                            ": " + message),
      line_(line),
      column_(column)
{
}

namespace {

struct Token {
    std::string_view text;
    std::size_t line = 0;
    std::size_t column = 0;
};

// Whitespace-separated tokens with '#' comments removed.
std::vector<Token> pgm_tokens(std::string_view text)
{
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t column = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char ch = text[i];
        if (ch == '\n') {
            ++line;
            column = 1;
            ++i;
        } else if (ch == '#') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
            }
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v') {
            ++i;
            ++column;
        } else {
            const std::size_t start = i;
            const std::size_t start_col = column;
            while (i < text.size() && text[i] != '#' &&
                   std::string_view(" \t\r\n\f\v").find(text[i]) == std::string_view::npos) {
                ++i;
                ++column;
            }
            out.push_back({text.substr(start, i - start), line, start_col});
        }
    }
    return out;
}

std::size_t parse_unsigned(const Token& tok, const char* what)
{
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc{} || ptr != tok.text.data() + tok.text.size()) {
        throw ParseError(std::string("expected ") + what + ", found '" + std::string(tok.text) + "'",
                         tok.line, tok.column);
    }
    return value;
}

}  // namespace

Mask parse_mask(std::string_view text)
{
    const std::vector<Token> tokens = pgm_tokens(text);
    if (tokens.empty() || tokens[0].text != "P2") {
        if (!tokens.empty()) {
            throw ParseError("bad magic '" + std::string(tokens[0].text) + "', expected P2",
                             tokens[0].line, tokens[0].column);
        }
        throw ParseError("empty input, expected P2 header", 1, 1);
    }
    if (tokens.size() < 4) {
        throw ParseError("truncated PGM header", tokens.back().line, tokens.back().column);
    }
    const std::size_t width = parse_unsigned(tokens[1], "width");
    const std::size_t height = parse_unsigned(tokens[2], "height");
    const std::size_t maxval = parse_unsigned(tokens[3], "maxval");
    if (maxval != 255) {
        throw ParseError("maxval must be 255, got " + std::to_string(maxval), tokens[3].line,
                         tokens[3].column);
    }
    const Shape shape{height, width};
    try {
        validate_shape(shape);
    } catch (const ShapeError& e) {
        throw ParseError(e.what(), tokens[1].line, tokens[1].column);
    }
    const std::size_t pixels = shape.size();
    if (tokens.size() - 4 != pixels) {
        const Token& where = tokens.back();
        throw ParseError("dimension mismatch: header declares " + std::to_string(pixels) +
                             " pixels, found " + std::to_string(tokens.size() - 4),
                         where.line, where.column);
    }
    std::vector<std::uint8_t> bits(pixels);
    for (std::size_t i = 0; i < pixels; ++i) {
        const Token& tok = tokens[4 + i];
        const std::size_t v = parse_unsigned(tok, "pixel value");
        if (v > maxval) {
            throw ParseError("pixel value " + std::to_string(v) + " exceeds maxval", tok.line,
                             tok.column);
        }
        bits[i] = v > 127 ? 1 : 0;
    }
    return Mask(shape, std::move(bits));
}

std::string serialize_mask(const Mask& mask)
{
    const Shape s = mask.shape();
    std::string out = "P2\n" + std::to_string(s.width) + " " + std::to_string(s.height) + "\n255\n";
    for (std::size_t r = 0; r < s.height; ++r) {
        for (std::size_t c = 0; c < s.width; ++c) {
            if (c > 0) {
                out += ' ';
            }
            out += mask.at(r, c) ? "255" : "0";
        }
        out += '\n';
    }
    return out;
}

RealGrid parse_grid(std::string_view text, GridKind kind)
{
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            if (text.find_first_not_of("\r\n") == std::string_view::npos) {
                break;
            }
            throw ParseError("empty row", line_no, 0);
        }
        std::size_t cells = 0;
        std::size_t column = 1;
        while (true) {
            const auto comma = line.find(',');
            std::string_view cell = line.substr(0, comma);
            const std::size_t cell_column = column;
            const auto first = cell.find_first_not_of(" \t");
            const auto last = cell.find_last_not_of(" \t");
            cell = first == std::string_view::npos ? std::string_view{}
                                                   : cell.substr(first, last - first + 1);
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() ||
                !std::isfinite(v)) {
                throw ParseError("non-numeric value '" + std::string(cell) + "'", line_no, cell_column);
            }
            if (kind == GridKind::probability && !(v >= 0.0 && v <= 1.0)) {
                throw ParseError("probability " + std::string(cell) + " outside [0, 1]", line_no,
                                 cell_column);
            }
            if (kind == GridKind::distance && v < 0.0) {
                throw ParseError("negative distance " + std::string(cell), line_no, cell_column);
            }
            values.push_back(v);
            ++cells;
            if (comma == std::string_view::npos) {
                break;
            }
            column += comma + 1;
            line = line.substr(comma + 1);
        }
        if (height == 0) {
            width = cells;
        } else if (cells != width) {
            throw ParseError("row " + std::to_string(line_no) + " has " + std::to_string(cells) +
                                 " values, expected " + std::to_string(width),
                             line_no, 0);
        }
        ++height;
    }
    if (height == 0) {
        throw ParseError("empty grid", 1, 0);
    }
    return RealGrid(Shape{height, width}, std::move(values));
}

ProbabilityMap parse_probability_map(std::string_view text)
{
    return ProbabilityMap(parse_grid(text, GridKind::probability));
}

std::string format_shortest(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals)
{
    char buf[512];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    if (ec != std::errc{}) {
        return format_shortest(v);
    }
    return std::string(buf, ptr);
}

std::string serialize_grid(const RealGrid& grid)
{
    const Shape s = grid.shape();
    std::string out;
    for (std::size_t r = 0; r < s.height; ++r) {
        for (std::size_t c = 0; c < s.width; ++c) {
            if (c > 0) {
                out += ',';
            }
            out += format_shortest(grid.at(r, c));
        }
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot rename into " + path.string());
    }
}

}  // namespace segloss
