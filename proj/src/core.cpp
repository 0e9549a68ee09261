#include "segloss/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <thread>

namespace segloss {

namespace {

std::mutex& warning_mutex()
{
    static std::mutex m;
    return m;
}

WarningHandler& warning_handler()
{
    static WarningHandler handler = [](const std::string& message) {
        std::cerr << "segloss: warning: " << message << '\n';
    };
    return handler;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler)
{
    std::lock_guard lock(warning_mutex());
    auto previous = std::move(warning_handler());
    warning_handler() = std::move(handler);
    return previous;
}

void warn(const std::string& message)
{
    std::lock_guard lock(warning_mutex());
    if (warning_handler()) {
        warning_handler()(message);
    }
}

void validate_shape(Shape shape)
{
    if (shape.height < 1 || shape.width < 1) {
        throw ShapeError("grid dimensions must be positive, got " + to_string(shape));
    }
    if (shape.height > Shape::kMaxPixels / shape.width) {
        throw ShapeError("grid " + to_string(shape) + " exceeds the 2^26 pixel limit");
    }
}

std::string to_string(Shape shape)
{
    return std::to_string(shape.height) + "x" + std::to_string(shape.width);
}

void require_same_shape(Shape a, Shape b, const char* what)
{
    if (a != b) {
        throw ShapeError(std::string(what) + ": shape mismatch " + to_string(a) + " vs " +
                         to_string(b));
    }
}

Mask::Mask(Shape shape, std::vector<std::uint8_t> values) : grid_(shape, std::move(values))
{
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (grid_[i] > 1) {
            throw DomainError("mask value at index " + std::to_string(i) + " is not 0 or 1");
        }
    }
}

std::size_t Mask::count() const noexcept
{
    std::size_t n = 0;
    for (auto v : grid_.values()) {
        n += v;
    }
    return n;
}

RealGrid Mask::as_real() const
{
    RealGrid out(shape(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = grid_[i] ? 1.0 : 0.0;
    }
    return out;
}

ProbabilityMap::ProbabilityMap(RealGrid grid) : grid_(std::move(grid))
{
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        const double v = grid_[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("probability at index " + std::to_string(i) +
                              " is outside [0, 1]");
        }
    }
}

ProbabilityMap ProbabilityMap::from_mask(const Mask& mask)
{
    return ProbabilityMap(mask.as_real());
}

void LossConfig::validate_common() const
{
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("epsilon must lie in (0, 0.5)");
    }
    if (!(smooth >= 0.0) || !std::isfinite(smooth)) {
        throw ConfigError("smooth must be a finite value >= 0");
    }
}

void LossConfig::validate() const
{
    validate_common();
    const auto require = [](bool ok, const char* message) {
        if (!ok) {
            throw ConfigError(message);
        }
    };
    const auto finite_at_least = [](double v, double lo) { return std::isfinite(v) && v >= lo; };
    require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require(finite_at_least(gamma, 0.0), "gamma must be >= 0");
    require(w >= 0.0 && w <= 1.0, "w must lie in [0, 1]");
    require(finite_at_least(w_dice, 0.0), "w_dice must be >= 0");
    require(finite_at_least(w_cross, 0.0), "w_cross must be >= 0");
    require(finite_at_least(w_label, 0.0), "w_label must be >= 0");
    require(std::isfinite(c4) && c4 > 0.0, "c4 must be > 0");
    require(window >= 1 && window % 2 == 1, "window must be a positive odd integer");
    require(ssl_beta >= 0.0 && ssl_beta <= 1.0, "ssl_beta must lie in [0, 1]");
    require(finite_at_least(hd_alpha, 1.0), "hd_alpha must be >= 1");
    require(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
}

namespace {

double parse_real(std::string_view key, std::string_view text)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("config " + std::string(key) + ": cannot parse '" + std::string(text) +
                          "' as a number");
    }
    return v;
}

bool parse_flag(std::string_view key, std::string_view text)
{
    if (text == "1" || text == "true") {
        return true;
    }
    if (text == "0" || text == "false") {
        return false;
    }
    throw ConfigError("config " + std::string(key) + ": expected true/false, got '" +
                      std::string(text) + "'");
}

}  // namespace

void apply_config_override(LossConfig& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("config override '" + std::string(assignment) + "' is not key=value");
    }
    const std::string_view key = assignment.substr(0, eq);
    const std::string_view value = assignment.substr(eq + 1);
    struct RealField {
        std::string_view name;
        double LossConfig::*member;
    };
    static constexpr RealField reals[] = {
        {"epsilon", &LossConfig::epsilon}, {"smooth", &LossConfig::smooth},
        {"beta", &LossConfig::beta},       {"alpha", &LossConfig::alpha},
        {"gamma", &LossConfig::gamma},     {"w", &LossConfig::w},
        {"w_dice", &LossConfig::w_dice},   {"w_cross", &LossConfig::w_cross},
        {"w_label", &LossConfig::w_label}, {"c4", &LossConfig::c4},
        {"ssl_beta", &LossConfig::ssl_beta}, {"hd_alpha", &LossConfig::hd_alpha},
        {"threshold", &LossConfig::threshold},
    };
    for (const auto& field : reals) {
        if (field.name == key) {
            cfg.*field.member = parse_real(key, value);
            return;
        }
    }
    if (key == "window") {
        const double v = parse_real(key, value);
        if (v != std::floor(v) || std::fabs(v) > 1e6) {
            throw ConfigError("config window: expected an integer");
        }
        cfg.window = static_cast<int>(v);
    } else if (key == "alpha_balanced") {
        cfg.alpha_balanced = parse_flag(key, value);
    } else if (key == "shape_per_pixel") {
        cfg.shape_per_pixel = parse_flag(key, value);
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

double clamp_prob(double p, double epsilon)
{
    return std::clamp(p, epsilon, 1.0 - epsilon);
}

ProbabilityMap clamp_prob(const ProbabilityMap& p, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw ConfigError("epsilon must lie in (0, 0.5)");
    }
    RealGrid out = p.grid();
    for (auto& v : out.values()) {
        v = clamp_prob(v, epsilon);
    }
    return ProbabilityMap(std::move(out));
}

double sigmoid(double z) noexcept
{
    // Evaluate through exp of a non-positive argument so neither tail overflows.
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

ProbabilityMap sigmoid(const LogitMap& z)
{
    RealGrid out(z.shape(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!std::isfinite(z[i])) {
            throw DomainError("logit at index " + std::to_string(i) + " is not finite");
        }
        out[i] = sigmoid(z[i]);
    }
    return ProbabilityMap(std::move(out));
}

SoftConfusion soft_confusion(const Mask& y, const ProbabilityMap& p)
{
    require_same_shape(y.shape(), p.shape(), "soft_confusion");
    SoftConfusion c;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pi = p[i];
        if (y[i]) {
            c.tp += pi;
            c.fn += 1.0 - pi;
        } else {
            c.fp += pi;
            c.tn += 1.0 - pi;
        }
    }
    return c;
}

double reduce_sum(std::span<const double> values)
{
    if (values.empty()) {
        throw DomainError("cannot reduce an empty grid");
    }
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    return total;
}

double reduce_mean(std::span<const double> values)
{
    return reduce_sum(values) / static_cast<double>(values.size());
}

unsigned thread_budget()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SEGLOSS_THREADS")) {
        unsigned cap = 0;
        const char* end = env + std::char_traits<char>::length(env);
        auto [ptr, ec] = std::from_chars(env, end, cap);
        if (ec == std::errc{} && ptr == end && cap >= 1) {
            return std::min(hw, cap);
        }
    }
    return hw;
}

}  // namespace segloss
