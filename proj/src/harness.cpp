#include "segloss/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>

#include "segloss/geometry.hpp"
#include "segloss/metrics.hpp"
#include "segloss/random.hpp"

namespace segloss {

namespace {

std::string_view kind_name(MaskKind kind)
{
    switch (kind) {
        case MaskKind::disk: return "disk";
        case MaskKind::rectangle: return "rectangle";
        case MaskKind::two_disks: return "two_disks";
        case MaskKind::sparse: return "sparse";
    }
    return "unknown";
}

std::string shortest(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
T parse_number(std::string_view text, std::string_view what)
{
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("mask spec: bad " + std::string(what) + " value '" + std::string(text) + "'");
    }
    return value;
}

Shape parse_hw(std::string_view text)
{
    const auto x = text.find('x');
    if (x == std::string_view::npos) {
        throw ConfigError("mask spec: expected HxW, got '" + std::string(text) + "'");
    }
    Shape s{parse_number<std::size_t>(text.substr(0, x), "height"),
            parse_number<std::size_t>(text.substr(x + 1), "width")};
    validate_shape(s);
    return s;
}

void paint_disk(Mask& mask, double center_row, double center_col, double radius)
{
    const Shape s = mask.shape();
    const double r2 = radius * radius;
    for (std::size_t r = 0; r < s.height; ++r) {
        for (std::size_t c = 0; c < s.width; ++c) {
            const double dr = static_cast<double>(r) - center_row;
            const double dc = static_cast<double>(c) - center_col;
            if (dr * dr + dc * dc <= r2) {
                mask.set(r, c, true);
            }
        }
    }
}

}  // namespace

std::string SyntheticMaskSpec::label() const
{
    std::string out(kind_name(kind));
    out += "_" + to_string(shape);
    switch (kind) {
        case MaskKind::disk:
        case MaskKind::two_disks:
            if (radius) {
                out += "_r" + shortest(*radius);
            }
            break;
        case MaskKind::rectangle:
            if (top) out += "_t" + std::to_string(*top);
            if (left) out += "_l" + std::to_string(*left);
            if (rect_height) out += "_h" + std::to_string(*rect_height);
            if (rect_width) out += "_w" + std::to_string(*rect_width);
            break;
        case MaskKind::sparse:
            out += "_f" + shortest(fraction) + "_s" + std::to_string(seed);
            break;
    }
    return out;
}

SyntheticMaskSpec parse_mask_spec(std::string_view text)
{
    SyntheticMaskSpec spec;
    const auto first = text.find(':');
    const std::string_view kind = text.substr(0, first);
    if (kind == "disk") {
        spec.kind = MaskKind::disk;
    } else if (kind == "rectangle") {
        spec.kind = MaskKind::rectangle;
    } else if (kind == "two_disks") {
        spec.kind = MaskKind::two_disks;
    } else if (kind == "sparse") {
        spec.kind = MaskKind::sparse;
    } else {
        throw ConfigError("mask spec: unknown kind '" + std::string(kind) +
                          "' (expected disk, rectangle, two_disks, sparse)");
    }
    if (first == std::string_view::npos) {
        return spec;
    }
    std::string_view rest = text.substr(first + 1);
    const auto second = rest.find(':');
    spec.shape = parse_hw(rest.substr(0, second));
    if (second == std::string_view::npos) {
        return spec;
    }
    std::string_view params = rest.substr(second + 1);
    while (!params.empty()) {
        const auto comma = params.find(',');
        const std::string_view item = params.substr(0, comma);
        params = comma == std::string_view::npos ? std::string_view{} : params.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("mask spec: expected key=value, got '" + std::string(item) + "'");
        }
        const std::string_view key = item.substr(0, eq);
        const std::string_view value = item.substr(eq + 1);
        if (key == "radius") {
            spec.radius = parse_number<double>(value, key);
        } else if (key == "fraction") {
            spec.fraction = parse_number<double>(value, key);
        } else if (key == "seed") {
            spec.seed = parse_number<std::uint64_t>(value, key);
        } else if (key == "top") {
            spec.top = parse_number<std::size_t>(value, key);
        } else if (key == "left") {
            spec.left = parse_number<std::size_t>(value, key);
        } else if (key == "height") {
            spec.rect_height = parse_number<std::size_t>(value, key);
        } else if (key == "width") {
            spec.rect_width = parse_number<std::size_t>(value, key);
        } else {
            throw ConfigError("mask spec: unknown key '" + std::string(key) + "'");
        }
    }
    return spec;
}

Mask generate_mask(const SyntheticMaskSpec& spec)
{
    validate_shape(spec.shape);
    Mask mask(spec.shape);
    const double h = static_cast<double>(spec.shape.height);
    const double w = static_cast<double>(spec.shape.width);
    const double side = std::min(h, w);
    switch (spec.kind) {
        case MaskKind::disk: {
            const double radius = spec.radius.value_or(0.25 * side);
            if (!(radius > 0.0)) {
                throw ConfigError("disk radius must be positive");
            }
            paint_disk(mask, (h - 1.0) / 2.0, (w - 1.0) / 2.0, radius);
            break;
        }
        case MaskKind::two_disks: {
            const double radius = spec.radius.value_or(0.15 * side);
            if (!(radius > 0.0)) {
                throw ConfigError("disk radius must be positive");
            }
            paint_disk(mask, (h - 1.0) / 2.0, (w - 1.0) / 4.0, radius);
            paint_disk(mask, (h - 1.0) / 2.0, 3.0 * (w - 1.0) / 4.0, radius);
            break;
        }
        case MaskKind::rectangle: {
            const std::size_t rh = spec.rect_height.value_or(spec.shape.height / 2);
            const std::size_t rw = spec.rect_width.value_or(spec.shape.width / 2);
            const std::size_t top = spec.top.value_or((spec.shape.height - rh) / 2);
            const std::size_t left = spec.left.value_or((spec.shape.width - rw) / 2);
            if (rh == 0 || rw == 0 || top + rh > spec.shape.height || left + rw > spec.shape.width) {
                throw ConfigError("rectangle must be nonempty and inside the grid");
            }
            for (std::size_t r = top; r < top + rh; ++r) {
                for (std::size_t c = left; c < left + rw; ++c) {
                    mask.set(r, c, true);
                }
            }
            break;
        }
        case MaskKind::sparse: {
            if (!(spec.fraction >= 0.0 && spec.fraction <= 1.0)) {
                throw ConfigError("sparse fraction must lie in [0, 1]");
            }
            const std::size_t n = spec.shape.size();
            const auto count = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(n)));
            std::vector<std::size_t> order(n);
            for (std::size_t i = 0; i < n; ++i) {
                order[i] = i;
            }
            // Partial Fisher-Yates: the first `count` slots are a uniform sample.
            Rng rng(spec.seed);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
                std::swap(order[i], order[j]);
                mask.set(order[i] / spec.shape.width, order[i] % spec.shape.width, true);
            }
            break;
        }
    }
    return mask;
}

void FitConfig::validate() const
{
    if (steps < 0) {
        throw ConfigError("steps must be >= 0");
    }
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be positive");
    }
    if (record_every < 1) {
        throw ConfigError("record_every must be >= 1");
    }
}

FitTrace fit(const Mask& truth, const FitConfig& cfg)
{
    cfg.validate();
    const Shape shape = truth.shape();
    LogitMap z(shape, 0.0);
    if (cfg.init == InitKind::random_uniform) {
        Rng rng(cfg.seed);
        for (auto& v : z.values()) {
            v = rng.uniform(-0.1, 0.1);
        }
    }
    const DistanceMap phi = boundary_distance_map(truth, true);

    FitTrace trace;
    for (int step = 0;; ++step) {
        const ProbabilityMap p = sigmoid(z);
        const FrozenCoefficients frozen = freeze(cfg.loss, truth, p, cfg.loss_config);
        const bool last = step == cfg.steps;
        if (step % cfg.record_every == 0 || last) {
            const double value = loss_value(cfg.loss, truth, p, cfg.loss_config, &phi, frozen);
            const MetricSummary m = evaluate(binarize(p), truth);
            if (!std::isfinite(value)) {
                trace.diverged = true;
                break;
            }
            trace.rows.push_back({step, value, m.dice, m.sensitivity, m.specificity});
        }
        trace.steps_run = step;
        if (last) {
            break;
        }
        const GradientMap g = analytic_gradient(cfg.loss, truth, p, cfg.loss_config, &phi, frozen);
        bool finite = true;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double dz = g[i] * p[i] * (1.0 - p[i]);
            finite = finite && std::isfinite(dz);
            z[i] -= cfg.learning_rate * dz;
        }
        if (!finite) {
            trace.diverged = true;
            break;
        }
    }
    return trace;
}

std::optional<int> first_step_reaching(const FitTrace& trace, double target)
{
    for (const auto& row : trace.rows) {
        if (row.dice >= target) {
            return row.step;
        }
    }
    return std::nullopt;
}

LossReport run_matrix(const std::vector<LossId>& losses, const std::vector<SyntheticMaskSpec>& specs,
                      const FitConfig& base)
{
    if (losses.empty() || specs.empty()) {
        throw ConfigError("run_matrix needs at least one loss and one mask spec");
    }
    base.validate();
    std::vector<Mask> masks;
    masks.reserve(specs.size());
    for (const auto& spec : specs) {
        masks.push_back(generate_mask(spec));
    }

    const std::size_t total = losses.size() * specs.size();
    LossReport report;
    report.rows.resize(total);
    report.traces.resize(total);

    auto run_job = [&](std::size_t job) {
        const std::size_t li = job / specs.size();
        const std::size_t si = job % specs.size();
        FitConfig cfg = base;
        cfg.loss = losses[li];
        FitTrace trace = fit(masks[si], cfg);
        ReportRow row;
        row.loss = losses[li];
        row.mask = specs[si].label();
        row.steps_run = trace.steps_run;
        row.diverged = trace.diverged;
        if (!trace.rows.empty()) {
            const TraceRow& final_row = trace.rows.back();
            row.dice = final_row.dice;
            row.sensitivity = final_row.sensitivity;
            row.specificity = final_row.specificity;
        }
        report.rows[job] = std::move(row);
        report.traces[job] = std::move(trace);
    };

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(total);
    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            try {
                run_job(job);
            } catch (...) {
                failures[job] = std::current_exception();
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::min<unsigned>(
        thread_budget(), static_cast<unsigned>(std::min<std::size_t>(total, 64))));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& failure : failures) {
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return report;
}

}  // namespace segloss
