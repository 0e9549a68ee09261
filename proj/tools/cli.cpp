#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "segloss/geometry.hpp"
#include "segloss/gradcheck.hpp"
#include "segloss/harness.hpp"
#include "segloss/io.hpp"
#include "segloss/losses.hpp"
#include "segloss/metrics.hpp"

namespace segloss::cli {

namespace {

namespace fs = std::filesystem;

// Usage problems detected after CLI11 has finished parsing.
class UsageError : public Error {
public:
    using Error::Error;
};

LossId require_loss(std::string_view name)
{
    if (auto id = parse_loss_id(name)) {
        return *id;
    }
    throw UsageError("unknown loss '" + std::string(name) + "'; valid names: " + valid_loss_names());
}

std::vector<LossId> parse_loss_list(const std::string& text)
{
    std::vector<LossId> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        out.push_back(require_loss(rest.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        rest = rest.substr(comma + 1);
    }
    return out;
}

Shape parse_size(const std::string& text)
{
    const auto x = text.find('x');
    std::size_t h = 0;
    std::size_t w = 0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    bool ok = x != std::string::npos;
    if (ok) {
        auto r1 = std::from_chars(begin, begin + x, h);
        auto r2 = std::from_chars(begin + x + 1, end, w);
        ok = r1.ec == std::errc{} && r1.ptr == begin + x && r2.ec == std::errc{} && r2.ptr == end;
    }
    if (!ok) {
        throw UsageError("--size expects HxW, got '" + text + "'");
    }
    Shape s{h, w};
    try {
        validate_shape(s);
    } catch (const ShapeError& e) {
        throw UsageError(std::string("--size: ") + e.what());
    }
    return s;
}

LossConfig build_config(const std::vector<std::string>& overrides)
{
    LossConfig cfg;
    for (const auto& kv : overrides) {
        apply_config_override(cfg, kv);
    }
    cfg.validate();
    return cfg;
}

bool has_override(const std::vector<std::string>& overrides, std::string_view key)
{
    for (const auto& kv : overrides) {
        if (std::string_view(kv).substr(0, kv.find('=')) == key) {
            return true;
        }
    }
    return false;
}

bool looks_like_pgm(std::string_view text)
{
    const auto start = text.find_first_not_of(" \t\r\n");
    return start != std::string_view::npos && text.substr(start, 2) == "P2";
}

// Predictions may be a probability CSV or a hard mask.
ProbabilityMap load_prediction(const std::string& path)
{
    const std::string text = read_file(path);
    if (looks_like_pgm(text)) {
        return ProbabilityMap::from_mask(parse_mask(text));
    }
    return parse_probability_map(text);
}

std::string scientific(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 3);
    return std::string(buf, ptr);
}

struct EvalArgs {
    std::string truth;
    std::string pred;
    std::string loss;
    std::vector<std::string> config;
    std::string phi;
    bool auto_phi = false;
    bool phi_raw = false;
    bool exact = false;
    std::string gradient_out;
};

int cmd_eval(const EvalArgs& a, std::ostream& out)
{
    const LossId id = require_loss(a.loss);
    const LossConfig cfg = build_config(a.config);
    if (id == LossId::weighted_bce && !has_override(a.config, "beta")) {
        throw UsageError("weighted_bce needs an explicit --config beta=B");
    }
    const bool wants_phi = id == LossId::distance_penalized_ce;
    if (!wants_phi && (!a.phi.empty() || a.auto_phi || a.phi_raw)) {
        throw UsageError("--phi, --auto-phi and --phi-raw apply only to distance_penalized_ce");
    }
    if (wants_phi && a.phi.empty() == !a.auto_phi) {
        throw UsageError("distance_penalized_ce needs exactly one of --phi FILE or --auto-phi");
    }
    if (a.phi_raw && !a.auto_phi) {
        throw UsageError("--phi-raw requires --auto-phi");
    }

    const Mask truth = parse_mask(read_file(a.truth));
    const ProbabilityMap pred = load_prediction(a.pred);
    require_same_shape(truth.shape(), pred.shape(), "eval");
    std::optional<DistanceMap> phi;
    if (!a.phi.empty()) {
        phi = parse_grid(read_file(a.phi), GridKind::distance);
        require_same_shape(truth.shape(), phi->shape(), "eval --phi");
    } else if (a.auto_phi) {
        phi = boundary_distance_map(truth, !a.phi_raw);
    }

    const DistanceMap* phi_ptr = phi ? &*phi : nullptr;
    const double value = loss_value(id, truth, pred, cfg, phi_ptr);
    if (!a.gradient_out.empty()) {
        write_file_atomic(a.gradient_out, serialize_grid(analytic_gradient(id, truth, pred, cfg, phi_ptr)));
    }
    out << loss_name(id) << '\t' << (a.exact ? format_shortest(value) : format_fixed(value, 9)) << '\n';
    return kOk;
}

struct GradcheckArgs {
    std::string loss = "all";
    std::string size = "8x8";
    std::uint64_t seed = 42;
    double tol = 1e-5;
    std::vector<std::string> config;
};

int cmd_gradcheck(const GradcheckArgs& a, std::ostream& out)
{
    std::vector<LossId> ids;
    if (a.loss == "all") {
        ids.assign(kAllLosses.begin(), kAllLosses.end());
    } else {
        ids = parse_loss_list(a.loss);
    }
    const Shape shape = parse_size(a.size);
    if (!(a.tol >= 0.0)) {
        throw UsageError("--tol must be >= 0");
    }
    const LossConfig cfg = build_config(a.config);
    GradCheckTolerance tol;
    tol.relative = a.tol;
    const auto results = run_gradcheck(ids, a.seed, shape, tol, cfg);

    bool all_passed = true;
    out << "loss\tmax_rel_error\tresult\n";
    for (const auto& r : results) {
        all_passed = all_passed && r.passed;
        out << loss_name(r.loss) << '\t' << scientific(r.max_rel_error) << '\t'
            << (r.passed ? "pass" : "fail") << '\n';
    }
    return all_passed ? kOk : kCheckFailed;
}

struct MetricsArgs {
    std::string truth;
    std::string pred;
    double threshold = 0.5;
};

int cmd_metrics(const MetricsArgs& a, std::ostream& out)
{
    const Mask truth = parse_mask(read_file(a.truth));
    const ProbabilityMap pred_map = load_prediction(a.pred);
    require_same_shape(truth.shape(), pred_map.shape(), "metrics");
    const Mask pred = binarize(pred_map, a.threshold);
    const HardConfusion c = hard_confusion(pred, truth);
    const auto hd = boundary_hausdorff(pred, truth);

    out << "dice_coefficient\t" << format_fixed(dice_coefficient(c), 9) << '\n';
    out << "sensitivity\t" << format_fixed(sensitivity(c), 9) << '\n';
    out << "specificity\t" << format_fixed(specificity(c), 9) << '\n';
    out << "hausdorff_distance\t" << (hd ? format_fixed(*hd, 9) : std::string("nan")) << '\n';
    out << "tp\t" << c.tp << "\nfp\t" << c.fp << "\ntn\t" << c.tn << "\nfn\t" << c.fn << '\n';
    if (2 * c.tp + c.fp + c.fn == 0) {
        out << "note\tdice_coefficient has a zero denominator; reported as 1 by convention\n";
    }
    if (c.tp + c.fn == 0) {
        out << "note\tsensitivity has a zero denominator (no foreground in truth); reported as 1 by convention\n";
    }
    if (c.tn + c.fp == 0) {
        out << "note\tspecificity has a zero denominator (no background in truth); reported as 1 by convention\n";
    }
    if (!hd) {
        out << "note\thausdorff_distance is undefined when either boundary is empty\n";
    }
    return kOk;
}

struct RunArgs {
    std::string losses;
    std::vector<std::string> mask_specs;
    int steps = 500;
    double lr = 0.5;
    std::uint64_t seed = 0;
    std::string init = "zeros";
    int record_every = 1;
    std::string out_dir;
    std::string format = "csv";
    std::vector<std::string> config;
};

std::string trace_csv(const FitTrace& trace)
{
    std::string s = "step,loss,dice,sensitivity,specificity\n";
    for (const auto& r : trace.rows) {
        s += std::to_string(r.step) + ',' + format_shortest(r.loss) + ',' + format_shortest(r.dice) +
             ',' + format_shortest(r.sensitivity) + ',' + format_shortest(r.specificity) + '\n';
    }
    return s;
}

std::string summary_table(const std::vector<const ReportRow*>& rows, bool markdown)
{
    std::string s;
    if (markdown) {
        s = "| loss_function | dice_coefficient | sensitivity | specificity |\n"
            "|---|---:|---:|---:|\n";
        for (const auto* r : rows) {
            s += "| " + std::string(loss_name(r->loss)) + " | " + format_fixed(r->dice, 6) + " | " +
                 format_fixed(r->sensitivity, 6) + " | " + format_fixed(r->specificity, 6) + " |\n";
        }
    } else {
        s = "loss_function,dice_coefficient,sensitivity,specificity\n";
        for (const auto* r : rows) {
            s += std::string(loss_name(r->loss)) + ',' + format_shortest(r->dice) + ',' +
                 format_shortest(r->sensitivity) + ',' + format_shortest(r->specificity) + '\n';
        }
    }
    return s;
}

int cmd_run(const RunArgs& a, bool with_summary, std::ostream& out, std::ostream& err)
{
    std::vector<LossId> losses;
    if (a.losses.empty()) {
        losses.assign(kExperimentLosses.begin(), kExperimentLosses.end());
    } else {
        losses = parse_loss_list(a.losses);
    }
    if (a.format != "csv" && a.format != "md") {
        throw UsageError("--format must be csv or md");
    }
    std::vector<SyntheticMaskSpec> specs;
    for (const auto& text : a.mask_specs) {
        try {
            specs.push_back(parse_mask_spec(text));
        } catch (const ShapeError& e) {
            throw UsageError(std::string("--mask-spec: ") + e.what());
        }
    }
    if (specs.empty()) {
        specs.push_back(parse_mask_spec("disk:32x32"));
    }
    FitConfig base;
    base.steps = a.steps;
    base.learning_rate = a.lr;
    base.seed = a.seed;
    base.record_every = a.record_every;
    if (a.init == "zeros") {
        base.init = InitKind::zeros;
    } else if (a.init == "random") {
        base.init = InitKind::random_uniform;
    } else {
        throw UsageError("--init must be zeros or random");
    }
    base.loss_config = build_config(a.config);
    if (a.steps < 1) {
        throw UsageError("--steps must be >= 1");
    }
    base.validate();

    const fs::path dir = a.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw UsageError("cannot create output directory " + dir.string());
    }

    const LossReport report = run_matrix(losses, specs, base);
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const ReportRow& row = report.rows[i];
        const fs::path path = dir / ("trace_" + std::string(loss_name(row.loss)) + "_" + row.mask + ".csv");
        write_file_atomic(path, trace_csv(report.traces[i]));
        out << "wrote\t" << path.string() << '\n';
        if (row.diverged) {
            err << "segloss: " << loss_name(row.loss) << " diverged on " << row.mask << " after "
                << row.steps_run << " steps\n";
        }
    }
    if (!with_summary) {
        return kOk;
    }
    const bool markdown = a.format == "md";
    for (const auto& spec : specs) {
        const std::string label = spec.label();
        std::vector<const ReportRow*> rows;
        for (const auto& row : report.rows) {
            if (row.mask == label) {
                rows.push_back(&row);
            }
        }
        const fs::path path = dir / ("summary_" + label + (markdown ? ".md" : ".csv"));
        const std::string table = summary_table(rows, markdown);
        write_file_atomic(path, table);
        out << "wrote\t" << path.string() << '\n' << table;
    }
    return kOk;
}

void add_run_options(CLI::App* sub, RunArgs& a)
{
    sub->add_option("--losses", a.losses, "Comma-separated loss names (default: the nine experiment losses)");
    sub->add_option("--mask-spec", a.mask_specs, "kind:HxW[:k=v,...]; repeatable (default disk:32x32)");
    sub->add_option("--steps", a.steps, "Gradient steps")->capture_default_str();
    sub->add_option("--lr", a.lr, "Learning rate")->capture_default_str();
    sub->add_option("--seed", a.seed, "Seed for random initialisation")->capture_default_str();
    sub->add_option("--init", a.init, "zeros or random")->capture_default_str();
    sub->add_option("--record-every", a.record_every, "Trace sampling interval")->capture_default_str();
    sub->add_option("--out", a.out_dir, "Output directory")->required();
    sub->add_option("--format", a.format, "Summary format: csv or md")->capture_default_str();
    sub->add_option("--config", a.config, "Loss config override key=value; repeatable");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Segmentation loss toolkit", "segloss"};
    app.require_subcommand(1);

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate one loss on a truth mask and a prediction");
    eval_cmd->add_option("--truth", eval.truth, "Ground-truth mask (P2 PGM)")->required();
    eval_cmd->add_option("--pred", eval.pred, "Prediction: probability CSV or P2 PGM")->required();
    eval_cmd->add_option("--loss", eval.loss, "Loss name")->required();
    eval_cmd->add_option("--config", eval.config, "Loss config override key=value; repeatable");
    eval_cmd->add_option("--phi", eval.phi, "Distance map CSV for distance_penalized_ce");
    eval_cmd->add_flag("--auto-phi", eval.auto_phi, "Use the normalized distance to the truth boundary");
    eval_cmd->add_flag("--phi-raw", eval.phi_raw, "With --auto-phi, skip normalization");
    eval_cmd->add_flag("--exact", eval.exact, "Print the shortest round-trip value instead of 9 decimals");
    eval_cmd->add_option("--gradient-out", eval.gradient_out, "Also write dL/dp as CSV to this file");

    GradcheckArgs grad;
    auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
    grad_cmd->add_option("--loss", grad.loss, "Loss name, comma-separated list, or all")->capture_default_str();
    grad_cmd->add_option("--size", grad.size, "Grid size HxW")->capture_default_str();
    grad_cmd->add_option("--seed", grad.seed, "Instance seed")->capture_default_str();
    grad_cmd->add_option("--tol", grad.tol, "Relative tolerance")->capture_default_str();
    grad_cmd->add_option("--config", grad.config, "Loss config override key=value; repeatable");

    MetricsArgs met;
    auto* met_cmd = app.add_subcommand("metrics", "Dice, sensitivity, specificity and boundary Hausdorff distance");
    met_cmd->add_option("--truth", met.truth, "Ground-truth mask (P2 PGM)")->required();
    met_cmd->add_option("--pred", met.pred, "Prediction: probability CSV or P2 PGM")->required();
    met_cmd->add_option("--threshold", met.threshold, "Binarization threshold")->capture_default_str();

    RunArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Optimise logits under each loss and write traces");
    add_run_options(fit_cmd, fit_args);
    RunArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "Like fit, plus a summary table per mask spec");
    add_run_options(report_cmd, report_args);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*eval_cmd) return cmd_eval(eval, out);
        if (*grad_cmd) return cmd_gradcheck(grad, out);
        if (*met_cmd) return cmd_metrics(met, out);
        if (*fit_cmd) return cmd_run(fit_args, false, out, err);
        if (*report_cmd) return cmd_run(report_args, true, out, err);
    } catch (const ShapeError& e) {
        err << "segloss: " << e.what() << '\n';
        return kShapeMismatch;
    } catch (const Error& e) {
        err << "segloss: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace segloss::cli
