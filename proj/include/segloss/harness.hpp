#ifndef SEGLOSS_HARNESS_HPP
#define SEGLOSS_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "segloss/losses.hpp"

// Per-pixel logit optimisation against synthetic masks. Each loss drives
// plain gradient descent on z with p = sigmoid(z); frozen coefficients are
// recomputed from the current p once per step.

namespace segloss {

enum class MaskKind { disk, rectangle, two_disks, sparse };

struct SyntheticMaskSpec {
    MaskKind kind = MaskKind::disk;
    Shape shape{32, 32};
    /// disk / two_disks radius; defaults to 0.25 (disk) or 0.15 (two_disks) of min(H, W).
    std::optional<double> radius;
    /// rectangle extent; defaults to the centred half-size box.
    std::optional<std::size_t> top, left, rect_height, rect_width;
    double fraction = 0.01;  ///< sparse foreground fraction
    std::uint64_t seed = 0;

    /// Canonical text form, also used in output file names.
    std::string label() const;
};

/// Parses "kind:HxW[:key=value,...]", e.g. "disk:32x32", "disk:32x32:radius=6",
/// "sparse:64x64:fraction=0.01,seed=3", "rectangle:32x32:top=4,left=4,height=8,width=12".
SyntheticMaskSpec parse_mask_spec(std::string_view text);

/// Deterministic given the spec. Disk pixels satisfy distance to the centre
/// ((H-1)/2, (W-1)/2) <= radius. Sparse masks hold exactly round(f * H * W)
/// foreground pixels.
Mask generate_mask(const SyntheticMaskSpec& spec);

enum class InitKind { zeros, random_uniform };

struct FitConfig {
    LossId loss = LossId::dice;
    int steps = 500;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
    InitKind init = InitKind::zeros;  ///< random_uniform draws z in [-0.1, 0.1]
    int record_every = 1;
    LossConfig loss_config{};

    void validate() const;
};

struct TraceRow {
    int step = 0;
    double loss = 0.0;
    double dice = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
};

struct FitTrace {
    std::vector<TraceRow> rows;
    bool diverged = false;
    int steps_run = 0;
};

/// Rows are recorded at step 0, every record_every steps, and at the last
/// step. A non-finite loss or gradient stops the run with diverged set.
FitTrace fit(const Mask& truth, const FitConfig& cfg);

/// First recorded step whose dice coefficient reaches target.
std::optional<int> first_step_reaching(const FitTrace& trace, double target);

struct ReportRow {
    LossId loss = LossId::dice;
    std::string mask;
    double dice = 0.0;
    double sensitivity = 0.0;
    double specificity = 0.0;
    int steps_run = 0;
    bool diverged = false;
};

struct LossReport {
    std::vector<ReportRow> rows;
    std::vector<FitTrace> traces;  ///< parallel to rows
};

/// One row per (loss, spec), loss-major. Rows may run in parallel (capped by
/// SEGLOSS_THREADS); output order and values do not depend on the thread count.
LossReport run_matrix(const std::vector<LossId>& losses, const std::vector<SyntheticMaskSpec>& specs,
                      const FitConfig& base);

}  // namespace segloss

#endif  // SEGLOSS_HARNESS_HPP
