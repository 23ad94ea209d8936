#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "laban/guidance.hpp"
#include "laban/model.hpp"

namespace laban {

// 4x4 relative-change statistics; rows = targeted channel, columns = measured
// channel.
struct ChangeMatrix {
    std::array<std::array<double, 4>, 4> mean{};
    std::array<std::array<double, 4>, 4> stdev{};
    int n_runs = 0;                   // intended samples per row
    std::array<int, 4> skipped{};     // degenerate cells dropped per row
    bool single_sample = false;       // some row aggregated <= 1 sample
};

// Component-wise (f_large - f_small) / f_small. Throws EvalError if any
// f_small component is not positive.
std::array<double, 4> relative_change(const std::array<double, 4>& f_small,
                                      const std::array<double, 4>& f_large);

enum class GuidanceMethod { Laban, RawFrame, Classifier };

GuidanceMethod parse_method(const std::string& name);
const char* method_name(GuidanceMethod method);

struct EvalConfig {
    std::uint64_t master_seed = 0;
    int stride = 20;
    GuidanceConfig guidance;
    SmoothingConfig smoothing;
    double classifier_lambda = 0.005;
    int raw_frame_steps = 100;
    double raw_frame_lr = 0.05;
    // Compare the unguided baseline against the large-tag run instead of the
    // two guided extremes.
    bool against_baseline = false;
    int jobs = 1;
};

// Scalars measured for one (row, condition, repeat) cell: the pair whose
// relative change fills that row. nullopt drops the cell as degenerate.
using CellFn = std::function<std::optional<std::pair<std::array<double, 4>, std::array<double, 4>>>(
    std::size_t row, std::size_t condition_index, int repeat)>;

// Aggregation core, separated so tests can inject synthetic cells.
ChangeMatrix accumulate_change_matrix(std::size_t n_conditions, int n_repeats, const CellFn& cell,
                                      int jobs = 1);

// Full harness: per row, guides each (condition, repeat) with the channel's
// small and large tag from a shared per-cell baseline, extracts max-over-time
// scalars and aggregates relative changes. Throws EvalError if every cell of
// some row is degenerate.
ChangeMatrix change_matrix(const Model& model, GuidanceMethod method,
                           const std::vector<int>& condition_ids, int n_repeats,
                           const EvalConfig& cfg);

// sum_i A_ii^2 / sum_ij A_ij^2, in [0, 1]. Throws EvalError on a zero matrix.
double diagonality(const std::array<std::array<double, 4>, 4>& matrix);

// Mean pairwise Euclidean distance between flattened motions.
double diversity_proxy(const std::vector<Motion>& motions);

struct TcFcComparison {
    LabanSeries tc;
    LabanSeries fc;
    std::array<double, 4> peak_ratio{};  // fc peak / tc peak per channel
};

// Side-by-side feature series of an unguided and a guided motion. Peak ratios
// of channels whose both peaks are below 1e-12 are reported as 1.
TcFcComparison compare_tc_fc(const Motion& baseline, const Motion& guided,
                             const EndEffectorSet& effectors, const SmoothingConfig& smoothing);

// CSV with header frame,channel,tc_value,fc_value.
std::string tc_fc_to_csv(const TcFcComparison& cmp);

}  // namespace laban
