#include "laban/evaluation.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "laban/errors.hpp"
#include "laban/rng.hpp"
#include "laban/util.hpp"

namespace laban {

std::array<double, 4> relative_change(const std::array<double, 4>& f_small,
                                      const std::array<double, 4>& f_large) {
    std::array<double, 4> out{};
    for (std::size_t c = 0; c < 4; ++c) {
        if (!(f_small[c] > 0.0)) {
            throw EvalError(std::string("degenerate baseline: ") + channel_name(c) +
                            " scalar is " + fmt_double(f_small[c]));
        }
        out[c] = (f_large[c] - f_small[c]) / f_small[c];
    }
    return out;
}

GuidanceMethod parse_method(const std::string& name) {
    if (name == "laban") return GuidanceMethod::Laban;
    if (name == "raw-frame") return GuidanceMethod::RawFrame;
    if (name == "classifier") return GuidanceMethod::Classifier;
    throw ConfigError("unknown method '" + name + "' (expected laban, raw-frame or classifier)");
}

const char* method_name(GuidanceMethod method) {
    switch (method) {
        case GuidanceMethod::Laban: return "laban";
        case GuidanceMethod::RawFrame: return "raw-frame";
        case GuidanceMethod::Classifier: return "classifier";
    }
    return "unknown";
}

namespace {

constexpr double kDegenerateFloor = 1e-8;

struct CellResult {
    bool valid = false;
    std::array<double, 4> change{};
};

// Scale extremes per targeted channel, matching the tag table.
constexpr std::array<std::pair<double, double>, 4> kScaleExtremes{
    std::pair<double, double>{0.5, 1.5},  // weight: light / strong
    std::pair<double, double>{0.8, 1.2},  // time: sustained / sudden
    std::pair<double, double>{0.8, 1.2},  // flow: bound / free
    std::pair<double, double>{0.5, 1.5},  // shape: near / far
};

}  // namespace

ChangeMatrix accumulate_change_matrix(std::size_t n_conditions, int n_repeats, const CellFn& cell,
                                      int jobs) {
    if (n_conditions == 0 || n_repeats < 1) {
        throw EvalError("change matrix needs at least one condition and one repeat");
    }
    const std::size_t per_row = n_conditions * static_cast<std::size_t>(n_repeats);
    std::vector<CellResult> results(4 * per_row);

    auto run_cell = [&](std::size_t flat) {
        const std::size_t row = flat / per_row;
        const std::size_t within = flat % per_row;
        const std::size_t cond = within / static_cast<std::size_t>(n_repeats);
        const int repeat = static_cast<int>(within % static_cast<std::size_t>(n_repeats));
        const auto pair = cell(row, cond, repeat);
        if (!pair) return;
        bool degenerate = false;
        for (double v : pair->first) degenerate = degenerate || !(v > kDegenerateFloor);
        if (degenerate) return;
        results[flat].valid = true;
        results[flat].change = relative_change(pair->first, pair->second);
    };

    const std::size_t total = results.size();
    if (jobs <= 1) {
        for (std::size_t i = 0; i < total; ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const int n_threads = std::min<int>(jobs, static_cast<int>(total));
        workers.reserve(static_cast<std::size_t>(n_threads));
        std::atomic<bool> failed{false};
        std::string error_msg;
        std::mutex error_mutex;
        for (int w = 0; w < n_threads; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= total || failed.load()) break;
                    try {
                        run_cell(i);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        failed.store(true);
                        error_msg = e.what();
                    }
                }
            });
        }
        for (auto& t : workers) t.join();
        if (failed.load()) throw EvalError("evaluation worker failed: " + error_msg);
    }

    ChangeMatrix matrix;
    matrix.n_runs = static_cast<int>(per_row);
    for (std::size_t row = 0; row < 4; ++row) {
        std::size_t n = 0;
        std::array<double, 4> sum{};
        std::array<double, 4> sum_sq{};
        for (std::size_t i = 0; i < per_row; ++i) {
            const CellResult& r = results[row * per_row + i];
            if (!r.valid) continue;
            ++n;
            for (std::size_t c = 0; c < 4; ++c) {
                sum[c] += r.change[c];
                sum_sq[c] += r.change[c] * r.change[c];
            }
        }
        matrix.skipped[row] = static_cast<int>(per_row - n);
        if (n == 0) {
            throw EvalError(std::string("all cells degenerate for the ") + channel_name(row) +
                            " row");
        }
        if (n <= 1) matrix.single_sample = true;
        for (std::size_t c = 0; c < 4; ++c) {
            const double mean = sum[c] / static_cast<double>(n);
            matrix.mean[row][c] = mean;
            const double var = std::max(0.0, sum_sq[c] / static_cast<double>(n) - mean * mean);
            matrix.stdev[row][c] = std::sqrt(var);
        }
    }
    return matrix;
}

ChangeMatrix change_matrix(const Model& model, GuidanceMethod method,
                           const std::vector<int>& condition_ids, int n_repeats,
                           const EvalConfig& cfg) {
    if (condition_ids.empty()) throw EvalError("no conditions to evaluate");
    const std::vector<int> steps = make_step_indices(model.schedule.n_steps, cfg.stride);
    const EndEffectorSet effectors = model.skeleton.effectors();

    auto run_method = [&](const BaselineResult& baseline, const ScaleVector& scale) {
        const LabanSeries target = make_target(baseline.series, scale);
        Motion guided;
        switch (method) {
            case GuidanceMethod::Laban:
                guided = guided_sample(model, baseline.embedding, baseline.z, steps, target,
                                       baseline.series, cfg.guidance, cfg.smoothing)
                             .motion;
                break;
            case GuidanceMethod::RawFrame:
                guided = raw_frame_update(baseline.motion, target, baseline.series, effectors,
                                          cfg.smoothing, cfg.guidance.delta, cfg.raw_frame_steps,
                                          cfg.raw_frame_lr);
                break;
            case GuidanceMethod::Classifier:
                guided = classifier_guided_sample(model, baseline.embedding, baseline.z, steps,
                                                  target, baseline.series, cfg.classifier_lambda,
                                                  cfg.smoothing, cfg.guidance.delta,
                                                  cfg.guidance.divergence_factor)
                             .motion;
                break;
        }
        return laban_scalars(laban_series(guided, effectors, cfg.smoothing));
    };

    CellFn cell = [&](std::size_t row, std::size_t cond_idx, int repeat)
        -> std::optional<std::pair<std::array<double, 4>, std::array<double, 4>>> {
        const int condition = condition_ids[cond_idx];
        const std::uint64_t seed = derive_seed(cfg.master_seed, row, cond_idx,
                                               static_cast<std::uint64_t>(repeat));
        const BaselineResult baseline =
            generate_baseline(model, condition, seed, steps, cfg.smoothing);

        ScaleVector small_scale, large_scale;
        small_scale.s[row] = kScaleExtremes[row].first;
        large_scale.s[row] = kScaleExtremes[row].second;

        const std::array<double, 4> f_large = run_method(baseline, large_scale);
        const std::array<double, 4> f_small = cfg.against_baseline
                                                  ? laban_scalars(baseline.series)
                                                  : run_method(baseline, small_scale);
        return std::make_pair(f_small, f_large);
    };

    return accumulate_change_matrix(condition_ids.size(), n_repeats, cell, cfg.jobs);
}

double diagonality(const std::array<std::array<double, 4>, 4>& matrix) {
    double diag = 0.0;
    double total = 0.0;
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            const double v = matrix[r][c];
            total += v * v;
            if (r == c) diag += v * v;
        }
    }
    if (total == 0.0) throw EvalError("diagonality undefined for a zero matrix");
    return diag / total;
}

double diversity_proxy(const std::vector<Motion>& motions) {
    if (motions.size() < 2) throw EvalError("diversity proxy needs at least two motions");
    const std::size_t n = motions.front().flat_size();
    for (const Motion& m : motions) {
        if (m.flat_size() != n) throw DimensionError("diversity proxy motions differ in shape");
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < motions.size(); ++i) {
        for (std::size_t j = i + 1; j < motions.size(); ++j) {
            double sq = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = motions[i].positions[k] - motions[j].positions[k];
                sq += d * d;
            }
            total += std::sqrt(sq);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

TcFcComparison compare_tc_fc(const Motion& baseline, const Motion& guided,
                             const EndEffectorSet& effectors, const SmoothingConfig& smoothing) {
    if (baseline.frames != guided.frames || baseline.joints() != guided.joints()) {
        throw DimensionError("tc/fc comparison requires motions of equal shape");
    }
    TcFcComparison cmp;
    cmp.tc = laban_series(baseline, effectors, smoothing);
    cmp.fc = laban_series(guided, effectors, smoothing);
    const std::array<double, 4> tc_peak = laban_scalars(cmp.tc);
    const std::array<double, 4> fc_peak = laban_scalars(cmp.fc);
    for (std::size_t c = 0; c < 4; ++c) {
        if (tc_peak[c] < 1e-12 && fc_peak[c] < 1e-12) {
            cmp.peak_ratio[c] = 1.0;
        } else {
            cmp.peak_ratio[c] = fc_peak[c] / std::max(tc_peak[c], 1e-12);
        }
    }
    return cmp;
}

std::string tc_fc_to_csv(const TcFcComparison& cmp) {
    std::ostringstream out;
    out << "frame,channel,tc_value,fc_value\n";
    for (std::size_t t = 0; t < cmp.tc.frames; ++t) {
        for (std::size_t c = 0; c < 4; ++c) {
            out << t << ',' << channel_name(c) << ',' << fmt_double(cmp.tc.at(t, c)) << ','
                << fmt_double(cmp.fc.at(t, c)) << '\n';
        }
    }
    return out.str();
}

}  // namespace laban
