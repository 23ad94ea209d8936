#include "laban/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "laban/errors.hpp"
#include "laban/util.hpp"

namespace laban {

const char* channel_name(std::size_t channel) {
    switch (channel) {
        case kWeight: return "weight";
        case kTime: return "time";
        case kFlow: return "flow";
        case kShape: return "shape";
        default: return "unknown";
    }
}

namespace {

inline double soft_norm(const double* v) {
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + kNormEps);
}

// Forward pass with every intermediate the backward pass needs.
struct FeaturePipeline {
    std::size_t T = 0;
    std::size_t J = 0;
    Motion smoothed;
    KinematicsSeries kin;
    LabanSeries series;
    std::vector<std::size_t> arg_min;  // T*3 extremal joint per frame and axis
    std::vector<std::size_t> arg_max;
    std::vector<double> extents;  // T*3

    FeaturePipeline(const Motion& motion, const EndEffectorSet& effectors,
                    const SmoothingConfig& smoothing) {
        validate_motion(motion);
        validate_effectors(effectors, motion.joints());
        T = motion.frames;
        J = motion.joints();
        smoothed = gaussian_smooth(motion, smoothing);
        kin = kinematics(smoothed);

        series.frames = T;
        series.values.assign(T * 4, 0.0);
        arg_min.assign(T * 3, 0);
        arg_max.assign(T * 3, 0);
        extents.assign(T * 3, 0.0);

        const std::size_t row = J * 3;
        for (std::size_t t = 0; t < T; ++t) {
            double weight = 0.0, time = 0.0, flow = 0.0;
            for (std::size_t k : effectors.indices) {
                const double* v = &kin.velocity[t * row + k * 3];
                const double* a = &kin.acceleration[t * row + k * 3];
                const double* j = &kin.jerk[t * row + k * 3];
                weight += v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
                time += soft_norm(a);
                flow += soft_norm(j);
            }
            // Frames with no defined derivative stay exactly zero.
            series.at(t, kWeight) = (t >= 1) ? weight : 0.0;
            series.at(t, kTime) = (t >= 2) ? time : 0.0;
            series.at(t, kFlow) = (t >= 3) ? flow : 0.0;

            double volume = 1.0;
            for (std::size_t d = 0; d < 3; ++d) {
                std::size_t lo = 0, hi = 0;
                double lo_v = smoothed.at(t, 0, d);
                double hi_v = lo_v;
                for (std::size_t j = 1; j < J; ++j) {
                    const double x = smoothed.at(t, j, d);
                    if (x < lo_v) { lo_v = x; lo = j; }
                    if (x > hi_v) { hi_v = x; hi = j; }
                }
                arg_min[t * 3 + d] = lo;
                arg_max[t * 3 + d] = hi;
                extents[t * 3 + d] = hi_v - lo_v;
                volume *= hi_v - lo_v;
            }
            series.at(t, kShape) = volume;
        }
    }

    // Maps an adjoint of the feature series back to the raw positions.
    std::vector<double> backward(const std::vector<double>& g_series,
                                 const EndEffectorSet& effectors,
                                 const SmoothingConfig& smoothing) const {
        const std::size_t row = J * 3;
        std::vector<double> g_vel(T * row, 0.0);
        std::vector<double> g_acc(T * row, 0.0);
        std::vector<double> g_jerk(T * row, 0.0);
        std::vector<double> g_smooth(T * row, 0.0);

        for (std::size_t t = 0; t < T; ++t) {
            const double gw = g_series[t * 4 + kWeight];
            const double gt = g_series[t * 4 + kTime];
            const double gf = g_series[t * 4 + kFlow];
            const double gs = g_series[t * 4 + kShape];
            for (std::size_t k : effectors.indices) {
                const double* v = &kin.velocity[t * row + k * 3];
                const double* a = &kin.acceleration[t * row + k * 3];
                const double* j = &kin.jerk[t * row + k * 3];
                if (t >= 1 && gw != 0.0) {
                    for (std::size_t d = 0; d < 3; ++d)
                        g_vel[t * row + k * 3 + d] += gw * 2.0 * v[d];
                }
                if (t >= 2 && gt != 0.0) {
                    const double n = soft_norm(a);
                    for (std::size_t d = 0; d < 3; ++d)
                        g_acc[t * row + k * 3 + d] += gt * a[d] / n;
                }
                if (t >= 3 && gf != 0.0) {
                    const double n = soft_norm(j);
                    for (std::size_t d = 0; d < 3; ++d)
                        g_jerk[t * row + k * 3 + d] += gf * j[d] / n;
                }
            }
            if (gs != 0.0) {
                // d(volume)/d(extent_d) = product of the other two extents.
                for (std::size_t d = 0; d < 3; ++d) {
                    double others = 1.0;
                    for (std::size_t d2 = 0; d2 < 3; ++d2)
                        if (d2 != d) others *= extents[t * 3 + d2];
                    const double g_ext = gs * others;
                    g_smooth[t * row + arg_max[t * 3 + d] * 3 + d] += g_ext;
                    g_smooth[t * row + arg_min[t * 3 + d] * 3 + d] -= g_ext;
                }
            }
        }

        // Reverse of the difference chain.
        for (std::size_t t = T; t-- > 3;) {
            for (std::size_t k = 0; k < row; ++k) {
                g_acc[t * row + k] += g_jerk[t * row + k];
                g_acc[(t - 1) * row + k] -= g_jerk[t * row + k];
            }
        }
        for (std::size_t t = T; t-- > 2;) {
            for (std::size_t k = 0; k < row; ++k) {
                g_vel[t * row + k] += g_acc[t * row + k];
                g_vel[(t - 1) * row + k] -= g_acc[t * row + k];
            }
        }
        for (std::size_t t = T; t-- > 1;) {
            for (std::size_t k = 0; k < row; ++k) {
                g_smooth[t * row + k] += g_vel[t * row + k];
                g_smooth[(t - 1) * row + k] -= g_vel[t * row + k];
            }
        }

        if (!smoothing.enabled) return g_smooth;

        // Adjoint of the replicate-padded convolution.
        const std::vector<double> weights = gaussian_kernel(smoothing.kernel_size, smoothing.sigma2);
        const int half = smoothing.kernel_size / 2;
        const long last = static_cast<long>(T) - 1;
        std::vector<double> g_pos(T * row, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            for (int i = 0; i < smoothing.kernel_size; ++i) {
                const long src = std::clamp(static_cast<long>(t) + i - half, 0L, last);
                const double w = weights[static_cast<std::size_t>(i)];
                const double* g_row = &g_smooth[t * row];
                double* out_row = &g_pos[static_cast<std::size_t>(src) * row];
                for (std::size_t k = 0; k < row; ++k) out_row[k] += w * g_row[k];
            }
        }
        return g_pos;
    }
};

void check_same_shape(const LabanSeries& a, const LabanSeries& b, const char* what) {
    if (a.frames != b.frames || a.values.size() != b.values.size()) {
        throw DimensionError(std::string("laban series shape mismatch (") + what + "): " +
                             std::to_string(a.frames) + " vs " + std::to_string(b.frames) +
                             " frames");
    }
}

}  // namespace

LabanSeries laban_series(const Motion& motion, const EndEffectorSet& effectors,
                         const SmoothingConfig& smoothing) {
    return FeaturePipeline(motion, effectors, smoothing).series;
}

std::array<double, 4> laban_scalars(const LabanSeries& series) {
    if (series.frames == 0 || series.values.size() != series.frames * 4) {
        throw DimensionError("laban series is empty or malformed");
    }
    std::array<double, 4> out{};
    for (std::size_t c = 0; c < 4; ++c) {
        double best = series.at(0, c);
        for (std::size_t t = 1; t < series.frames; ++t) best = std::max(best, series.at(t, c));
        out[c] = best;
    }
    return out;
}

double laban_loss(const LabanSeries& candidate, const LabanSeries& target,
                  const LabanSeries& baseline, double delta) {
    check_same_shape(candidate, target, "candidate vs target");
    check_same_shape(candidate, baseline, "candidate vs baseline");
    if (!(delta > 0.0)) throw ConfigError("laban loss delta must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < candidate.values.size(); ++i) {
        const double r = (candidate.values[i] - target.values[i]) / (baseline.values[i] + delta);
        sum += r * r;
    }
    return sum;
}

MotionLoss laban_loss_with_grad_motion(const Motion& motion, const LabanSeries& target,
                                       const LabanSeries& baseline,
                                       const EndEffectorSet& effectors,
                                       const SmoothingConfig& smoothing, double delta) {
    FeaturePipeline pipeline(motion, effectors, smoothing);
    check_same_shape(pipeline.series, target, "candidate vs target");
    check_same_shape(pipeline.series, baseline, "candidate vs baseline");
    if (!(delta > 0.0)) throw ConfigError("laban loss delta must be positive");

    MotionLoss out;
    std::vector<double> g_series(pipeline.series.values.size(), 0.0);
    for (std::size_t i = 0; i < g_series.size(); ++i) {
        const double denom = baseline.values[i] + delta;
        const double r = (pipeline.series.values[i] - target.values[i]) / denom;
        out.value += r * r;
        g_series[i] = 2.0 * r / denom;
    }
    out.grad = pipeline.backward(g_series, effectors, smoothing);
    return out;
}

std::vector<double> laban_loss_grad_motion(const Motion& motion, const LabanSeries& target,
                                           const LabanSeries& baseline,
                                           const EndEffectorSet& effectors,
                                           const SmoothingConfig& smoothing, double delta) {
    return laban_loss_with_grad_motion(motion, target, baseline, effectors, smoothing, delta).grad;
}

std::string series_to_csv(const LabanSeries& series) {
    std::ostringstream out;
    out << "frame,weight,time,flow,shape\n";
    for (std::size_t t = 0; t < series.frames; ++t) {
        out << t;
        for (std::size_t c = 0; c < 4; ++c) out << ',' << fmt_double(series.at(t, c));
        out << '\n';
    }
    return out.str();
}

}  // namespace laban
