#include "laban/motion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "laban/errors.hpp"

namespace laban {

void validate_motion(const Motion& motion) {
    if (motion.frames < 4) {
        throw DimensionError("motion too short: need at least 4 frames, got " +
                             std::to_string(motion.frames));
    }
    if (motion.joint_names.empty()) {
        throw DimensionError("motion has no joints");
    }
    if (motion.fps <= 0.0 || !std::isfinite(motion.fps)) {
        throw DimensionError("motion fps must be positive and finite");
    }
    if (motion.positions.size() != motion.flat_size()) {
        throw DimensionError("position array size " + std::to_string(motion.positions.size()) +
                             " does not match frames*joints*3 = " +
                             std::to_string(motion.flat_size()));
    }
    for (double v : motion.positions) {
        if (!std::isfinite(v)) throw DimensionError("motion contains non-finite positions");
    }
}

void validate_effectors(const EndEffectorSet& effectors, std::size_t joints) {
    if (effectors.indices.empty()) throw DimensionError("end-effector set is empty");
    std::set<std::size_t> seen;
    for (std::size_t idx : effectors.indices) {
        if (idx >= joints) {
            throw DimensionError("end-effector index " + std::to_string(idx) +
                                 " out of range for " + std::to_string(joints) + " joints");
        }
        if (!seen.insert(idx).second) {
            throw DimensionError("duplicate end-effector index " + std::to_string(idx));
        }
    }
}

std::vector<double> gaussian_kernel(int kernel_size, double sigma2) {
    if (kernel_size <= 0 || kernel_size % 2 == 0) {
        throw ConfigError("smoothing kernel size must be odd and positive, got " +
                          std::to_string(kernel_size));
    }
    if (!(sigma2 > 0.0)) {
        throw ConfigError("smoothing sigma2 must be positive");
    }
    const int half = kernel_size / 2;
    std::vector<double> weights(kernel_size);
    double sum = 0.0;
    for (int i = 0; i < kernel_size; ++i) {
        const double offset = static_cast<double>(i - half);
        weights[i] = std::exp(-offset * offset / (2.0 * sigma2));
        sum += weights[i];
    }
    for (double& w : weights) w /= sum;
    return weights;
}

Motion gaussian_smooth(const Motion& motion, const SmoothingConfig& cfg) {
    if (!cfg.enabled) {
        // Kernel parameters are still validated so a bad config cannot hide
        // behind the disabled flag.
        gaussian_kernel(cfg.kernel_size, cfg.sigma2);
        return motion;
    }
    const std::vector<double> weights = gaussian_kernel(cfg.kernel_size, cfg.sigma2);
    const int half = cfg.kernel_size / 2;
    const std::size_t T = motion.frames;
    const std::size_t J = motion.joints();
    const long last = static_cast<long>(T) - 1;

    Motion out = motion;
    for (std::size_t t = 0; t < T; ++t) {
        for (int i = 0; i < cfg.kernel_size; ++i) {
            const long src = std::clamp(static_cast<long>(t) + i - half, 0L, last);
            const double w = weights[static_cast<std::size_t>(i)];
            const double* src_row = &motion.positions[static_cast<std::size_t>(src) * J * 3];
            double* dst_row = &out.positions[t * J * 3];
            if (i == 0) {
                for (std::size_t k = 0; k < J * 3; ++k) dst_row[k] = w * src_row[k];
            } else {
                for (std::size_t k = 0; k < J * 3; ++k) dst_row[k] += w * src_row[k];
            }
        }
    }
    return out;
}

KinematicsSeries kinematics(const Motion& motion) {
    validate_motion(motion);
    const std::size_t T = motion.frames;
    const std::size_t J = motion.joints();
    const std::size_t row = J * 3;

    KinematicsSeries out;
    out.frames = T;
    out.joints = J;
    out.velocity.assign(T * row, 0.0);
    out.acceleration.assign(T * row, 0.0);
    out.jerk.assign(T * row, 0.0);

    for (std::size_t t = 1; t < T; ++t) {
        for (std::size_t k = 0; k < row; ++k) {
            out.velocity[t * row + k] =
                motion.positions[t * row + k] - motion.positions[(t - 1) * row + k];
        }
    }
    for (std::size_t t = 2; t < T; ++t) {
        for (std::size_t k = 0; k < row; ++k) {
            out.acceleration[t * row + k] =
                out.velocity[t * row + k] - out.velocity[(t - 1) * row + k];
        }
    }
    for (std::size_t t = 3; t < T; ++t) {
        for (std::size_t k = 0; k < row; ++k) {
            out.jerk[t * row + k] = out.acceleration[t * row + k] - out.acceleration[(t - 1) * row + k];
        }
    }
    return out;
}

}  // namespace laban
