#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace laban {

// A fixed-rate sequence of 3D joint positions (meters). Storage is row-major
// frames x joints x 3.
struct Motion {
    double fps = 20.0;
    std::vector<std::string> joint_names;
    std::size_t frames = 0;
    std::vector<double> positions;  // frames * joints * 3

    std::size_t joints() const { return joint_names.size(); }
    std::size_t flat_size() const { return frames * joints() * 3; }

    double& at(std::size_t t, std::size_t j, std::size_t d) {
        return positions[(t * joints() + j) * 3 + d];
    }
    double at(std::size_t t, std::size_t j, std::size_t d) const {
        return positions[(t * joints() + j) * 3 + d];
    }
};

// Throws DimensionError unless frames >= 4, joints >= 1, the position array
// matches the declared shape and every value is finite.
void validate_motion(const Motion& motion);

// Joint subset the Effort channels sum over.
struct EndEffectorSet {
    std::vector<std::size_t> indices;
};

// Throws DimensionError if the set is empty, has duplicates, or references a
// joint outside the skeleton.
void validate_effectors(const EndEffectorSet& effectors, std::size_t joints);

// Per-frame first differences; frames before a derivative is defined are zero.
struct KinematicsSeries {
    std::size_t frames = 0;
    std::size_t joints = 0;
    std::vector<double> velocity;      // m/frame
    std::vector<double> acceleration;  // m/frame^2
    std::vector<double> jerk;          // m/frame^3
};

struct SmoothingConfig {
    int kernel_size = 11;
    double sigma2 = 10.0;
    bool enabled = true;
};

// Normalized Gaussian kernel of the given size and variance (weights sum to 1).
// Throws ConfigError for even/non-positive size or non-positive sigma2.
std::vector<double> gaussian_kernel(int kernel_size, double sigma2);

// Convolves each joint coordinate's time series with the normalized kernel,
// replicate-padded at both ends. Disabled config returns the input unchanged.
Motion gaussian_smooth(const Motion& motion, const SmoothingConfig& cfg);

// v_t = x_t - x_{t-1}, a_t = v_t - v_{t-1}, j_t = a_t - a_{t-1}, zero-padded
// at t < 1, 2, 3 respectively. No smoothing is applied here; callers smooth
// positions first.
KinematicsSeries kinematics(const Motion& motion);

}  // namespace laban
