#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "laban/motion.hpp"

namespace laban {

// Channel order of every 4-wide feature array in this library.
inline constexpr std::size_t kWeight = 0;  // sum of squared effector velocity norms
inline constexpr std::size_t kTime = 1;    // sum of effector acceleration norms
inline constexpr std::size_t kFlow = 2;    // sum of effector jerk norms
inline constexpr std::size_t kShape = 3;   // bounding-box volume of the whole skeleton

const char* channel_name(std::size_t channel);

// Softening constant inside acceleration/jerk norms: |z| = sqrt(z.z + kNormEps)
// keeps the gradient defined at zero. Channels whose derivative frames exist
// but are identically zero therefore sit at n_effectors * 1e-6 rather than 0.
inline constexpr double kNormEps = 1e-12;

// Per-frame 4-channel feature series [Weight, Time, Flow, Shape].
struct LabanSeries {
    std::size_t frames = 0;
    std::vector<double> values;  // frames * 4

    double& at(std::size_t t, std::size_t c) { return values[t * 4 + c]; }
    double at(std::size_t t, std::size_t c) const { return values[t * 4 + c]; }
};

// Smooths positions per config, differentiates, then reduces over effectors.
// Frames where a derivative is undefined contribute an exact zero to its
// channel. The Shape channel is the axis-aligned bounding-box volume over all
// joints of the smoothed positions.
LabanSeries laban_series(const Motion& motion, const EndEffectorSet& effectors,
                         const SmoothingConfig& smoothing);

// Max over frames per channel. Used for evaluation, never for guidance.
std::array<double, 4> laban_scalars(const LabanSeries& series);

// Sum over all frames and channels of ((candidate - target) / (baseline + delta))^2.
double laban_loss(const LabanSeries& candidate, const LabanSeries& target,
                  const LabanSeries& baseline, double delta);

struct MotionLoss {
    double value = 0.0;
    std::vector<double> grad;  // frames * joints * 3, d(loss)/d(positions)
};

// Loss value plus its exact gradient with respect to the raw joint positions,
// back-propagated through smoothing, the finite differences, the softened
// norms and the bounding box. Min/max send their gradient to the single
// extremal joint; ties go to the lowest joint index.
MotionLoss laban_loss_with_grad_motion(const Motion& motion, const LabanSeries& target,
                                       const LabanSeries& baseline,
                                       const EndEffectorSet& effectors,
                                       const SmoothingConfig& smoothing, double delta);

std::vector<double> laban_loss_grad_motion(const Motion& motion, const LabanSeries& target,
                                           const LabanSeries& baseline,
                                           const EndEffectorSet& effectors,
                                           const SmoothingConfig& smoothing, double delta);

// CSV with header frame,weight,time,flow,shape.
std::string series_to_csv(const LabanSeries& series);

}  // namespace laban
