#pragma once

#include <vector>

#include "laban/denoiser.hpp"
#include "laban/model.hpp"
#include "laban/schedule.hpp"

namespace laban {

// Deterministic DDIM chain from x_T = z down the step list; returns flat x_0.
// Identical (denoiser, e, z, steps) give bit-identical output.
std::vector<double> sample(const Denoiser& denoiser, const std::vector<double>& embedding,
                           const std::vector<double>& z, const NoiseSchedule& schedule,
                           const std::vector<int>& step_indices);

// Same chain, reshaped through the model's skeleton metadata.
Motion sample_motion(const Model& model, const std::vector<double>& embedding,
                     const std::vector<double>& z, const std::vector<int>& step_indices);

}  // namespace laban
