#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "laban/features.hpp"
#include "laban/model.hpp"
#include "laban/sampler.hpp"

namespace laban {

// Per-channel multipliers on the baseline feature series, ordered
// [Weight, Time, Flow, Shape]; 1.0 leaves a channel untouched.
struct ScaleVector {
    std::array<double, 4> s{1.0, 1.0, 1.0, 1.0};

    bool is_identity() const { return s[0] == 1.0 && s[1] == 1.0 && s[2] == 1.0 && s[3] == 1.0; }
};

// Tag vocabulary: light/strong, sustained/sudden, bound/free, near/far.
// Throws TagError on unknown tags or two tags for one channel.
ScaleVector tags_to_scale(const std::vector<std::string>& tags);

// target[t][i] = s[i] * baseline[t][i].
LabanSeries make_target(const LabanSeries& baseline, const ScaleVector& scale);

struct GuidanceConfig {
    double lr = 0.005;
    double beta1 = 0.7;
    double beta2 = 0.9;
    double delta = 1e-6;
    int steps_per_t = 1;  // K embedding updates per sampling step; 0 disables guidance
    // The paper-stated path re-evaluates the denoiser with the updated
    // embedding before the DDIM transition; turn off to reuse the last
    // prediction from the gradient pass.
    bool recompute_eps = true;
    // Keep Adam moments across sampling steps (fresh-per-step is an ablation).
    bool persist_adam = true;
    // Abort when the per-step loss is non-finite or exceeds this multiple of
    // the first guided step's loss; surfaces runaway learning rates as a
    // NumericInstabilityError instead of returning garbage motion.
    double divergence_factor = 1e6;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// One Adam update with bias correction (eps = 1e-8), in place.
void adam_step(AdamState& state, const std::vector<double>& grad, std::vector<double>& params,
               double lr, double beta1, double beta2);

struct BaselineResult {
    Motion motion;          // unguided sample
    LabanSeries series;     // its Laban features (default smoothing)
    std::vector<double> z;  // initial noise, reused by the guided pass
    std::vector<double> embedding;  // condition embedding e0
};

// Step 1: unguided DDIM run for a condition, establishing the content-aware
// reference features and the latent to restart from.
BaselineResult generate_baseline(const Model& model, int condition_id, std::uint64_t seed,
                                 const std::vector<int>& step_indices,
                                 const SmoothingConfig& smoothing);

struct LossSample {
    int step = 0;  // position in the step list
    int t = 0;     // diffusion timestep
    double loss = 0.0;
};

struct GuidedResult {
    Motion motion;
    std::vector<LossSample> trajectory;
    std::vector<double> embedding;  // final optimized e
};

// Step 2: restarts from z and optimizes the embedding against the target
// series at every sampling step (K Adam updates, then the DDIM transition
// with the updated embedding). When the target equals the baseline series, or
// K = 0, or lr = 0, this is exactly the unguided sampler.
GuidedResult guided_sample(const Model& model, const std::vector<double>& e0,
                           const std::vector<double>& z, const std::vector<int>& step_indices,
                           const LabanSeries& f_target, const LabanSeries& f_tc,
                           const GuidanceConfig& cfg, const SmoothingConfig& smoothing);

// Baseline: Adam directly on the joint positions of a finished motion, no
// diffusion model involved.
Motion raw_frame_update(const Motion& x0, const LabanSeries& f_target, const LabanSeries& f_tc,
                        const EndEffectorSet& effectors, const SmoothingConfig& smoothing,
                        double delta = 1e-6, int steps = 100, double lr = 0.05);

// Baseline: shifts the per-step denoised estimate by -lambda * dL/dx0_hat and
// feeds the shifted estimate into the DDIM transition; the embedding is never
// touched. lambda = 0 reduces to the unguided sampler.
GuidedResult classifier_guided_sample(const Model& model, const std::vector<double>& e0,
                                      const std::vector<double>& z,
                                      const std::vector<int>& step_indices,
                                      const LabanSeries& f_target, const LabanSeries& f_tc,
                                      double lambda, const SmoothingConfig& smoothing,
                                      double delta = 1e-6, double divergence_factor = 1e6);

}  // namespace laban
