#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "laban/denoiser.hpp"
#include "laban/motion.hpp"
#include "laban/schedule.hpp"

namespace laban {

struct DenoiserArch {
    std::size_t motion_dim = 0;
    std::size_t hidden = 128;
    std::size_t d_embed = 16;
    std::size_t time_freqs = 8;  // sin/cos pairs, so 2*time_freqs features
    int n_steps = 1000;          // normalizes t for the time features

    std::size_t time_dim() const { return 2 * time_freqs; }
    std::size_t input_dim() const { return motion_dim + time_dim() + d_embed; }
};

// Two-hidden-layer tanh network over [x_t | time-features(t) | e] plus a
// learned per-condition embedding table, trained jointly.
//
// The network body regresses the clean sample; the output is converted to a
// noise prediction through the exact identity
//     eps_hat = (x_t - sqrt(ab_t) * body) / sqrt(1 - ab_t),
// so the DDIM x0 estimate equals the body output. A plain bottleneck MLP
// cannot carry the near-identity map from x_t to eps that direct noise
// regression needs once hidden < motion_dim.
class ToyDenoiser : public Denoiser {
public:
    ToyDenoiser(const DenoiserArch& arch, std::size_t n_conditions, std::uint64_t seed,
                const NoiseSchedule& schedule);

    std::size_t motion_dim() const override { return arch_.motion_dim; }
    std::size_t embed_dim() const override { return arch_.d_embed; }
    const DenoiserArch& arch() const { return arch_; }
    std::size_t n_conditions() const { return static_cast<std::size_t>(embed_.rows()); }

    std::vector<double> predict(const std::vector<double>& x_t, int t,
                                const std::vector<double>& embedding) const override;
    void vjp(const std::vector<double>& x_t, int t, const std::vector<double>& embedding,
             const std::vector<double>& g_eps, std::vector<double>* g_x,
             std::vector<double>* g_e) const override;

    std::vector<double> condition_embedding(std::size_t condition_id) const;

    std::vector<double> time_features(int t) const;

    // Flat view of every learnable tensor, for checkpoints and equality checks.
    std::vector<double> flatten_parameters() const;
    void load_parameters(const std::vector<double>& flat);

    // Batched forward/backward used by the trainer. Columns of x/eps are
    // samples; returns the mean squared error and applies Adam in place.
    friend class DenoiserTrainer;

private:
    Eigen::VectorXd assemble_input(const std::vector<double>& x_t, int t,
                                   const std::vector<double>& embedding) const;
    // Coefficients of eps_hat = skip(t) * x_t + body_scale(t) * body.
    double skip_coeff(int t) const;
    double body_coeff(int t) const;

    DenoiserArch arch_;
    std::vector<double> alpha_bar_;
    Eigen::MatrixXd w1_, w2_, w3_;
    Eigen::VectorXd b1_, b2_, b3_;
    Eigen::MatrixXd embed_;  // n_conditions x d_embed
};

struct TrainingExample {
    Motion motion;
    int condition_id = 0;
};

struct TrainingConfig {
    int steps = 3000;
    int batch = 32;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 0;
    std::size_t hidden = 128;
    std::size_t d_embed = 16;
    std::size_t time_freqs = 8;
};

struct TrainStats {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> loss_history;  // smoothed minibatch loss, one per 100 steps
};

// Minimizes the eps-prediction MSE over random (t, eps) draws with Adam.
// Deterministic given cfg.seed. Throws DimensionError on heterogeneous motion
// shapes or missing condition coverage.
ToyDenoiser train_denoiser(const std::vector<TrainingExample>& examples,
                           const NoiseSchedule& schedule, const TrainingConfig& cfg,
                           TrainStats* stats = nullptr);

// Mean eps-prediction MSE of the model over fresh seeded (t, eps) draws.
double eps_prediction_mse(const ToyDenoiser& denoiser, const std::vector<TrainingExample>& examples,
                          const NoiseSchedule& schedule, std::uint64_t seed, int draws_per_example = 8);

std::vector<double> flatten_motion(const Motion& motion);
Motion unflatten_motion(const std::vector<double>& flat, const Motion& shape_like);

}  // namespace laban
