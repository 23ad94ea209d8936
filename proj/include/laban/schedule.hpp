#pragma once

#include <cstddef>
#include <vector>

namespace laban {

// Cumulative noise coefficients. alpha_bar[0] == 1 exactly and the sequence
// is strictly decreasing in (0, 1].
struct NoiseSchedule {
    int n_steps = 1000;
    double beta_min = 1e-4;
    double beta_max = 2e-2;
    std::vector<double> alpha_bar;  // length n_steps + 1
};

// alpha_bar[t] = prod_{i<=t} (1 - beta_i) with beta linearly spaced.
NoiseSchedule make_schedule(int n_steps = 1000, double beta_min = 1e-4, double beta_max = 2e-2);

// x_t = sqrt(ab_t) * x0 + sqrt(1 - ab_t) * eps.
std::vector<double> forward_diffuse(const std::vector<double>& x0, int t,
                                    const std::vector<double>& eps, const NoiseSchedule& schedule);

// x0_hat = (x_t - sqrt(1 - ab_t) * eps_hat) / sqrt(ab_t).
std::vector<double> predict_x0(const std::vector<double>& x_t, int t,
                               const std::vector<double>& eps_hat, const NoiseSchedule& schedule);

// Deterministic DDIM transition: x_{t_prev} = sqrt(ab_{t_prev}) * x0_hat
//                                           + sqrt(1 - ab_{t_prev}) * eps_hat.
std::vector<double> ddim_step(const std::vector<double>& x_t, int t, int t_prev,
                              const std::vector<double>& eps_hat, const NoiseSchedule& schedule);

// Strictly decreasing timestep list from n_steps down to 0 with the given
// stride (0 is always included).
std::vector<int> make_step_indices(int n_steps, int stride);

// Throws unless the list starts at n_steps, ends at 0 and strictly decreases.
void validate_step_indices(const std::vector<int>& steps, int n_steps);

}  // namespace laban
