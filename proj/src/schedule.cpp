#include "laban/schedule.hpp"

#include <cmath>
#include <string>

#include "laban/errors.hpp"

namespace laban {

namespace {

void check_t(int t, const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.n_steps) {
        throw ConfigError("timestep " + std::to_string(t) + " outside [1, " +
                          std::to_string(schedule.n_steps) + "]");
    }
}

void check_shapes(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": size " + std::to_string(a) + " vs " +
                             std::to_string(b));
    }
}

}  // namespace

NoiseSchedule make_schedule(int n_steps, double beta_min, double beta_max) {
    if (n_steps < 1) throw ConfigError("schedule needs at least one step");
    if (!(beta_min > 0.0) || !(beta_min <= beta_max) || !(beta_max < 1.0)) {
        throw ConfigError("beta range must satisfy 0 < beta_min <= beta_max < 1");
    }
    NoiseSchedule schedule;
    schedule.n_steps = n_steps;
    schedule.beta_min = beta_min;
    schedule.beta_max = beta_max;
    schedule.alpha_bar.assign(static_cast<std::size_t>(n_steps) + 1, 1.0);
    double prod = 1.0;
    for (int t = 1; t <= n_steps; ++t) {
        const double frac = (n_steps == 1) ? 0.0 : static_cast<double>(t - 1) / (n_steps - 1);
        const double beta = beta_min + frac * (beta_max - beta_min);
        prod *= 1.0 - beta;
        schedule.alpha_bar[static_cast<std::size_t>(t)] = prod;
    }
    return schedule;
}

std::vector<double> forward_diffuse(const std::vector<double>& x0, int t,
                                    const std::vector<double>& eps,
                                    const NoiseSchedule& schedule) {
    check_t(t, schedule);
    check_shapes(x0.size(), eps.size(), "forward_diffuse x0 vs eps");
    const double ab = schedule.alpha_bar[static_cast<std::size_t>(t)];
    const double c0 = std::sqrt(ab);
    const double c1 = std::sqrt(1.0 - ab);
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) out[i] = c0 * x0[i] + c1 * eps[i];
    return out;
}

std::vector<double> predict_x0(const std::vector<double>& x_t, int t,
                               const std::vector<double>& eps_hat,
                               const NoiseSchedule& schedule) {
    check_t(t, schedule);
    check_shapes(x_t.size(), eps_hat.size(), "predict_x0 x_t vs eps_hat");
    const double ab = schedule.alpha_bar[static_cast<std::size_t>(t)];
    const double inv = 1.0 / std::sqrt(ab);
    const double c1 = std::sqrt(1.0 - ab);
    std::vector<double> out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) out[i] = (x_t[i] - c1 * eps_hat[i]) * inv;
    return out;
}

std::vector<double> ddim_step(const std::vector<double>& x_t, int t, int t_prev,
                              const std::vector<double>& eps_hat,
                              const NoiseSchedule& schedule) {
    if (!(0 <= t_prev && t_prev < t && t <= schedule.n_steps)) {
        throw ConfigError("ddim step ordering violated: t=" + std::to_string(t) +
                          ", t_prev=" + std::to_string(t_prev));
    }
    const std::vector<double> x0_hat = predict_x0(x_t, t, eps_hat, schedule);
    const double ab_prev = schedule.alpha_bar[static_cast<std::size_t>(t_prev)];
    const double c0 = std::sqrt(ab_prev);
    const double c1 = std::sqrt(1.0 - ab_prev);
    std::vector<double> out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) out[i] = c0 * x0_hat[i] + c1 * eps_hat[i];
    return out;
}

std::vector<int> make_step_indices(int n_steps, int stride) {
    if (stride < 1) throw ConfigError("step stride must be >= 1");
    std::vector<int> steps;
    for (int t = n_steps; t > 0; t -= stride) steps.push_back(t);
    steps.push_back(0);
    return steps;
}

void validate_step_indices(const std::vector<int>& steps, int n_steps) {
    if (steps.size() < 2 || steps.front() != n_steps || steps.back() != 0) {
        throw ConfigError("step indices must run from n_steps down to 0");
    }
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (steps[i] >= steps[i - 1]) throw ConfigError("step indices must strictly decrease");
    }
}

}  // namespace laban
