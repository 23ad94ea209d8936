#include "laban/guidance.hpp"

#include <cmath>
#include <map>

#include "laban/errors.hpp"
#include "laban/rng.hpp"
#include "laban/util.hpp"

namespace laban {

ScaleVector tags_to_scale(const std::vector<std::string>& tags) {
    // tag -> (channel, multiplier)
    static const std::map<std::string, std::pair<std::size_t, double>> table = {
        {"light", {kWeight, 0.5}},    {"strong", {kWeight, 1.5}},
        {"sustained", {kTime, 0.8}},  {"sudden", {kTime, 1.2}},
        {"bound", {kFlow, 0.8}},      {"free", {kFlow, 1.2}},
        {"near", {kShape, 0.5}},      {"far", {kShape, 1.5}},
    };
    ScaleVector scale;
    std::array<bool, 4> assigned{false, false, false, false};
    for (const auto& tag : tags) {
        const auto it = table.find(tag);
        if (it == table.end()) throw TagError("unknown Laban tag '" + tag + "'");
        const auto [channel, value] = it->second;
        if (assigned[channel]) {
            throw TagError("conflicting tags for the " + std::string(channel_name(channel)) +
                           " channel");
        }
        assigned[channel] = true;
        scale.s[channel] = value;
    }
    return scale;
}

LabanSeries make_target(const LabanSeries& baseline, const ScaleVector& scale) {
    LabanSeries target = baseline;
    for (std::size_t t = 0; t < target.frames; ++t)
        for (std::size_t c = 0; c < 4; ++c) target.at(t, c) = scale.s[c] * baseline.at(t, c);
    return target;
}

void adam_step(AdamState& state, const std::vector<double>& grad, std::vector<double>& params,
               double lr, double beta1, double beta2) {
    if (grad.size() != params.size() || state.m.size() != params.size() ||
        state.v.size() != params.size()) {
        throw DimensionError("adam step shape mismatch");
    }
    constexpr double kEps = 1e-8;
    ++state.step;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= lr * m_hat / (std::sqrt(v_hat) + kEps);
    }
}

BaselineResult generate_baseline(const Model& model, int condition_id, std::uint64_t seed,
                                 const std::vector<int>& step_indices,
                                 const SmoothingConfig& smoothing) {
    BaselineResult result;
    result.embedding =
        model.denoiser->condition_embedding(static_cast<std::size_t>(condition_id));
    Rng rng(seed);
    result.z = rng.normal_vector(model.denoiser->motion_dim());
    result.motion = sample_motion(model, result.embedding, result.z, step_indices);
    result.series = laban_series(result.motion, model.skeleton.effectors(), smoothing);
    return result;
}

namespace {

bool same_series(const LabanSeries& a, const LabanSeries& b) {
    return a.frames == b.frames && a.values == b.values;
}

void check_divergence(double loss, double first_loss, double factor, int step, int t, double lr) {
    if (!std::isfinite(loss)) {
        throw NumericInstabilityError("non-finite loss at sampling step " + std::to_string(step) +
                                      " (t=" + std::to_string(t) + ", lr=" + fmt_double(lr) + ")");
    }
    if (loss > factor * std::max(first_loss, 1e-30)) {
        throw NumericInstabilityError(
            "loss diverged at sampling step " + std::to_string(step) + " (t=" + std::to_string(t) +
            "): " + fmt_double(loss) + " vs first-step loss " + fmt_double(first_loss) +
            " (lr=" + fmt_double(lr) + ")");
    }
}

}  // namespace

GuidedResult guided_sample(const Model& model, const std::vector<double>& e0,
                           const std::vector<double>& z, const std::vector<int>& step_indices,
                           const LabanSeries& f_target, const LabanSeries& f_tc,
                           const GuidanceConfig& cfg, const SmoothingConfig& smoothing) {
    const Denoiser& denoiser = *model.denoiser;
    validate_step_indices(step_indices, model.schedule.n_steps);
    if (cfg.steps_per_t < 0) throw ConfigError("steps_per_t must be >= 0");
    if (!(cfg.delta > 0.0)) throw ConfigError("guidance delta must be positive");

    GuidedResult result;
    // Matching target and reference series mean there is nothing to optimize;
    // take the plain sampling path so the output is bit-identical to the
    // unguided baseline. Same for disabled guidance.
    if (same_series(f_target, f_tc) || cfg.steps_per_t == 0 || cfg.lr == 0.0) {
        result.motion = sample_motion(model, e0, z, step_indices);
        result.embedding = e0;
        return result;
    }

    const Motion shape = model.shape_template();
    const EndEffectorSet effectors = model.skeleton.effectors();
    std::vector<double> e = e0;
    AdamState adam(e.size());
    std::vector<double> x = z;
    double first_loss = -1.0;

    for (std::size_t i = 0; i + 1 < step_indices.size(); ++i) {
        const int t = step_indices[i];
        const int t_prev = step_indices[i + 1];
        const double ab = model.schedule.alpha_bar[static_cast<std::size_t>(t)];
        // d(x0_hat)/d(eps_hat) is a uniform scaling.
        const double d_x0_d_eps = -std::sqrt(1.0 - ab) / std::sqrt(ab);

        if (!cfg.persist_adam) adam = AdamState(e.size());

        std::vector<double> eps_hat;
        double step_loss = 0.0;
        for (int k = 0; k < cfg.steps_per_t; ++k) {
            eps_hat = denoiser.predict(x, t, e);
            const std::vector<double> x0_hat = predict_x0(x, t, eps_hat, model.schedule);
            const Motion candidate = unflatten_motion(x0_hat, shape);
            const MotionLoss loss = laban_loss_with_grad_motion(candidate, f_target, f_tc,
                                                                effectors, smoothing, cfg.delta);
            if (k == 0) step_loss = loss.value;
            if (first_loss < 0.0) first_loss = loss.value;
            check_divergence(loss.value, first_loss, cfg.divergence_factor,
                             static_cast<int>(i), t, cfg.lr);

            std::vector<double> g_eps(loss.grad.size());
            for (std::size_t n = 0; n < g_eps.size(); ++n) g_eps[n] = loss.grad[n] * d_x0_d_eps;
            std::vector<double> g_e;
            denoiser.vjp(x, t, e, g_eps, nullptr, &g_e);
            adam_step(adam, g_e, e, cfg.lr, cfg.beta1, cfg.beta2);
        }
        result.trajectory.push_back({static_cast<int>(i), t, step_loss});

        if (cfg.recompute_eps) eps_hat = denoiser.predict(x, t, e);
        x = ddim_step(x, t, t_prev, eps_hat, model.schedule);
    }

    result.motion = unflatten_motion(x, shape);
    result.embedding = e;
    return result;
}

Motion raw_frame_update(const Motion& x0, const LabanSeries& f_target, const LabanSeries& f_tc,
                        const EndEffectorSet& effectors, const SmoothingConfig& smoothing,
                        double delta, int steps, double lr) {
    if (steps < 0) throw ConfigError("raw frame update steps must be >= 0");
    Motion motion = x0;
    AdamState adam(motion.positions.size());
    for (int k = 0; k < steps; ++k) {
        const MotionLoss loss =
            laban_loss_with_grad_motion(motion, f_target, f_tc, effectors, smoothing, delta);
        if (!std::isfinite(loss.value)) {
            throw NumericInstabilityError("non-finite loss at raw-frame step " +
                                          std::to_string(k) + " (lr=" + fmt_double(lr) + ")");
        }
        adam_step(adam, loss.grad, motion.positions, lr, 0.7, 0.9);
    }
    return motion;
}

GuidedResult classifier_guided_sample(const Model& model, const std::vector<double>& e0,
                                      const std::vector<double>& z,
                                      const std::vector<int>& step_indices,
                                      const LabanSeries& f_target, const LabanSeries& f_tc,
                                      double lambda, const SmoothingConfig& smoothing,
                                      double delta, double divergence_factor) {
    const Denoiser& denoiser = *model.denoiser;
    validate_step_indices(step_indices, model.schedule.n_steps);

    GuidedResult result;
    if (lambda == 0.0) {
        result.motion = sample_motion(model, e0, z, step_indices);
        result.embedding = e0;
        return result;
    }

    const Motion shape = model.shape_template();
    const EndEffectorSet effectors = model.skeleton.effectors();
    std::vector<double> x = z;
    double first_loss = -1.0;

    for (std::size_t i = 0; i + 1 < step_indices.size(); ++i) {
        const int t = step_indices[i];
        const int t_prev = step_indices[i + 1];
        const std::vector<double> eps_hat = denoiser.predict(x, t, e0);
        std::vector<double> x0_hat = predict_x0(x, t, eps_hat, model.schedule);

        const Motion candidate = unflatten_motion(x0_hat, shape);
        const MotionLoss loss =
            laban_loss_with_grad_motion(candidate, f_target, f_tc, effectors, smoothing, delta);
        if (first_loss < 0.0) first_loss = loss.value;
        check_divergence(loss.value, first_loss, divergence_factor, static_cast<int>(i), t,
                         lambda);
        result.trajectory.push_back({static_cast<int>(i), t, loss.value});

        for (std::size_t n = 0; n < x0_hat.size(); ++n) x0_hat[n] -= lambda * loss.grad[n];

        const double ab_prev = model.schedule.alpha_bar[static_cast<std::size_t>(t_prev)];
        const double c0 = std::sqrt(ab_prev);
        const double c1 = std::sqrt(1.0 - ab_prev);
        for (std::size_t n = 0; n < x.size(); ++n) x[n] = c0 * x0_hat[n] + c1 * eps_hat[n];
    }

    result.motion = unflatten_motion(x, shape);
    result.embedding = e0;
    return result;
}

}  // namespace laban
