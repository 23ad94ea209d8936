#include "laban/sampler.hpp"

#include "laban/errors.hpp"

namespace laban {

std::vector<double> sample(const Denoiser& denoiser, const std::vector<double>& embedding,
                           const std::vector<double>& z, const NoiseSchedule& schedule,
                           const std::vector<int>& step_indices) {
    validate_step_indices(step_indices, schedule.n_steps);
    if (z.size() != denoiser.motion_dim()) {
        throw DimensionError("initial noise size " + std::to_string(z.size()) +
                             " does not match denoiser width " +
                             std::to_string(denoiser.motion_dim()));
    }
    std::vector<double> x = z;
    for (std::size_t i = 0; i + 1 < step_indices.size(); ++i) {
        const int t = step_indices[i];
        const int t_prev = step_indices[i + 1];
        const std::vector<double> eps_hat = denoiser.predict(x, t, embedding);
        x = ddim_step(x, t, t_prev, eps_hat, schedule);
    }
    return x;
}

Motion sample_motion(const Model& model, const std::vector<double>& embedding,
                     const std::vector<double>& z, const std::vector<int>& step_indices) {
    const std::vector<double> x0 = sample(*model.denoiser, embedding, z, model.schedule,
                                          step_indices);
    return unflatten_motion(x0, model.shape_template());
}

}  // namespace laban
