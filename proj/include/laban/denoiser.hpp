#pragma once

#include <functional>
#include <vector>

namespace laban {

// Noise predictor contract: a deterministic map (x_t, t, e) -> eps_hat of the
// same shape as x_t, differentiable in both x_t and e. vjp() exposes exact
// reverse-mode products so callers can differentiate scalar functions of the
// output without finite differences.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual std::size_t motion_dim() const = 0;
    virtual std::size_t embed_dim() const = 0;

    virtual std::vector<double> predict(const std::vector<double>& x_t, int t,
                                        const std::vector<double>& embedding) const = 0;

    // Given g_eps = d(scalar)/d(eps_hat), accumulates d(scalar)/d(x_t) into
    // g_x and d(scalar)/d(embedding) into g_e (either may be null).
    virtual void vjp(const std::vector<double>& x_t, int t, const std::vector<double>& embedding,
                     const std::vector<double>& g_eps, std::vector<double>* g_x,
                     std::vector<double>* g_e) const = 0;
};

// Scalar loss of the predicted noise together with its gradient.
struct EpsLoss {
    double value = 0.0;
    std::vector<double> grad_eps;
};

using EpsLossFn = std::function<EpsLoss(const std::vector<double>& eps_hat)>;

// Exact gradient of loss_fn(denoiser(x_t, t, e)) with respect to e.
std::vector<double> grad_wrt_embedding(const Denoiser& denoiser, const EpsLossFn& loss_fn,
                                       const std::vector<double>& x_t, int t,
                                       const std::vector<double>& embedding);

}  // namespace laban
