#include "laban/denoiser.hpp"

#include "laban/errors.hpp"

namespace laban {

std::vector<double> grad_wrt_embedding(const Denoiser& denoiser, const EpsLossFn& loss_fn,
                                       const std::vector<double>& x_t, int t,
                                       const std::vector<double>& embedding) {
    const std::vector<double> eps_hat = denoiser.predict(x_t, t, embedding);
    const EpsLoss loss = loss_fn(eps_hat);
    if (loss.grad_eps.size() != eps_hat.size()) {
        throw DimensionError("loss gradient size " + std::to_string(loss.grad_eps.size()) +
                             " does not match denoiser output size " +
                             std::to_string(eps_hat.size()));
    }
    std::vector<double> g_e(denoiser.embed_dim(), 0.0);
    denoiser.vjp(x_t, t, embedding, loss.grad_eps, nullptr, &g_e);
    return g_e;
}

}  // namespace laban
