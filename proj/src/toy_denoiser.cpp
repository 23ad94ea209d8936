#include "laban/toy_denoiser.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "laban/errors.hpp"
#include "laban/rng.hpp"
#include "laban/util.hpp"

namespace laban {

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scale * rng.normal();
    return m;
}

}  // namespace

ToyDenoiser::ToyDenoiser(const DenoiserArch& arch, std::size_t n_conditions, std::uint64_t seed,
                         const NoiseSchedule& schedule)
    : arch_(arch), alpha_bar_(schedule.alpha_bar) {
    if (arch.motion_dim == 0 || arch.hidden == 0 || arch.d_embed == 0) {
        throw ConfigError("denoiser dimensions must be positive");
    }
    if (schedule.n_steps != arch.n_steps ||
        alpha_bar_.size() != static_cast<std::size_t>(arch.n_steps) + 1) {
        throw ConfigError("denoiser schedule does not match arch.n_steps");
    }
    Rng rng(seed);
    const auto in = static_cast<Eigen::Index>(arch_.input_dim());
    const auto h = static_cast<Eigen::Index>(arch_.hidden);
    const auto out = static_cast<Eigen::Index>(arch_.motion_dim);
    w1_ = random_matrix(h, in, 1.0 / std::sqrt(static_cast<double>(in)), rng);
    b1_ = Eigen::VectorXd::Zero(h);
    w2_ = random_matrix(h, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
    b2_ = Eigen::VectorXd::Zero(h);
    w3_ = random_matrix(out, h, 1.0 / std::sqrt(static_cast<double>(h)), rng);
    b3_ = Eigen::VectorXd::Zero(out);
    embed_ = random_matrix(static_cast<Eigen::Index>(n_conditions),
                           static_cast<Eigen::Index>(arch_.d_embed),
                           1.0 / std::sqrt(static_cast<double>(arch_.d_embed)), rng);
}

std::vector<double> ToyDenoiser::time_features(int t) const {
    const double tau = static_cast<double>(t) / static_cast<double>(arch_.n_steps);
    std::vector<double> feats(arch_.time_dim());
    double freq = std::numbers::pi;
    for (std::size_t i = 0; i < arch_.time_freqs; ++i) {
        feats[2 * i] = std::sin(freq * tau);
        feats[2 * i + 1] = std::cos(freq * tau);
        freq *= 2.0;
    }
    return feats;
}

Eigen::VectorXd ToyDenoiser::assemble_input(const std::vector<double>& x_t, int t,
                                            const std::vector<double>& embedding) const {
    if (x_t.size() != arch_.motion_dim) {
        throw DimensionError("denoiser input size " + std::to_string(x_t.size()) +
                             ", expected " + std::to_string(arch_.motion_dim));
    }
    if (embedding.size() != arch_.d_embed) {
        throw DimensionError("embedding size " + std::to_string(embedding.size()) +
                             ", expected " + std::to_string(arch_.d_embed));
    }
    Eigen::VectorXd u(static_cast<Eigen::Index>(arch_.input_dim()));
    const std::vector<double> feats = time_features(t);
    Eigen::Index k = 0;
    for (double v : x_t) u(k++) = v;
    for (double v : feats) u(k++) = v;
    for (double v : embedding) u(k++) = v;
    return u;
}

double ToyDenoiser::skip_coeff(int t) const {
    if (t < 1 || t > arch_.n_steps) {
        throw ConfigError("denoiser timestep " + std::to_string(t) + " outside [1, " +
                          std::to_string(arch_.n_steps) + "]");
    }
    return 1.0 / std::sqrt(1.0 - alpha_bar_[static_cast<std::size_t>(t)]);
}

double ToyDenoiser::body_coeff(int t) const {
    const double ab = alpha_bar_[static_cast<std::size_t>(t)];
    return -std::sqrt(ab) / std::sqrt(1.0 - ab);
}

std::vector<double> ToyDenoiser::predict(const std::vector<double>& x_t, int t,
                                         const std::vector<double>& embedding) const {
    const double skip = skip_coeff(t);
    const double scale = body_coeff(t);
    const Eigen::VectorXd u = assemble_input(x_t, t, embedding);
    const Eigen::VectorXd h1 = ((w1_ * u) + b1_).array().tanh();
    const Eigen::VectorXd h2 = ((w2_ * h1) + b2_).array().tanh();
    const Eigen::VectorXd y = (w3_ * h2) + b3_;
    std::vector<double> eps(x_t.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        eps[i] = skip * x_t[i] + scale * y(static_cast<Eigen::Index>(i));
    }
    return eps;
}

void ToyDenoiser::vjp(const std::vector<double>& x_t, int t, const std::vector<double>& embedding,
                      const std::vector<double>& g_eps, std::vector<double>* g_x,
                      std::vector<double>* g_e) const {
    if (g_eps.size() != arch_.motion_dim) {
        throw DimensionError("vjp adjoint size mismatch");
    }
    const Eigen::VectorXd u = assemble_input(x_t, t, embedding);
    const Eigen::VectorXd h1 = ((w1_ * u) + b1_).array().tanh();
    const Eigen::VectorXd h2 = ((w2_ * h1) + b2_).array().tanh();

    const Eigen::Map<const Eigen::VectorXd> gy(g_eps.data(),
                                               static_cast<Eigen::Index>(g_eps.size()));
    const Eigen::VectorXd gz2 =
        (w3_.transpose() * gy).cwiseProduct((1.0 - h2.array().square()).matrix());
    const Eigen::VectorXd gz1 =
        (w2_.transpose() * gz2).cwiseProduct((1.0 - h1.array().square()).matrix());
    const Eigen::VectorXd gu = w1_.transpose() * gz1;

    if (g_x) {
        g_x->assign(arch_.motion_dim, 0.0);
        for (std::size_t i = 0; i < arch_.motion_dim; ++i)
            (*g_x)[i] = gu(static_cast<Eigen::Index>(i));
    }
    if (g_e) {
        g_e->assign(arch_.d_embed, 0.0);
        const std::size_t offset = arch_.motion_dim + arch_.time_dim();
        for (std::size_t i = 0; i < arch_.d_embed; ++i)
            (*g_e)[i] = gu(static_cast<Eigen::Index>(offset + i));
    }
}

std::vector<double> ToyDenoiser::condition_embedding(std::size_t condition_id) const {
    if (condition_id >= n_conditions()) {
        throw ConfigError("unknown condition id " + std::to_string(condition_id) + " (table has " +
                          std::to_string(n_conditions()) + " entries)");
    }
    std::vector<double> e(arch_.d_embed);
    for (std::size_t i = 0; i < arch_.d_embed; ++i)
        e[i] = embed_(static_cast<Eigen::Index>(condition_id), static_cast<Eigen::Index>(i));
    return e;
}

std::vector<double> ToyDenoiser::flatten_parameters() const {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w1_.size() + b1_.size() + w2_.size() + b2_.size() +
                                          w3_.size() + b3_.size() + embed_.size()));
    auto append = [&flat](const auto& m) {
        flat.insert(flat.end(), m.data(), m.data() + m.size());
    };
    append(w1_); append(b1_); append(w2_); append(b2_); append(w3_); append(b3_); append(embed_);
    return flat;
}

void ToyDenoiser::load_parameters(const std::vector<double>& flat) {
    const std::size_t expected = static_cast<std::size_t>(
        w1_.size() + b1_.size() + w2_.size() + b2_.size() + w3_.size() + b3_.size() + embed_.size());
    if (flat.size() != expected) {
        throw DimensionError("parameter blob size " + std::to_string(flat.size()) +
                             ", expected " + std::to_string(expected));
    }
    const double* p = flat.data();
    auto read = [&p](auto& m) {
        std::copy(p, p + m.size(), m.data());
        p += m.size();
    };
    read(w1_); read(b1_); read(w2_); read(b2_); read(w3_); read(b3_); read(embed_);
}

std::vector<double> flatten_motion(const Motion& motion) {
    return motion.positions;
}

Motion unflatten_motion(const std::vector<double>& flat, const Motion& shape_like) {
    if (flat.size() != shape_like.flat_size()) {
        throw DimensionError("flat motion size " + std::to_string(flat.size()) +
                             " does not match template " + std::to_string(shape_like.flat_size()));
    }
    Motion out = shape_like;
    out.positions = flat;
    return out;
}

// ---------------------------------------------------------------------------
// Training

class DenoiserTrainer {
public:
    DenoiserTrainer(ToyDenoiser& net, const TrainingConfig& cfg)
        : net_(net), lr_(cfg.lr), beta1_(cfg.beta1), beta2_(cfg.beta2) {
        init_moments(m_w1_, v_w1_, net.w1_);
        init_moments(m_b1_, v_b1_, net.b1_);
        init_moments(m_w2_, v_w2_, net.w2_);
        init_moments(m_b2_, v_b2_, net.b2_);
        init_moments(m_w3_, v_w3_, net.w3_);
        init_moments(m_b3_, v_b3_, net.b3_);
        init_moments(m_embed_, v_embed_, net.embed_);
    }

    // One minibatch step; columns of inputs/targets are samples. Returns the
    // minibatch MSE (mean over batch and output dims).
    double step(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                const std::vector<int>& condition_ids) {
        const auto batch = inputs.cols();
        const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(1, batch);

        const Eigen::MatrixXd h1 = ((net_.w1_ * inputs) + net_.b1_ * ones).array().tanh();
        const Eigen::MatrixXd h2 = ((net_.w2_ * h1) + net_.b2_ * ones).array().tanh();
        const Eigen::MatrixXd y = (net_.w3_ * h2) + net_.b3_ * ones;

        const Eigen::MatrixXd diff = y - targets;
        const double denom = static_cast<double>(diff.size());
        const double loss = diff.squaredNorm() / denom;

        const Eigen::MatrixXd gy = (2.0 / denom) * diff;
        const Eigen::MatrixXd gz2 =
            (net_.w3_.transpose() * gy).cwiseProduct((1.0 - h2.array().square()).matrix());
        const Eigen::MatrixXd gz1 =
            (net_.w2_.transpose() * gz2).cwiseProduct((1.0 - h1.array().square()).matrix());
        const Eigen::MatrixXd gu = net_.w1_.transpose() * gz1;

        const Eigen::MatrixXd g_w3 = gy * h2.transpose();
        const Eigen::VectorXd g_b3 = gy.rowwise().sum();
        const Eigen::MatrixXd g_w2 = gz2 * h1.transpose();
        const Eigen::VectorXd g_b2 = gz2.rowwise().sum();
        const Eigen::MatrixXd g_w1 = gz1 * inputs.transpose();
        const Eigen::VectorXd g_b1 = gz1.rowwise().sum();

        Eigen::MatrixXd g_embed = Eigen::MatrixXd::Zero(net_.embed_.rows(), net_.embed_.cols());
        const auto offset = static_cast<Eigen::Index>(net_.arch_.motion_dim + net_.arch_.time_dim());
        const auto d_embed = static_cast<Eigen::Index>(net_.arch_.d_embed);
        for (Eigen::Index s = 0; s < batch; ++s) {
            g_embed.row(condition_ids[static_cast<std::size_t>(s)]) +=
                gu.col(s).segment(offset, d_embed).transpose();
        }

        ++step_count_;
        adam(net_.w1_, g_w1, m_w1_, v_w1_);
        adam(net_.b1_, g_b1, m_b1_, v_b1_);
        adam(net_.w2_, g_w2, m_w2_, v_w2_);
        adam(net_.b2_, g_b2, m_b2_, v_b2_);
        adam(net_.w3_, g_w3, m_w3_, v_w3_);
        adam(net_.b3_, g_b3, m_b3_, v_b3_);
        adam(net_.embed_, g_embed, m_embed_, v_embed_);
        return loss;
    }

private:
    template <typename M>
    static void init_moments(M& m, M& v, const M& like) {
        m = M::Zero(like.rows(), like.cols());
        v = M::Zero(like.rows(), like.cols());
    }

    template <typename M>
    void adam(M& param, const M& grad, M& m, M& v) {
        m = beta1_ * m + (1.0 - beta1_) * grad;
        v = beta2_ * v + (1.0 - beta2_) * grad.cwiseProduct(grad);
        const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
        const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
        param.array() -=
            lr_ * (m.array() / bc1) / ((v.array() / bc2).sqrt() + 1e-8);
    }

    ToyDenoiser& net_;
    double lr_, beta1_, beta2_;
    long step_count_ = 0;
    Eigen::MatrixXd m_w1_, v_w1_, m_w2_, v_w2_, m_w3_, v_w3_, m_embed_, v_embed_;
    Eigen::VectorXd m_b1_, v_b1_, m_b2_, v_b2_, m_b3_, v_b3_;
};

namespace {

struct PreparedData {
    std::size_t motion_dim = 0;
    std::size_t n_conditions = 0;
    std::vector<Eigen::VectorXd> x0;
    std::vector<int> condition_ids;
};

PreparedData prepare(const std::vector<TrainingExample>& examples) {
    if (examples.empty()) throw DimensionError("training set is empty");
    PreparedData data;
    data.motion_dim = examples.front().motion.flat_size();
    const std::size_t T = examples.front().motion.frames;
    const std::size_t J = examples.front().motion.joints();
    int max_id = 0;
    for (const auto& ex : examples) {
        if (ex.motion.frames != T || ex.motion.joints() != J) {
            throw DimensionError("training set has heterogeneous motion shapes");
        }
        if (ex.condition_id < 0) throw DimensionError("negative condition id");
        max_id = std::max(max_id, ex.condition_id);
        Eigen::VectorXd v(static_cast<Eigen::Index>(data.motion_dim));
        for (std::size_t i = 0; i < data.motion_dim; ++i)
            v(static_cast<Eigen::Index>(i)) = ex.motion.positions[i];
        data.x0.push_back(std::move(v));
        data.condition_ids.push_back(ex.condition_id);
    }
    data.n_conditions = static_cast<std::size_t>(max_id) + 1;
    return data;
}

}  // namespace

ToyDenoiser train_denoiser(const std::vector<TrainingExample>& examples,
                           const NoiseSchedule& schedule, const TrainingConfig& cfg,
                           TrainStats* stats) {
    const PreparedData data = prepare(examples);

    DenoiserArch arch;
    arch.motion_dim = data.motion_dim;
    arch.hidden = cfg.hidden;
    arch.d_embed = cfg.d_embed;
    arch.time_freqs = cfg.time_freqs;
    arch.n_steps = schedule.n_steps;

    ToyDenoiser net(arch, data.n_conditions, cfg.seed);
    if (cfg.steps <= 0) return net;

    DenoiserTrainer trainer(net, cfg);
    Rng rng(derive_seed(cfg.seed, 0x7261696eULL));

    const auto in_dim = static_cast<Eigen::Index>(arch.input_dim());
    const auto out_dim = static_cast<Eigen::Index>(arch.motion_dim);
    const int batch = std::max(1, cfg.batch);
    Eigen::MatrixXd inputs(in_dim, batch);
    Eigen::MatrixXd targets(out_dim, batch);
    std::vector<int> batch_conditions(static_cast<std::size_t>(batch));

    double running = 0.0;
    int running_n = 0;
    if (stats) *stats = TrainStats{};

    for (int step = 0; step < cfg.steps; ++step) {
        for (int s = 0; s < batch; ++s) {
            const std::size_t idx = rng.uniform_index(data.x0.size());
            const int t = 1 + static_cast<int>(rng.uniform_index(
                                  static_cast<std::uint64_t>(schedule.n_steps)));
            const int cond = data.condition_ids[idx];
            batch_conditions[static_cast<std::size_t>(s)] = cond;

            const double ab = schedule.alpha_bar[static_cast<std::size_t>(t)];
            const double c0 = std::sqrt(ab);
            const double c1 = std::sqrt(1.0 - ab);
            const std::vector<double> feats = net.time_features(t);
            const std::vector<double> e = net.condition_embedding(static_cast<std::size_t>(cond));

            Eigen::Index k = 0;
            for (Eigen::Index i = 0; i < out_dim; ++i) {
                const double eps = rng.normal();
                targets(i, s) = eps;
                inputs(k++, s) = c0 * data.x0[idx](i) + c1 * eps;
            }
            for (double v : feats) inputs(k++, s) = v;
            for (double v : e) inputs(k++, s) = v;
        }
        const double loss = trainer.step(inputs, targets, batch_conditions);
        if (stats) {
            if (step == 0) stats->initial_loss = loss;
            stats->final_loss = loss;
            running += loss;
            ++running_n;
            if ((step + 1) % 100 == 0) {
                stats->loss_history.push_back(running / running_n);
                running = 0.0;
                running_n = 0;
            }
        }
        if ((step + 1) % 500 == 0) {
            log_info("train step " + std::to_string(step + 1) + "/" + std::to_string(cfg.steps) +
                     " minibatch mse " + fmt_double(loss));
        }
    }
    return net;
}

double eps_prediction_mse(const ToyDenoiser& denoiser, const std::vector<TrainingExample>& examples,
                          const NoiseSchedule& schedule, std::uint64_t seed,
                          int draws_per_example) {
    const PreparedData data = prepare(examples);
    if (data.motion_dim != denoiser.motion_dim()) {
        throw DimensionError("evaluation motions do not match the denoiser input width");
    }
    Rng rng(seed);
    double total = 0.0;
    std::size_t count = 0;
    std::vector<double> x_t(data.motion_dim);
    for (std::size_t idx = 0; idx < data.x0.size(); ++idx) {
        const auto cond = static_cast<std::size_t>(data.condition_ids[idx]);
        const std::vector<double> e = denoiser.condition_embedding(cond);
        for (int d = 0; d < draws_per_example; ++d) {
            const int t = 1 + static_cast<int>(rng.uniform_index(
                                  static_cast<std::uint64_t>(schedule.n_steps)));
            const double ab = schedule.alpha_bar[static_cast<std::size_t>(t)];
            const double c0 = std::sqrt(ab);
            const double c1 = std::sqrt(1.0 - ab);
            std::vector<double> eps(data.motion_dim);
            for (std::size_t i = 0; i < data.motion_dim; ++i) {
                eps[i] = rng.normal();
                x_t[i] = c0 * data.x0[idx](static_cast<Eigen::Index>(i)) + c1 * eps[i];
            }
            const std::vector<double> pred = denoiser.predict(x_t, t, e);
            for (std::size_t i = 0; i < data.motion_dim; ++i) {
                const double d2 = pred[i] - eps[i];
                total += d2 * d2;
            }
            count += data.motion_dim;
        }
    }
    return total / static_cast<double>(count);
}

}  // namespace laban
