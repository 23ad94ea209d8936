// Command-line front end: dataset generation, denoiser training, baseline and
// guided sampling, feature analysis, controllability evaluation and gradient
// checks. Exit codes: 0 success, 2 config/input error, 3 numeric instability,
// 4 degenerate evaluation, 1 unexpected failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "laban/errors.hpp"
#include "laban/evaluation.hpp"
#include "laban/features.hpp"
#include "laban/guidance.hpp"
#include "laban/io.hpp"
#include "laban/rng.hpp"
#include "laban/sampler.hpp"
#include "laban/synthetic.hpp"
#include "laban/toy_denoiser.hpp"
#include "laban/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace laban;

namespace {

struct GuideOpts {
    std::string checkpoint = "checkpoint.json";
    std::string out_dir = "guide_out";
    int condition = 0;
    std::uint64_t seed = 1;
    int stride = 20;
    std::string method = "laban";
    std::string tags;                 // comma-separated
    std::vector<std::string> scales;  // component=value
    double lr = 0.005;
    std::string betas = "0.7,0.9";
    double delta = 1e-6;
    int k = 1;
    bool no_recompute_eps = false;
    bool reset_adam = false;
    double divergence_factor = 1e6;
    double lambda = 0.005;
    int raw_steps = 100;
    double raw_lr = 0.05;
    int kernel_size = 11;
    double sigma2 = 10.0;
    bool no_smoothing = false;
};

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::pair<double, double> parse_betas(const std::string& text) {
    const auto parts = split_csv(text);
    if (parts.size() != 2) throw ConfigError("--betas expects two comma-separated values");
    try {
        return {std::stod(parts[0]), std::stod(parts[1])};
    } catch (const std::exception&) {
        throw ConfigError("--betas values must be numbers, got '" + text + "'");
    }
}

ScaleVector scale_from_opts(const GuideOpts& opts) {
    ScaleVector scale = tags_to_scale(split_csv(opts.tags));
    for (const std::string& kv : opts.scales) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--scale expects component=value, got '" + kv + "'");
        }
        const std::string component = kv.substr(0, eq);
        double value = 0.0;
        try {
            value = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("--scale value in '" + kv + "' is not a number");
        }
        if (!(value > 0.0)) throw ConfigError("scale components must be positive");
        bool known = false;
        for (std::size_t c = 0; c < 4; ++c) {
            if (component == channel_name(c)) {
                scale.s[c] = value;
                known = true;
            }
        }
        if (!known) {
            throw ConfigError("unknown scale component '" + component +
                              "' (expected weight, time, flow or shape)");
        }
    }
    return scale;
}

SmoothingConfig smoothing_from_opts(const GuideOpts& opts) {
    SmoothingConfig cfg;
    cfg.kernel_size = opts.kernel_size;
    cfg.sigma2 = opts.sigma2;
    cfg.enabled = !opts.no_smoothing;
    gaussian_kernel(cfg.kernel_size, cfg.sigma2);  // validate eagerly
    return cfg;
}

GuidanceConfig guidance_from_opts(const GuideOpts& opts) {
    GuidanceConfig cfg;
    cfg.lr = opts.lr;
    std::tie(cfg.beta1, cfg.beta2) = parse_betas(opts.betas);
    cfg.delta = opts.delta;
    cfg.steps_per_t = opts.k;
    cfg.recompute_eps = !opts.no_recompute_eps;
    cfg.persist_adam = !opts.reset_adam;
    cfg.divergence_factor = opts.divergence_factor;
    if (!(cfg.delta > 0.0)) throw ConfigError("--delta must be positive");
    if (cfg.lr < 0.0) throw ConfigError("--lr must be non-negative");
    if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
    return cfg;
}

Model load_model_checked(const std::string& path) {
    if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path);
    return load_model(path);
}

json guidance_to_json(const GuidanceConfig& cfg) {
    json doc;
    doc["lr"] = cfg.lr;
    doc["beta1"] = cfg.beta1;
    doc["beta2"] = cfg.beta2;
    doc["delta"] = cfg.delta;
    doc["steps_per_t"] = cfg.steps_per_t;
    doc["recompute_eps"] = cfg.recompute_eps;
    doc["persist_adam"] = cfg.persist_adam;
    doc["divergence_factor"] = cfg.divergence_factor;
    return doc;
}

json smoothing_to_json(const SmoothingConfig& cfg) {
    json doc;
    doc["kernel_size"] = cfg.kernel_size;
    doc["sigma2"] = cfg.sigma2;
    doc["enabled"] = cfg.enabled;
    return doc;
}

// ---------------------------------------------------------------------------

int cmd_dataset(const std::string& out, int per_condition, std::size_t frames, double fps,
                std::uint64_t seed) {
    const auto spec = default_corpus_spec(per_condition);
    const Dataset dataset = gen_dataset(spec, frames, fps, seed);
    save_dataset(out, dataset);
    std::cout << "wrote " << dataset.records.size() << " motions over " << spec.size()
              << " conditions to " << out << "\n";
    return 0;
}

int cmd_train(const std::string& dataset_path, const std::string& out, TrainingConfig cfg,
              int n_steps, double beta_min, double beta_max) {
    if (!fs::exists(dataset_path)) throw ConfigError("dataset not found: " + dataset_path);
    const Dataset dataset = load_dataset(dataset_path);
    std::vector<TrainingExample> examples;
    examples.reserve(dataset.records.size());
    for (const DatasetRecord& record : dataset.records) {
        examples.push_back({record.motion, record.condition_id});
    }

    Model model;
    model.schedule = make_schedule(n_steps, beta_min, beta_max);
    model.skeleton = dataset.skeleton;
    model.frames = dataset.frames;
    model.fps = dataset.fps;

    TrainStats stats;
    model.denoiser =
        std::make_shared<ToyDenoiser>(train_denoiser(examples, model.schedule, cfg, &stats));
    save_model(out, model);
    std::cout << "trained " << cfg.steps << " steps; minibatch mse "
              << fmt_double(stats.initial_loss) << " -> " << fmt_double(stats.final_loss)
              << "; checkpoint " << out << "\n";
    return 0;
}

int cmd_generate(const GuideOpts& opts) {
    const Model model = load_model_checked(opts.checkpoint);
    const SmoothingConfig smoothing = smoothing_from_opts(opts);
    const std::vector<int> steps = make_step_indices(model.schedule.n_steps, opts.stride);
    const BaselineResult baseline =
        generate_baseline(model, opts.condition, opts.seed, steps, smoothing);

    const fs::path dir(opts.out_dir);
    save_motion(dir / "motion.json", baseline.motion);
    save_series_csv(dir / "series.csv", baseline.series);

    json manifest;
    manifest["command"] = "generate";
    manifest["checkpoint"] = opts.checkpoint;
    manifest["condition"] = opts.condition;
    manifest["seed"] = opts.seed;
    manifest["stride"] = opts.stride;
    manifest["smoothing"] = smoothing_to_json(smoothing);
    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");

    const auto scalars = laban_scalars(baseline.series);
    std::cout << "generated condition " << opts.condition << " seed " << opts.seed << "; scalars";
    for (std::size_t c = 0; c < 4; ++c)
        std::cout << ' ' << channel_name(c) << '=' << fmt_double(scalars[c]);
    std::cout << "\n";
    return 0;
}

int cmd_guide(const GuideOpts& opts) {
    const Model model = load_model_checked(opts.checkpoint);
    const SmoothingConfig smoothing = smoothing_from_opts(opts);
    const GuidanceConfig guidance = guidance_from_opts(opts);
    const ScaleVector scale = scale_from_opts(opts);
    const GuidanceMethod method = parse_method(opts.method);
    const std::vector<int> steps = make_step_indices(model.schedule.n_steps, opts.stride);

    const BaselineResult baseline =
        generate_baseline(model, opts.condition, opts.seed, steps, smoothing);
    const LabanSeries target = make_target(baseline.series, scale);

    GuidedResult guided;
    switch (method) {
        case GuidanceMethod::Laban:
            guided = guided_sample(model, baseline.embedding, baseline.z, steps, target,
                                   baseline.series, guidance, smoothing);
            break;
        case GuidanceMethod::RawFrame:
            guided.motion = raw_frame_update(baseline.motion, target, baseline.series,
                                             model.skeleton.effectors(), smoothing, guidance.delta,
                                             opts.raw_steps, opts.raw_lr);
            guided.embedding = baseline.embedding;
            break;
        case GuidanceMethod::Classifier:
            guided = classifier_guided_sample(model, baseline.embedding, baseline.z, steps, target,
                                              baseline.series, opts.lambda, smoothing,
                                              guidance.delta, guidance.divergence_factor);
            break;
    }

    const LabanSeries guided_series =
        laban_series(guided.motion, model.skeleton.effectors(), smoothing);

    const fs::path dir(opts.out_dir);
    save_motion(dir / "baseline_motion.json", baseline.motion);
    save_motion(dir / "guided_motion.json", guided.motion);
    save_series_csv(dir / "baseline_series.csv", baseline.series);
    save_series_csv(dir / "guided_series.csv", guided_series);
    save_loss_csv(dir / "loss_trajectory.csv", guided.trajectory);

    json manifest;
    manifest["command"] = "guide";
    manifest["checkpoint"] = opts.checkpoint;
    manifest["condition"] = opts.condition;
    manifest["seed"] = opts.seed;
    manifest["stride"] = opts.stride;
    manifest["method"] = opts.method;
    manifest["tags"] = split_csv(opts.tags);
    manifest["scale"] = scale.s;
    manifest["guidance"] = guidance_to_json(guidance);
    manifest["smoothing"] = smoothing_to_json(smoothing);
    manifest["classifier_lambda"] = opts.lambda;
    manifest["raw_frame_steps"] = opts.raw_steps;
    manifest["raw_frame_lr"] = opts.raw_lr;
    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");

    const auto base_scalars = laban_scalars(baseline.series);
    const auto guided_scalars = laban_scalars(guided_series);
    std::cout << "guided condition " << opts.condition << " seed " << opts.seed << " ("
              << opts.method << "); peak ratios";
    for (std::size_t c = 0; c < 4; ++c) {
        const double ratio = (base_scalars[c] < 1e-12 && guided_scalars[c] < 1e-12)
                                 ? 1.0
                                 : guided_scalars[c] / std::max(base_scalars[c], 1e-12);
        std::cout << ' ' << channel_name(c) << '=' << fmt_double(ratio);
    }
    std::cout << "\n";
    return 0;
}

int cmd_analyze(const std::string& motion_path, const std::string& out_path, int joint,
                bool compare_smoothing, const GuideOpts& opts) {
    if (!fs::exists(motion_path)) throw ConfigError("motion file not found: " + motion_path);
    const Motion motion = load_motion(motion_path);
    if (joint < 0 || static_cast<std::size_t>(joint) >= motion.joints()) {
        throw ConfigError("--joint out of range for " + std::to_string(motion.joints()) +
                          " joints");
    }
    // Standard skeletons use the standard effector set; anything else sums
    // over every joint.
    EndEffectorSet effectors;
    const SkeletonSpec standard = SkeletonSpec::standard();
    if (motion.joint_names == standard.joint_names) {
        effectors = standard.effectors();
    } else {
        for (std::size_t j = 0; j < motion.joints(); ++j) effectors.indices.push_back(j);
    }
    const SmoothingConfig smoothing = smoothing_from_opts(opts);
    SmoothingConfig raw_cfg = smoothing;
    raw_cfg.enabled = false;

    const LabanSeries smoothed = laban_series(motion, effectors, smoothing);
    const LabanSeries raw = laban_series(motion, effectors, raw_cfg);
    const KinematicsSeries kin_smooth = kinematics(gaussian_smooth(motion, smoothing));
    const KinematicsSeries kin_raw = kinematics(motion);

    auto joint_norm = [&](const std::vector<double>& arr, std::size_t t) {
        const std::size_t row = motion.joints() * 3;
        const double* v = &arr[t * row + static_cast<std::size_t>(joint) * 3];
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    };

    std::ostringstream csv;
    csv << "frame,weight,time,flow,shape,vel,acc,jerk";
    if (compare_smoothing)
        csv << ",weight_raw,time_raw,flow_raw,shape_raw,vel_raw,acc_raw,jerk_raw";
    csv << "\n";
    const LabanSeries& primary = smoothing.enabled ? smoothed : raw;
    const KinematicsSeries& kin_primary = smoothing.enabled ? kin_smooth : kin_raw;
    for (std::size_t t = 0; t < motion.frames; ++t) {
        csv << t;
        for (std::size_t c = 0; c < 4; ++c) csv << ',' << fmt_double(primary.at(t, c));
        csv << ',' << fmt_double(joint_norm(kin_primary.velocity, t));
        csv << ',' << fmt_double(joint_norm(kin_primary.acceleration, t));
        csv << ',' << fmt_double(joint_norm(kin_primary.jerk, t));
        if (compare_smoothing) {
            for (std::size_t c = 0; c < 4; ++c) csv << ',' << fmt_double(raw.at(t, c));
            csv << ',' << fmt_double(joint_norm(kin_raw.velocity, t));
            csv << ',' << fmt_double(joint_norm(kin_raw.acceleration, t));
            csv << ',' << fmt_double(joint_norm(kin_raw.jerk, t));
        }
        csv << '\n';
    }
    atomic_write(out_path, csv.str());

    const auto scalars = laban_scalars(primary);
    std::cout << "analyzed " << motion_path << "; scalars";
    for (std::size_t c = 0; c < 4; ++c)
        std::cout << ' ' << channel_name(c) << '=' << fmt_double(scalars[c]);
    std::cout << "\n";
    return 0;
}

int cmd_eval(const GuideOpts& opts, int n_conditions, int n_repeats, bool against_baseline,
             int jobs, const std::string& out_dir) {
    const Model model = load_model_checked(opts.checkpoint);
    const GuidanceMethod method = parse_method(opts.method);
    if (n_conditions < 1 || n_repeats < 1) {
        throw ConfigError("--conditions and --repeats must be >= 1");
    }
    if (static_cast<std::size_t>(n_conditions) > model.denoiser->n_conditions()) {
        throw ConfigError("--conditions exceeds the checkpoint's " +
                          std::to_string(model.denoiser->n_conditions()) + " conditions");
    }

    EvalConfig cfg;
    cfg.master_seed = opts.seed;
    cfg.stride = opts.stride;
    cfg.guidance = guidance_from_opts(opts);
    cfg.smoothing = smoothing_from_opts(opts);
    cfg.classifier_lambda = opts.lambda;
    cfg.raw_frame_steps = opts.raw_steps;
    cfg.raw_frame_lr = opts.raw_lr;
    cfg.against_baseline = against_baseline;
    cfg.jobs = jobs;

    std::vector<int> condition_ids(static_cast<std::size_t>(n_conditions));
    for (int i = 0; i < n_conditions; ++i) condition_ids[static_cast<std::size_t>(i)] = i;

    const ChangeMatrix matrix = change_matrix(model, method, condition_ids, n_repeats, cfg);

    const fs::path dir(out_dir);
    save_change_matrix_csv(dir / "change_matrix.csv", matrix);
    atomic_write(dir / "report.json",
                 change_matrix_report_json(matrix, method, cfg, condition_ids.size()));

    std::cout << "method " << method_name(method) << ", mean change matrix:\n";
    for (std::size_t r = 0; r < 4; ++r) {
        std::cout << "  " << channel_name(r) << ":";
        for (std::size_t c = 0; c < 4; ++c) std::cout << ' ' << fmt_double(matrix.mean[r][c]);
        std::cout << "\n";
    }
    std::cout << "diagonality " << fmt_double(diagonality(matrix.mean)) << "\n";
    if (matrix.single_sample) {
        log_warn("some rows aggregate a single sample; std columns are zero");
    }
    return 0;
}

// Central-difference comparison of both gradient paths on seeded instances.
int cmd_gradcheck(std::uint64_t seed, int instances) {
    const SkeletonSpec skeleton = SkeletonSpec::standard();
    const EndEffectorSet effectors = skeleton.effectors();
    SmoothingConfig smoothing;
    const double delta = 1e-6;
    const NoiseSchedule schedule = make_schedule(50, 1e-3, 0.05);

    double worst_motion = 0.0;
    double worst_embed = 0.0;

    for (int i = 0; i < instances; ++i) {
        MotionFamily family;
        family.amplitude = 0.1 + 0.05 * (i % 3);
        family.frequency = 0.8 + 0.2 * (i % 2);
        const Motion motion =
            gen_motion(skeleton, family, 24, 20.0,
                       derive_seed(seed, 11, static_cast<std::uint64_t>(i)));
        Rng rng(derive_seed(seed, 13, static_cast<std::uint64_t>(i)));

        LabanSeries baseline = laban_series(motion, effectors, smoothing);
        LabanSeries target = baseline;
        for (double& v : target.values) v *= 1.3;
        for (double& v : baseline.values) v = std::abs(v) + 0.05;

        // Motion path.
        {
            Motion probe = motion;
            for (double& v : probe.positions) v += 0.01 * rng.normal();
            const MotionLoss analytic =
                laban_loss_with_grad_motion(probe, target, baseline, effectors, smoothing, delta);
            double gmax = 0.0;
            for (double g : analytic.grad) gmax = std::max(gmax, std::abs(g));
            const double floor = 1e-3 * (gmax + 1e-12);
            const double h = 1e-5;
            for (std::size_t n = 0; n < probe.positions.size(); ++n) {
                Motion plus = probe, minus = probe;
                plus.positions[n] += h;
                minus.positions[n] -= h;
                const double lp =
                    laban_loss(laban_series(plus, effectors, smoothing), target, baseline, delta);
                const double lm =
                    laban_loss(laban_series(minus, effectors, smoothing), target, baseline, delta);
                const double fd = (lp - lm) / (2.0 * h);
                const double rel = std::abs(analytic.grad[n] - fd) /
                                   std::max({std::abs(fd), std::abs(analytic.grad[n]), floor});
                worst_motion = std::max(worst_motion, rel);
            }
        }

        // Embedding path through a small untrained denoiser.
        {
            DenoiserArch arch;
            arch.motion_dim = motion.flat_size();
            arch.hidden = 32;
            arch.d_embed = 8;
            arch.n_steps = schedule.n_steps;
            const ToyDenoiser denoiser(arch, 3,
                                       derive_seed(seed, 17, static_cast<std::uint64_t>(i)));
            const int t = 1 + static_cast<int>(rng.uniform_index(
                                  static_cast<std::uint64_t>(schedule.n_steps)));
            const std::vector<double> x_t = rng.normal_vector(arch.motion_dim);
            std::vector<double> e = denoiser.condition_embedding(0);

            const double ab = schedule.alpha_bar[static_cast<std::size_t>(t)];
            const double d_x0_d_eps = -std::sqrt(1.0 - ab) / std::sqrt(ab);
            auto loss_at = [&](const std::vector<double>& embed) {
                const std::vector<double> eps = denoiser.predict(x_t, t, embed);
                const std::vector<double> x0 = predict_x0(x_t, t, eps, schedule);
                return laban_loss(laban_series(unflatten_motion(x0, motion), effectors, smoothing),
                                  target, baseline, delta);
            };
            const std::vector<double> eps = denoiser.predict(x_t, t, e);
            const std::vector<double> x0 = predict_x0(x_t, t, eps, schedule);
            const MotionLoss ml = laban_loss_with_grad_motion(
                unflatten_motion(x0, motion), target, baseline, effectors, smoothing, delta);
            std::vector<double> g_eps(ml.grad.size());
            for (std::size_t n = 0; n < g_eps.size(); ++n) g_eps[n] = ml.grad[n] * d_x0_d_eps;
            std::vector<double> g_e;
            denoiser.vjp(x_t, t, e, g_eps, nullptr, &g_e);

            double gmax = 0.0;
            for (double g : g_e) gmax = std::max(gmax, std::abs(g));
            const double floor = 1e-3 * (gmax + 1e-12);
            const double h = 1e-4;
            for (std::size_t n = 0; n < e.size(); ++n) {
                std::vector<double> plus = e, minus = e;
                plus[n] += h;
                minus[n] -= h;
                const double fd = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
                const double rel = std::abs(g_e[n] - fd) /
                                   std::max({std::abs(fd), std::abs(g_e[n]), floor});
                worst_embed = std::max(worst_embed, rel);
            }
        }
    }

    std::cout << "gradcheck over " << instances << " instances: max rel error motion path "
              << fmt_double(worst_motion) << ", embedding path " << fmt_double(worst_embed)
              << "\n";
    const bool ok = worst_motion < 1e-4 && worst_embed < 1e-3;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : 1;
}

int cmd_demo(const std::string& out_dir, std::uint64_t seed, int per_condition, int train_steps,
             int stride, int eval_conditions, int eval_repeats, int jobs) {
    const fs::path dir(out_dir);
    std::cout << "[demo 1/4] dataset\n";
    cmd_dataset((dir / "dataset.jsonl").string(), per_condition, 60, 20.0, seed);

    std::cout << "[demo 2/4] train\n";
    TrainingConfig train_cfg;
    train_cfg.steps = train_steps;
    train_cfg.seed = derive_seed(seed, 2);
    cmd_train((dir / "dataset.jsonl").string(), (dir / "checkpoint.json").string(), train_cfg,
              1000, 1e-4, 2e-2);

    std::cout << "[demo 3/4] guide (strong)\n";
    GuideOpts guide;
    guide.checkpoint = (dir / "checkpoint.json").string();
    guide.out_dir = (dir / "guide").string();
    guide.condition = 0;
    guide.seed = derive_seed(seed, 3);
    guide.stride = stride;
    guide.tags = "strong";
    cmd_guide(guide);

    std::cout << "[demo 4/4] eval (laban)\n";
    GuideOpts eval_opts;
    eval_opts.checkpoint = (dir / "checkpoint.json").string();
    eval_opts.seed = derive_seed(seed, 4);
    eval_opts.stride = stride;
    eval_opts.method = "laban";
    return cmd_eval(eval_opts, eval_conditions, eval_repeats, false, jobs,
                    (dir / "eval").string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laban-feature guided diffusion sampling for synthetic motion"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; command-line flags win");

    // dataset
    auto* dataset_cmd = app.add_subcommand("dataset", "generate the synthetic motion corpus");
    std::string ds_out = "dataset.jsonl";
    int ds_per_condition = 24;
    std::size_t ds_frames = 60;
    double ds_fps = 20.0;
    std::uint64_t ds_seed = 1;
    dataset_cmd->add_option("--out", ds_out, "dataset file (line-delimited records)");
    dataset_cmd->add_option("--per-condition", ds_per_condition, "motions per condition bucket");
    dataset_cmd->add_option("--frames", ds_frames, "frames per motion");
    dataset_cmd->add_option("--fps", ds_fps, "frame rate");
    dataset_cmd->add_option("--seed", ds_seed, "master seed");

    // train
    auto* train_cmd = app.add_subcommand("train", "train the denoiser on a dataset");
    std::string tr_dataset = "dataset.jsonl", tr_out = "checkpoint.json";
    TrainingConfig tr_cfg;
    int tr_n_steps = 1000;
    double tr_beta_min = 1e-4, tr_beta_max = 2e-2;
    train_cmd->add_option("--dataset", tr_dataset, "dataset file");
    train_cmd->add_option("--out", tr_out, "checkpoint path");
    train_cmd->add_option("--steps", tr_cfg.steps, "optimizer steps");
    train_cmd->add_option("--batch", tr_cfg.batch, "minibatch size");
    train_cmd->add_option("--lr", tr_cfg.lr, "learning rate");
    train_cmd->add_option("--hidden", tr_cfg.hidden, "hidden width");
    train_cmd->add_option("--embed-dim", tr_cfg.d_embed, "condition embedding dimension");
    train_cmd->add_option("--seed", tr_cfg.seed, "training seed");
    train_cmd->add_option("--n-steps", tr_n_steps, "diffusion steps in the schedule");
    train_cmd->add_option("--beta-min", tr_beta_min, "schedule beta at t=1");
    train_cmd->add_option("--beta-max", tr_beta_max, "schedule beta at t=n_steps");

    auto add_sampling_opts = [](CLI::App* cmd, GuideOpts& opts) {
        cmd->add_option("--checkpoint", opts.checkpoint, "model checkpoint");
        cmd->add_option("--seed", opts.seed, "noise seed");
        cmd->add_option("--stride", opts.stride, "DDIM step stride");
        cmd->add_option("--kernel-size", opts.kernel_size, "smoothing kernel size");
        cmd->add_option("--sigma2", opts.sigma2, "smoothing kernel variance");
        cmd->add_flag("--no-smoothing", opts.no_smoothing, "disable Gaussian smoothing");
    };
    auto add_guidance_opts = [](CLI::App* cmd, GuideOpts& opts) {
        cmd->add_option("--tags", opts.tags, "comma-separated Laban tags");
        cmd->add_option("--scale", opts.scales, "component=value override (repeatable)");
        cmd->add_option("--method", opts.method, "laban | raw-frame | classifier");
        cmd->add_option("--lr", opts.lr, "embedding learning rate");
        cmd->add_option("--betas", opts.betas, "adam betas, e.g. 0.7,0.9");
        cmd->add_option("--delta", opts.delta, "loss stability constant");
        cmd->add_option("--k", opts.k, "embedding updates per sampling step");
        cmd->add_flag("--no-recompute-eps", opts.no_recompute_eps,
                      "reuse the pre-update noise prediction for the DDIM step");
        cmd->add_flag("--reset-adam", opts.reset_adam, "fresh Adam moments each sampling step");
        cmd->add_option("--divergence-factor", opts.divergence_factor,
                        "abort when loss exceeds this multiple of the first-step loss");
        cmd->add_option("--lambda", opts.lambda, "classifier-guidance step size");
        cmd->add_option("--raw-steps", opts.raw_steps, "raw-frame-update iterations");
        cmd->add_option("--raw-lr", opts.raw_lr, "raw-frame-update learning rate");
    };

    // generate
    auto* generate_cmd = app.add_subcommand("generate", "unguided sampling from a checkpoint");
    GuideOpts gen_opts;
    gen_opts.out_dir = "generate_out";
    add_sampling_opts(generate_cmd, gen_opts);
    generate_cmd->add_option("--condition", gen_opts.condition, "condition id");
    generate_cmd->add_option("--out-dir", gen_opts.out_dir, "output directory");

    // guide
    auto* guide_cmd = app.add_subcommand("guide", "two-step Laban-guided generation");
    GuideOpts guide_opts;
    add_sampling_opts(guide_cmd, guide_opts);
    add_guidance_opts(guide_cmd, guide_opts);
    guide_cmd->add_option("--condition", guide_opts.condition, "condition id");
    guide_cmd->add_option("--out-dir", guide_opts.out_dir, "output directory");

    // analyze
    auto* analyze_cmd = app.add_subcommand("analyze", "extract kinematics and Laban features");
    GuideOpts analyze_opts;
    std::string an_motion, an_out = "features.csv";
    int an_joint = 0;
    bool an_compare = false;
    analyze_cmd->add_option("motion", an_motion, "motion JSON file")->required();
    analyze_cmd->add_option("--out", an_out, "feature CSV path");
    analyze_cmd->add_option("--joint", an_joint, "joint for the kinematics columns");
    analyze_cmd->add_flag("--compare-smoothing", an_compare,
                          "add raw (unsmoothed) columns next to the smoothed ones");
    analyze_cmd->add_option("--kernel-size", analyze_opts.kernel_size, "smoothing kernel size");
    analyze_cmd->add_option("--sigma2", analyze_opts.sigma2, "smoothing kernel variance");
    analyze_cmd->add_flag("--no-smoothing", analyze_opts.no_smoothing,
                          "disable smoothing for the main columns");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "controllability change matrix and diagonality");
    GuideOpts eval_opts;
    int ev_conditions = 10, ev_repeats = 2, ev_jobs = 1;
    bool ev_against_baseline = false;
    std::string ev_out_dir = "eval_out";
    add_sampling_opts(eval_cmd, eval_opts);
    add_guidance_opts(eval_cmd, eval_opts);
    eval_cmd->add_option("--out-dir", ev_out_dir, "output directory");
    eval_cmd->add_option("--conditions", ev_conditions, "condition ids 0..N-1 to evaluate");
    eval_cmd->add_option("--repeats", ev_repeats, "seeds per condition");
    eval_cmd->add_option("--jobs", ev_jobs, "worker threads for evaluation cells");
    eval_cmd->add_flag("--against-baseline", ev_against_baseline,
                       "compare unguided baseline vs large-tag run instead of the two extremes");

    // gradcheck
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check");
    std::uint64_t gc_seed = 7;
    int gc_instances = 10;
    gradcheck_cmd->add_option("--seed", gc_seed, "random seed");
    gradcheck_cmd->add_option("--instances", gc_instances, "randomized instances per path");

    // demo
    auto* demo_cmd = app.add_subcommand("demo", "dataset -> train -> guide -> eval pipeline");
    std::string demo_out = "demo_run";
    std::uint64_t demo_seed = 1;
    int demo_per_condition = 24, demo_train_steps = 3000, demo_stride = 20;
    int demo_eval_conditions = 10, demo_eval_repeats = 2, demo_jobs = 1;
    demo_cmd->add_option("--out-dir", demo_out, "output directory");
    demo_cmd->add_option("--seed", demo_seed, "master seed");
    demo_cmd->add_option("--per-condition", demo_per_condition, "motions per condition");
    demo_cmd->add_option("--steps", demo_train_steps, "training steps");
    demo_cmd->add_option("--stride", demo_stride, "DDIM step stride");
    demo_cmd->add_option("--eval-conditions", demo_eval_conditions, "conditions in the eval grid");
    demo_cmd->add_option("--eval-repeats", demo_eval_repeats,
                         "seeds per condition in the eval grid");
    demo_cmd->add_option("--jobs", demo_jobs, "worker threads for evaluation");

    try {
        app.parse(argc, argv);

        if (*dataset_cmd) return cmd_dataset(ds_out, ds_per_condition, ds_frames, ds_fps, ds_seed);
        if (*train_cmd)
            return cmd_train(tr_dataset, tr_out, tr_cfg, tr_n_steps, tr_beta_min, tr_beta_max);
        if (*generate_cmd) return cmd_generate(gen_opts);
        if (*guide_cmd) return cmd_guide(guide_opts);
        if (*analyze_cmd) return cmd_analyze(an_motion, an_out, an_joint, an_compare, analyze_opts);
        if (*eval_cmd)
            return cmd_eval(eval_opts, ev_conditions, ev_repeats, ev_against_baseline, ev_jobs,
                            ev_out_dir);
        if (*gradcheck_cmd) return cmd_gradcheck(gc_seed, gc_instances);
        if (*demo_cmd)
            return cmd_demo(demo_out, demo_seed, demo_per_condition, demo_train_steps, demo_stride,
                            demo_eval_conditions, demo_eval_repeats, demo_jobs);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const NumericInstabilityError& e) {
        std::cerr << "numeric instability: " << e.what() << "\n";
        return 3;
    } catch (const EvalError& e) {
        std::cerr << "evaluation error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
