#include "laban/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "laban/errors.hpp"
#include "laban/rng.hpp"

namespace laban {

SkeletonSpec SkeletonSpec::standard() {
    SkeletonSpec spec;
    spec.joint_names = {"root", "head", "left_hand", "right_hand",
                        "left_foot", "right_foot", "pelvis"};
    spec.effector_indices = {0, 1, 2, 3, 4, 5};  // everything but the pelvis
    return spec;
}

Motion gen_motion(const SkeletonSpec& skeleton, const MotionFamily& family, std::size_t frames,
                  double fps, std::uint64_t seed) {
    if (frames < 4) throw ConfigError("synthetic motion needs at least 4 frames");
    if (fps <= 0.0) throw ConfigError("fps must be positive");
    if (family.frequency < 0.0 || family.amplitude < 0.0 || family.spread < 0.0 ||
        family.bounce < 0.0 || family.jitter_sigma < 0.0) {
        throw ConfigError("motion family parameters must be non-negative");
    }
    if (skeleton.joints() != 7) {
        throw ConfigError("gen_motion expects the standard 7-joint skeleton");
    }

    Rng rng(seed);
    const double global_phase = 2.0 * std::numbers::pi * rng.uniform();

    Motion motion;
    motion.fps = fps;
    motion.joint_names = skeleton.joint_names;
    motion.frames = frames;
    motion.positions.assign(frames * skeleton.joints() * 3, 0.0);

    const double omega = 2.0 * std::numbers::pi * family.frequency / fps;  // rad/frame
    const double root_height = 0.95;
    const double foot_swing = 0.4 * family.amplitude;

    for (std::size_t t = 0; t < frames; ++t) {
        const double phase = omega * static_cast<double>(t) + global_phase;

        const double root_y = root_height + family.bounce * std::sin(phase);
        const std::array<double, 3> root{0.0, root_y, 0.0};

        auto set = [&](std::size_t j, double x, double y, double z) {
            motion.at(t, j, 0) = x;
            motion.at(t, j, 1) = y;
            motion.at(t, j, 2) = z;
        };

        set(0, root[0], root[1], root[2]);
        set(1, root[0], root[1] + 0.65, root[2]);  // head rides the root

        // Hands swing outward/vertically with opposed phases.
        const double lh = phase + family.limb_phase[0];
        const double rh = phase + family.limb_phase[1];
        set(2, root[0] - (family.spread + family.amplitude * std::sin(lh)),
            root[1] + 0.20 + 0.5 * family.amplitude * std::cos(lh),
            root[2] + 0.3 * family.amplitude * std::sin(lh));
        set(3, root[0] + (family.spread + family.amplitude * std::sin(rh)),
            root[1] + 0.20 + 0.5 * family.amplitude * std::cos(rh),
            root[2] + 0.3 * family.amplitude * std::sin(rh));

        // Feet step along z.
        const double lf = phase + family.limb_phase[2];
        const double rf = phase + family.limb_phase[3];
        set(4, root[0] - 0.15, root[1] - root_height, root[2] + foot_swing * std::sin(lf));
        set(5, root[0] + 0.15, root[1] - root_height, root[2] + foot_swing * std::sin(rf));

        set(6, root[0], root[1] - 0.15, root[2]);  // pelvis
    }

    if (family.jitter_sigma > 0.0) {
        for (double& v : motion.positions) v += family.jitter_sigma * rng.normal();
    }
    return motion;
}

Dataset gen_dataset(const std::vector<std::pair<MotionFamily, int>>& spec, std::size_t frames,
                    double fps, std::uint64_t master_seed, const SkeletonSpec& skeleton) {
    if (spec.empty()) throw ConfigError("dataset spec is empty");
    Dataset dataset;
    dataset.skeleton = skeleton;
    dataset.frames = frames;
    dataset.fps = fps;
    for (std::size_t cond = 0; cond < spec.size(); ++cond) {
        const auto& [family, count] = spec[cond];
        if (count < 1) throw ConfigError("per-family count must be >= 1");
        dataset.conditions.push_back(family);
        for (int r = 0; r < count; ++r) {
            DatasetRecord record;
            record.condition_id = static_cast<int>(cond);
            record.family = family;
            record.motion = gen_motion(skeleton, family, frames, fps,
                                       derive_seed(master_seed, cond, static_cast<std::uint64_t>(r)));
            dataset.records.push_back(std::move(record));
        }
    }
    return dataset;
}

std::vector<std::pair<MotionFamily, int>> default_corpus_spec(int per_condition) {
    const std::array<double, 3> amplitudes{0.05, 0.15, 0.30};
    const std::array<const char*, 3> tier_names{"calm", "steady", "vigorous"};
    const std::array<double, 2> spreads{0.35, 0.50};
    const std::array<double, 2> tempo_scale{1.0, 1.5};

    std::vector<std::pair<MotionFamily, int>> spec;
    for (std::size_t a = 0; a < amplitudes.size(); ++a) {
        for (std::size_t s = 0; s < spreads.size(); ++s) {
            for (std::size_t f = 0; f < tempo_scale.size(); ++f) {
                MotionFamily family;
                family.family_id = std::string(tier_names[a]) + (s == 0 ? "_narrow" : "_wide") +
                                   (f == 0 ? "_slow" : "_fast");
                family.amplitude = amplitudes[a];
                family.spread = spreads[s];
                family.frequency = 0.8 * tempo_scale[f];
                family.bounce = 0.15 * amplitudes[a];
                spec.emplace_back(family, per_condition);
            }
        }
    }
    return spec;
}

}  // namespace laban
