#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "laban/motion.hpp"

namespace laban {

// Desk-scale 7-joint skeleton. The root doubles as the torso effector.
struct SkeletonSpec {
    std::vector<std::string> joint_names;
    std::vector<std::size_t> effector_indices;

    static SkeletonSpec standard();
    EndEffectorSet effectors() const { return EndEffectorSet{effector_indices}; }
    std::size_t joints() const { return joint_names.size(); }
};

// Parameters of one procedural motion style. Limbs follow sinusoids around
// the root; per-record phase and millimeter jitter come from the seed.
struct MotionFamily {
    std::string family_id = "default";
    double frequency = 1.0;   // Hz
    double amplitude = 0.15;  // m, arm swing (feet/bounce scale off this)
    double spread = 0.4;      // m, resting hand distance from the root
    double bounce = 0.02;     // m, vertical root oscillation
    std::array<double, 4> limb_phase{0.0, 3.14159265358979323846, 1.5707963267948966,
                                     4.71238898038469};  // lh, rh, lf, rf
    double jitter_sigma = 0.001;  // m, 0 disables jitter
};

Motion gen_motion(const SkeletonSpec& skeleton, const MotionFamily& family, std::size_t frames,
                  double fps, std::uint64_t seed);

struct DatasetRecord {
    int condition_id = 0;
    MotionFamily family;
    Motion motion;
};

struct Dataset {
    SkeletonSpec skeleton;
    std::size_t frames = 0;
    double fps = 20.0;
    std::vector<DatasetRecord> records;
    std::vector<MotionFamily> conditions;  // condition_id -> generating family
};

// Generates `count` labeled motions per family; condition_id is the index of
// the (family, count) entry. Deterministic in master_seed.
Dataset gen_dataset(const std::vector<std::pair<MotionFamily, int>>& spec, std::size_t frames,
                    double fps, std::uint64_t master_seed,
                    const SkeletonSpec& skeleton = SkeletonSpec::standard());

// Default corpus: three energy tiers (amplitudes 0.05 / 0.15 / 0.30), each
// with two spreads and two tempos -> 12 condition buckets.
std::vector<std::pair<MotionFamily, int>> default_corpus_spec(int per_condition);

}  // namespace laban
