#pragma once

#include <memory>

#include "laban/schedule.hpp"
#include "laban/synthetic.hpp"
#include "laban/toy_denoiser.hpp"

namespace laban {

// Everything a checkpoint carries: denoiser weights and embedding table,
// noise schedule, and the skeleton/shape metadata needed to turn flat samples
// back into motions.
struct Model {
    static constexpr int kVersion = 1;

    NoiseSchedule schedule;
    std::shared_ptr<ToyDenoiser> denoiser;
    SkeletonSpec skeleton;
    std::size_t frames = 0;
    double fps = 20.0;

    Motion shape_template() const {
        Motion m;
        m.fps = fps;
        m.joint_names = skeleton.joint_names;
        m.frames = frames;
        m.positions.assign(frames * skeleton.joints() * 3, 0.0);
        return m;
    }
};

}  // namespace laban
