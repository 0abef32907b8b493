#pragma once

#include <cstdint>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

enum class TrajectoryKind { kOrbit, kForwardReverse, kRandomWalk };

struct TrajectoryParams {
    Vec3 target = Vec3::Zero();  // look-at point (all kinds)

    // orbit: circle of `radius` around the target at `height` above it
    double radius = 2.0;
    double height = 0.0;

    // forward-reverse: linear dolly start -> end, then the exact mirror
    Vec3 start = Vec3::Zero();
    Vec3 end = Vec3::Zero();

    // random-walk: seeded Gaussian steps clamped to [walk_min, walk_max]
    double step_sigma = 0.05;
    std::uint64_t seed = 0;
    Vec3 walk_min = Vec3::Zero();
    Vec3 walk_max = Vec3::Zero();
};

/// Camera pose looking from `position` toward `target` with image y
/// pointing world-down (guarded for vertical view directions).
CameraPose look_at(const Vec3& position, const Vec3& target);

/// Orbit: n poses equally spaced over a full circle. Forward-reverse: an
/// even n, the first half a dolly from start to end, the second half its
/// mirror so pose[i] equals pose[n-1-i] bit-exactly. Random-walk: seeded
/// bounded Brownian positions, all looking at the target.
std::vector<CameraPose> make_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                                        int n_frames);

}  // namespace vwm
