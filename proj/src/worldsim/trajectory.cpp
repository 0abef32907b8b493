#include "vwm/worldsim/trajectory.hpp"

#include <cmath>

#include "vwm/core/error.hpp"
#include "vwm/core/rng.hpp"

namespace vwm {

CameraPose look_at(const Vec3& position, const Vec3& target) {
    const Vec3 offset = target - position;
    if (!(offset.norm() > 1e-12))
        throw ValidationError("trajectory: camera position coincides with the target");
    const Vec3 forward = offset.normalized();

    const Vec3 down(0.0, -1.0, 0.0);
    Vec3 right = down.cross(forward);
    if (right.norm() < 1e-8) right = Vec3(1.0, 0.0, 0.0);  // looking straight up/down
    right.normalize();
    const Vec3 image_down = forward.cross(right);

    Mat3 rotation;
    rotation.col(0) = right;
    rotation.col(1) = image_down;
    rotation.col(2) = forward;
    return CameraPose(rotation, position);
}

std::vector<CameraPose> make_trajectory(TrajectoryKind kind, const TrajectoryParams& params,
                                        int n_frames) {
    if (n_frames < 2) throw ValidationError("trajectory: need at least 2 frames");

    std::vector<CameraPose> poses;
    poses.reserve(std::size_t(n_frames));

    switch (kind) {
        case TrajectoryKind::kOrbit: {
            if (!(params.radius > 0.0))
                throw ValidationError("trajectory: orbit radius must be positive");
            for (int i = 0; i < n_frames; ++i) {
                const double angle = 2.0 * M_PI * i / n_frames;
                const Vec3 position =
                    params.target + Vec3(params.radius * std::cos(angle), params.height,
                                         params.radius * std::sin(angle));
                poses.push_back(look_at(position, params.target));
            }
            break;
        }
        case TrajectoryKind::kForwardReverse: {
            if (n_frames % 2 != 0)
                throw ValidationError("trajectory: forward-reverse needs an even frame count");
            const int half = n_frames / 2;
            for (int i = 0; i < half; ++i) {
                const double s = half > 1 ? double(i) / (half - 1) : 0.0;
                poses.push_back(look_at(params.start + s * (params.end - params.start),
                                        params.target));
            }
            // Mirror: copies, so palindrome pairs are bit-identical.
            for (int i = half - 1; i >= 0; --i) poses.push_back(poses[std::size_t(i)]);
            break;
        }
        case TrajectoryKind::kRandomWalk: {
            if (!((params.walk_max - params.walk_min).minCoeff() > 0.0))
                throw ValidationError("trajectory: random walk needs a valid bounding box");
            if (!(params.step_sigma >= 0.0))
                throw ValidationError("trajectory: negative step sigma");
            Vec3 position = params.start.cwiseMax(params.walk_min).cwiseMin(params.walk_max);
            Rng rng(mix_seed(params.seed, 11));
            for (int i = 0; i < n_frames; ++i) {
                if (i > 0) {
                    const Vec3 step(rng.normal(0.0, params.step_sigma),
                                    rng.normal(0.0, params.step_sigma),
                                    rng.normal(0.0, params.step_sigma));
                    position = (position + step).cwiseMax(params.walk_min).cwiseMin(params.walk_max);
                }
                poses.push_back(look_at(position, params.target));
            }
            break;
        }
    }
    return poses;
}

}  // namespace vwm
