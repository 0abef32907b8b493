#pragma once

#include <cstdint>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

/// Seeded generation-drift model: additive RGB noise, relative depth noise,
/// and pose jitter. A model with all stds zero is the identity, bit-exactly.
struct NoiseModel {
    double rgb_sigma = 0.0;        // per-channel Gaussian std
    double depth_sigma_rel = 0.0;  // multiplicative: d *= 1 + N(0, std)
    double pose_jitter_rot_deg = 0.0;
    double pose_jitter_trans = 0.0;  // meters
    std::uint64_t seed = 0;

    bool is_zero() const {
        return rgb_sigma == 0.0 && depth_sigma_rel == 0.0 && pose_jitter_rot_deg == 0.0 &&
               pose_jitter_trans == 0.0;
    }

    void validate() const;
};

/// Applies the noise model to one frame. The random stream is a pure
/// function of (noise.seed, t), so identical calls reproduce identical
/// output. Draw order: pose, then RGB (row-major, 3 per pixel), then depth
/// (row-major, 1 per pixel). RGB is clamped to [0,1]; invalid depths stay
/// untouched; the pose is jittered by a small rotation (right-multiplied)
/// and a translation offset.
///
/// `pixel_scale` (optional, width*height) attenuates the RGB and depth
/// noise per pixel, and `pose_scale` the pose jitter — the draws themselves
/// are unaffected, so two runs differing only in attenuation see the same
/// noise fields scaled differently.
Frame perturb_frame(const Frame& frame, const NoiseModel& noise, int t,
                    const std::vector<float>* pixel_scale = nullptr, double pose_scale = 1.0);

}  // namespace vwm
