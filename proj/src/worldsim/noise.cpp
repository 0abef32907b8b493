#include "vwm/worldsim/noise.hpp"

#include <cmath>

#include "vwm/core/error.hpp"
#include "vwm/core/rng.hpp"

namespace vwm {

void NoiseModel::validate() const {
    if (rgb_sigma < 0.0 || depth_sigma_rel < 0.0 || pose_jitter_rot_deg < 0.0 ||
        pose_jitter_trans < 0.0)
        throw ValidationError("noise: standard deviations must be nonnegative");
}

namespace {

Mat3 axis_angle_rotation(const Vec3& axis_raw, double angle) {
    Vec3 axis = axis_raw;
    const double n = axis.norm();
    axis = n > 1e-12 ? Vec3(axis / n) : Vec3(1.0, 0.0, 0.0);
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 k;
    k << 0.0, -axis.z(), axis.y(), axis.z(), 0.0, -axis.x(), -axis.y(), axis.x(), 0.0;
    return Mat3::Identity() + s * k + (1.0 - c) * (k * k);
}

}  // namespace

Frame perturb_frame(const Frame& frame, const NoiseModel& noise, int t,
                    const std::vector<float>* pixel_scale, double pose_scale) {
    noise.validate();
    if (noise.is_zero()) return frame;

    const std::size_t pixels = frame.image.pixel_count();
    if (pixel_scale && pixel_scale->size() != pixels)
        throw ValidationError("noise: attenuation buffer size does not match the frame");

    Rng rng(mix_seed(noise.seed, std::uint64_t(std::int64_t(t))));
    Frame out = frame;

    if (noise.pose_jitter_rot_deg > 0.0) {
        const Vec3 axis(rng.normal(), rng.normal(), rng.normal());
        const double angle =
            rng.normal(0.0, noise.pose_jitter_rot_deg) * M_PI / 180.0 * pose_scale;
        out.pose.rotation = frame.pose.rotation * axis_angle_rotation(axis, angle);
    }
    if (noise.pose_jitter_trans > 0.0) {
        const Vec3 offset(rng.normal(0.0, noise.pose_jitter_trans),
                          rng.normal(0.0, noise.pose_jitter_trans),
                          rng.normal(0.0, noise.pose_jitter_trans));
        out.pose.translation = frame.pose.translation + offset * pose_scale;
    }

    if (noise.rgb_sigma > 0.0) {
        for (std::size_t p = 0; p < pixels; ++p) {
            const double scale = pixel_scale ? double((*pixel_scale)[p]) : 1.0;
            for (int c = 0; c < 3; ++c) {
                const double g = rng.normal(0.0, noise.rgb_sigma);
                const double v = double(out.image.pixels[3 * p + c]) + g * scale;
                out.image.pixels[3 * p + c] = float(std::clamp(v, 0.0, 1.0));
            }
        }
    }

    if (noise.depth_sigma_rel > 0.0) {
        for (std::size_t p = 0; p < pixels; ++p) {
            // Draw for every pixel so the stream does not depend on the
            // validity pattern.
            const double g = rng.normal(0.0, noise.depth_sigma_rel);
            const float d = out.depth.depths[p];
            if (!DepthMap::is_valid(d)) continue;
            const double scale = pixel_scale ? double((*pixel_scale)[p]) : 1.0;
            const double noisy = double(d) * (1.0 + g * scale);
            out.depth.depths[p] = noisy > 0.0 ? float(noisy) : 0.0f;
        }
    }

    return out;
}

}  // namespace vwm
