#pragma once

#include <optional>

#include "vwm/core/types.hpp"

namespace vwm {

/// Pinhole projection of a camera-frame point.
struct Projection {
    double u = 0.0;
    double v = 0.0;
    double z = 0.0;
};

/// Projects a camera-frame point through the pinhole model. Returns absent
/// for points at or behind the camera (z <= 1e-6) and for projections
/// falling outside [0,width) x [0,height).
std::optional<Projection> project(const Vec3& point_cam, const CameraIntrinsics& intr);

/// Inverse of project for a pixel (u,v) at depth z > 0. Throws on z <= 0.
Vec3 backproject(double u, double v, double z, const CameraIntrinsics& intr);

enum class TransformDirection { kCamToWorld, kWorldToCam };

Vec3 transform(const CameraPose& pose, const Vec3& point, TransformDirection direction);

/// Round-half-up to the nearest integer pixel coordinate.
inline int round_pixel(double x) { return int(std::floor(x + 0.5)); }

/// Nearest valid pixel column/row for an in-bounds projection. Projections
/// live in [0, size), so rounding can land on `size`; that maps back to the
/// last pixel, whose center is closest.
inline int nearest_pixel(double x, int size) {
    int p = round_pixel(x);
    if (p < 0) p = 0;
    if (p >= size) p = size - 1;
    return p;
}

}  // namespace vwm
