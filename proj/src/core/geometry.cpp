#include "vwm/core/geometry.hpp"

namespace vwm {

std::optional<Projection> project(const Vec3& point_cam, const CameraIntrinsics& intr) {
    const double z = point_cam.z();
    if (z <= 1e-6) return std::nullopt;
    const double u = intr.fx * point_cam.x() / z + intr.cx;
    const double v = intr.fy * point_cam.y() / z + intr.cy;
    if (u < 0.0 || u >= intr.width || v < 0.0 || v >= intr.height) return std::nullopt;
    return Projection{u, v, z};
}

Vec3 backproject(double u, double v, double z, const CameraIntrinsics& intr) {
    if (z <= 0.0) throw ValidationError("backproject: depth must be positive");
    return Vec3((u - intr.cx) * z / intr.fx, (v - intr.cy) * z / intr.fy, z);
}

Vec3 transform(const CameraPose& pose, const Vec3& point, TransformDirection direction) {
    return direction == TransformDirection::kCamToWorld ? pose.cam_to_world(point)
                                                        : pose.world_to_cam(point);
}

}  // namespace vwm
