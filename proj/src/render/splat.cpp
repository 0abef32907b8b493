#include "vwm/render/splat.hpp"

#include <algorithm>
#include <limits>

#include "vwm/core/geometry.hpp"

namespace vwm {

RenderedView render_points(const PointCloud& cloud, const CameraIntrinsics& intr,
                           const CameraPose& pose, int splat_radius) {
    if (splat_radius < 0) throw ValidationError("render: splat radius must be nonnegative");
    cloud.validate();
    intr.validate();
    pose.validate();

    const int width = intr.width, height = intr.height;
    RenderedView view;
    view.image = Image(width, height);  // black
    view.depth = DepthMap(width, height);
    view.mask.assign(std::size_t(width) * height, 0);

    std::vector<double> zbuf(std::size_t(width) * height,
                             std::numeric_limits<double>::infinity());

    const Mat3 world_to_cam_rot = pose.rotation.transpose();
    const Vec3 cam_center = pose.translation;

    // Sequential pass so the equal-depth tie goes to the earlier point.
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3 cam = world_to_cam_rot * (cloud.positions[i] - cam_center);
        const auto proj = project(cam, intr);
        if (!proj) continue;
        const int cx = round_pixel(proj->u);
        const int cy = round_pixel(proj->v);
        const int x_lo = std::max(cx - splat_radius, 0);
        const int x_hi = std::min(cx + splat_radius, width - 1);
        const int y_lo = std::max(cy - splat_radius, 0);
        const int y_hi = std::min(cy + splat_radius, height - 1);
        const Vec3& c = cloud.colors[i];
        for (int y = y_lo; y <= y_hi; ++y) {
            for (int x = x_lo; x <= x_hi; ++x) {
                const std::size_t px = std::size_t(y) * width + x;
                if (proj->z < zbuf[px] - 1e-9) {
                    zbuf[px] = proj->z;
                    view.depth.set(x, y, float(proj->z));
                    view.image.set(x, y, float(c.x()), float(c.y()), float(c.z()));
                    view.mask[px] = 1;
                }
            }
        }
    }
    return view;
}

double reveal_fraction(const RenderedView& view) {
    const std::size_t total = view.mask.size();
    if (total == 0) return 1.0;
    std::size_t uncovered = 0;
    for (std::uint8_t m : view.mask) uncovered += (m == 0);
    return double(uncovered) / double(total);
}

}  // namespace vwm
