#pragma once

#include <cstdint>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

/// Result of splatting a point cloud into a camera: color (black where no
/// point landed), depth (invalid there), and the coverage mask.
/// Invariant: mask true <=> depth valid; mask false => RGB = (0,0,0).
struct RenderedView {
    Image image;
    DepthMap depth;
    std::vector<std::uint8_t> mask;  // row-major, 1 = covered

    bool covered(int x, int y) const { return mask[std::size_t(y) * image.width + x] != 0; }
};

/// Z-buffered square splatting: each point is projected and stamped as a
/// filled (2*radius+1)^2 square around the rounded pixel, clipped to the
/// image; the smallest depth wins per pixel, with ties (within 1e-9) kept by
/// the earlier point. Deterministic for a fixed cloud order.
RenderedView render_points(const PointCloud& cloud, const CameraIntrinsics& intr,
                           const CameraPose& pose, int splat_radius);

/// Fraction of pixels not covered by any splat, in [0, 1].
double reveal_fraction(const RenderedView& view);

}  // namespace vwm
