#pragma once

// Shared fixtures for the test binaries: throwaway directories, canned
// intrinsics, and small synthetic frame builders. Doctest-free so the
// acceptance binary can reuse it.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

#include "vwm/core/rng.hpp"
#include "vwm/core/types.hpp"
#include "vwm/worldsim/trajectory.hpp"

namespace vwm_test {

/// Unique temporary directory removed on destruction.
class TempDir {
public:
    TempDir() {
        std::string tmpl =
            (std::filesystem::temp_directory_path() / "vwm_test_XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Centered pinhole intrinsics; focal defaults to 0.9 * width like the CLI.
inline vwm::CameraIntrinsics test_intrinsics(int width, int height, double focal = 0.0) {
    vwm::CameraIntrinsics intr;
    intr.width = width;
    intr.height = height;
    intr.fx = focal > 0.0 ? focal : 0.9 * width;
    intr.fy = intr.fx;
    intr.cx = (width - 1) / 2.0;
    intr.cy = (height - 1) / 2.0;
    return intr;
}

inline vwm::Image constant_image(int width, int height, float r, float g, float b) {
    vwm::Image img(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) img.set(x, y, r, g, b);
    return img;
}

inline vwm::Image random_image(vwm::Rng& rng, int width, int height) {
    vwm::Image img(width, height);
    for (float& v : img.pixels) v = float(rng.uniform());
    return img;
}

/// Frame with per-pixel depth and color callbacks (pixel coordinates).
inline vwm::Frame make_frame(const vwm::CameraPose& pose, const vwm::CameraIntrinsics& intr,
                             const std::function<float(int, int)>& depth_at,
                             const std::function<vwm::Vec3(int, int)>& color_at, int index = 0) {
    vwm::Frame frame;
    frame.index = index;
    frame.pose = pose;
    frame.intrinsics = intr;
    frame.image = vwm::Image(intr.width, intr.height);
    frame.depth = vwm::DepthMap(intr.width, intr.height);
    for (int y = 0; y < intr.height; ++y) {
        for (int x = 0; x < intr.width; ++x) {
            frame.depth.set(x, y, depth_at(x, y));
            const vwm::Vec3 c = color_at(x, y);
            frame.image.set(x, y, float(c.x()), float(c.y()), float(c.z()));
        }
    }
    return frame;
}

/// Identity-pose frame observing a fronto-parallel surface at depth z0.
inline vwm::Frame flat_depth_frame(const vwm::CameraIntrinsics& intr, float z0,
                                   const vwm::Vec3& color = vwm::Vec3(0.5, 0.5, 0.5),
                                   int index = 0) {
    return make_frame(
        vwm::CameraPose{}, intr, [z0](int, int) { return z0; },
        [&color](int, int) { return color; }, index);
}

/// Pose translated to `position` looking along +Z (identity rotation).
inline vwm::CameraPose pose_at(const vwm::Vec3& position) {
    vwm::CameraPose pose;
    pose.translation = position;
    return pose;
}

}  // namespace vwm_test
