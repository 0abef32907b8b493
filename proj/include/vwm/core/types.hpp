#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "vwm/core/error.hpp"

namespace vwm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole camera intrinsics. Pixel centers sit at integer coordinates:
/// u=0 is the center of the leftmost column.
struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;

    CameraIntrinsics() = default;
    CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);

    void validate() const;
};

/// World-from-camera rigid pose: maps camera-frame points to world frame.
/// Camera looks along +Z, image x right, image y down.
struct CameraPose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    CameraPose() = default;
    CameraPose(const Mat3& rotation, const Vec3& translation);

    Vec3 cam_to_world(const Vec3& p) const { return rotation * p + translation; }
    Vec3 world_to_cam(const Vec3& p) const { return rotation.transpose() * (p - translation); }

    /// Camera center in world coordinates.
    const Vec3& center() const { return translation; }

    // Orthonormality within 1e-6 and det = +1 within 1e-6.
    void validate() const;
};

/// General rigid transform, used for chunk-to-memory alignment.
struct RigidTransform {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }

    RigidTransform inverse() const {
        return {rotation.transpose(), -(rotation.transpose() * translation)};
    }

    RigidTransform compose(const RigidTransform& rhs) const {
        // (*this) after rhs: apply(rhs.apply(p))
        return {rotation * rhs.rotation, rotation * rhs.translation + translation};
    }

    static RigidTransform identity() { return {}; }

    // Same orthonormality contract as CameraPose.
    void validate() const;
};

/// Row-major RGB image, channels in [0,1].
struct Image {
    int width = 0, height = 0;
    std::vector<float> pixels;  // 3 * width * height, RGB interleaved

    Image() = default;
    Image(int width, int height);                              // black
    Image(int width, int height, std::vector<float> pixels);   // validates

    float at(int x, int y, int c) const { return pixels[3 * (std::size_t(y) * width + x) + c]; }
    void set(int x, int y, float r, float g, float b) {
        std::size_t i = 3 * (std::size_t(y) * width + x);
        pixels[i] = r;
        pixels[i + 1] = g;
        pixels[i + 2] = b;
    }
    std::size_t pixel_count() const { return std::size_t(width) * height; }

    void validate() const;
};

/// Row-major depth map in meters. Depth <= 0 or non-finite means invalid.
struct DepthMap {
    int width = 0, height = 0;
    std::vector<float> depths;

    DepthMap() = default;
    DepthMap(int width, int height);                           // all invalid (0)
    DepthMap(int width, int height, std::vector<float> depths);

    float at(int x, int y) const { return depths[std::size_t(y) * width + x]; }
    void set(int x, int y, float d) { depths[std::size_t(y) * width + x] = d; }

    static bool is_valid(float d) { return std::isfinite(d) && d > 0.0f; }

    void validate() const;
};

/// One RGB + depth + pose observation.
struct Frame {
    int index = 0;
    Image image;
    DepthMap depth;
    CameraPose pose;
    CameraIntrinsics intrinsics;

    // Image and depth dimensions must match the intrinsics.
    void validate() const;
};

/// World-frame point cloud with parallel color and confidence arrays.
struct PointCloud {
    std::vector<Vec3> positions;
    std::vector<Vec3> colors;        // RGB in [0,1]
    std::vector<float> confidences;  // nonnegative

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }

    void push_back(const Vec3& p, const Vec3& c, float confidence) {
        positions.push_back(p);
        colors.push_back(c);
        confidences.push_back(confidence);
    }

    void validate() const;
};

}  // namespace vwm
