#include "vwm/core/types.hpp"

#include <string>

namespace vwm {

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy, int width,
                                   int height)
    : fx(fx), fy(fy), cx(cx), cy(cy), width(width), height(height) {
    validate();
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw ValidationError("intrinsics: focal lengths must be positive");
    if (width < 1 || height < 1)
        throw ValidationError("intrinsics: image size must be at least 1x1");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        throw ValidationError("intrinsics: principal point outside the image");
}

CameraPose::CameraPose(const Mat3& rotation, const Vec3& translation)
    : rotation(rotation), translation(translation) {
    validate();
}

void CameraPose::validate() const {
    const double ortho_err = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho_err > 1e-6)
        throw ValidationError("pose: rotation not orthonormal (error " + std::to_string(ortho_err) + ")");
    if (std::abs(rotation.determinant() - 1.0) > 1e-6)
        throw ValidationError("pose: rotation determinant is not +1");
    if (!translation.allFinite()) throw ValidationError("pose: non-finite translation");
}

void RigidTransform::validate() const {
    const double ortho_err = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho_err > 1e-6)
        throw ValidationError("transform: rotation not orthonormal (error " + std::to_string(ortho_err) + ")");
    if (std::abs(rotation.determinant() - 1.0) > 1e-6)
        throw ValidationError("transform: rotation determinant is not +1");
    if (!translation.allFinite()) throw ValidationError("transform: non-finite translation");
}

Image::Image(int width, int height)
    : width(width), height(height), pixels(3 * std::size_t(width) * height, 0.0f) {
    if (width < 0 || height < 0) throw ValidationError("image: negative dimensions");
}

Image::Image(int width, int height, std::vector<float> data)
    : width(width), height(height), pixels(std::move(data)) {
    validate();
}

void Image::validate() const {
    if (width < 0 || height < 0) throw ValidationError("image: negative dimensions");
    if (pixels.size() != 3 * pixel_count())
        throw ValidationError("image: pixel buffer size does not match dimensions");
    for (float v : pixels) {
        if (!(v >= 0.0f && v <= 1.0f))
            throw ValidationError("image: channel value outside [0,1]");
    }
}

DepthMap::DepthMap(int width, int height)
    : width(width), height(height), depths(std::size_t(width) * height, 0.0f) {
    if (width < 0 || height < 0) throw ValidationError("depth: negative dimensions");
}

DepthMap::DepthMap(int width, int height, std::vector<float> data)
    : width(width), height(height), depths(std::move(data)) {
    validate();
}

void DepthMap::validate() const {
    if (width < 0 || height < 0) throw ValidationError("depth: negative dimensions");
    if (depths.size() != std::size_t(width) * height)
        throw ValidationError("depth: buffer size does not match dimensions");
}

void Frame::validate() const {
    intrinsics.validate();
    pose.validate();
    if (image.width != intrinsics.width || image.height != intrinsics.height)
        throw ValidationError("frame: image dimensions disagree with intrinsics");
    if (depth.width != intrinsics.width || depth.height != intrinsics.height)
        throw ValidationError("frame: depth dimensions disagree with intrinsics");
    if (image.pixels.size() != 3 * image.pixel_count())
        throw ValidationError("frame: image buffer size mismatch");
    if (depth.depths.size() != std::size_t(depth.width) * depth.height)
        throw ValidationError("frame: depth buffer size mismatch");
}

void PointCloud::validate() const {
    if (colors.size() != positions.size() || confidences.size() != positions.size())
        throw ValidationError("point cloud: parallel arrays have different lengths");
    for (const Vec3& p : positions)
        if (!p.allFinite()) throw ValidationError("point cloud: non-finite position");
    for (float c : confidences)
        if (!(c >= 0.0f)) throw ValidationError("point cloud: negative confidence");
}

}  // namespace vwm
