#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

/// Fusion parameters. Distances are meters unless noted; the signed-distance
/// field itself is stored normalized by the truncation band.
struct FusionConfig {
    double truncation = 0.0;     // meters; 0 = auto (5 x voxel_size)
    double frame_weight = 1.0;   // per-frame confidence w
    int max_grid_dim = 1200;     // voxel-count cap per axis (non-strict)
    double min_weight = 3.0;     // extraction: minimum accumulated W
    double surface_band = 0.25;  // extraction: |D| band, normalized
    double variance_cap = 0.15;  // extraction: cap on M2/W, normalized^2
    bool variance_filter_enabled = true;

    double resolved_truncation(double voxel_size) const {
        return truncation > 0.0 ? truncation : 5.0 * voxel_size;
    }

    // All thresholds positive; truncation (resolved) >= voxel_size.
    void validate(double voxel_size) const;
};

/// Grid placement for a bounding box: dims = ceil(extent / voxel) per axis;
/// if the largest dim would exceed the cap, the voxel size is scaled up to
/// max_extent / cap and dims recomputed. Pure arithmetic — no allocation.
struct GridGeometry {
    Vec3 origin = Vec3::Zero();  // min corner
    double voxel_size = 0.0;
    std::array<int, 3> dims = {0, 0, 0};
};

GridGeometry compute_grid_geometry(const Vec3& bounds_min, const Vec3& bounds_max,
                                   double requested_voxel_size, int max_grid_dim);

/// Dense truncated signed-distance volume with per-voxel weight, color, and
/// an online variance accumulator. D is normalized: stored value = clamped
/// sdf / truncation, in [-1, 1]. Unobserved voxels hold D = 1 (free), W = 0.
struct TsdfVolume {
    Vec3 origin = Vec3::Zero();
    double voxel_size = 0.0;
    std::array<int, 3> dims = {0, 0, 0};
    double truncation = 0.0;  // meters

    std::vector<float> d;      // normalized signed distance, x fastest
    std::vector<float> w;      // accumulated weight
    std::vector<float> m2;     // sum of weighted squared deviations of d
    std::vector<float> color;  // weighted-mean RGB, 3 per voxel

    std::size_t voxel_count() const { return d.size(); }

    std::size_t linear_index(int ix, int iy, int iz) const {
        return std::size_t(ix) + std::size_t(dims[0]) * (std::size_t(iy) + std::size_t(dims[1]) * iz);
    }

    Vec3 voxel_center(int ix, int iy, int iz) const {
        return origin + Vec3((ix + 0.5) * voxel_size, (iy + 0.5) * voxel_size,
                             (iz + 0.5) * voxel_size);
    }

    /// Weighted variance of the contributions at a voxel; only meaningful
    /// where w > 0.
    double variance_at(std::size_t idx) const { return double(m2[idx]) / double(w[idx]); }
};

TsdfVolume new_volume(const Vec3& bounds_min, const Vec3& bounds_max,
                      double requested_voxel_size, const FusionConfig& cfg);

/// Normalized truncated signed distance of a world point as seen by one
/// frame: (depth_at_pixel - z_point) / truncation, clamped above at +1.
/// Absent when the point is behind the camera, projects off-image, looks at
/// an invalid depth, or lies more than one truncation band behind the
/// observed surface.
std::optional<double> voxel_sdf(const Vec3& voxel_center_world, const Frame& frame,
                                double truncation);

/// Folds one frame into the volume by weighted averaging:
///   D' = (W*D + w*d) / (W + w),  W' = W + w,
/// with the color accumulator updated by the same rule using the color of
/// the pixel the voxel projects to, and M2 updated online so that M2/W is
/// the weighted population variance of all contributions. Voxels whose sdf
/// is absent are untouched. Bit-identical across thread counts.
void integrate_frame(TsdfVolume& volume, const Frame& frame, const FusionConfig& cfg,
                     int threads = 1);

/// Emits one point per voxel passing all of: W >= min_weight,
/// |D| <= surface_band, and (when the variance filter is on)
/// M2/W <= variance_cap. Position is the voxel center, color the voxel
/// color, confidence the accumulated weight. Points are ordered
/// lexicographically by (x, y, z) voxel index.
PointCloud extract_static_points(const TsdfVolume& volume, const FusionConfig& cfg);

/// Binary checkpoint: magic "TSDF", version, grid header, then the D, W,
/// M2, and color arrays (float32, little-endian, x fastest).
void save_volume(const std::filesystem::path& path, const TsdfVolume& volume);
TsdfVolume load_volume(const std::filesystem::path& path);

}  // namespace vwm
