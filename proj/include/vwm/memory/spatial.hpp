#pragma once

#include <array>
#include <cstdint>
#include <unordered_map>

#include "vwm/core/types.hpp"

namespace vwm {

/// Persistent fused static point cloud in one fixed world frame,
/// deduplicated on a voxel grid: cells are keyed by floor(position / cell
/// size) and hold at most one point each. On collision the higher-confidence
/// point survives (tie keeps the resident), replacing in place so storage
/// order stays deterministic.
class SpatialMemory {
public:
    explicit SpatialMemory(double merge_voxel);

    /// Transforms new points by `alignment`, then inserts them under the
    /// deduplication rule. Merging the same aligned cloud twice is a no-op.
    void merge(const PointCloud& new_points, const RigidTransform& alignment);

    const PointCloud& cloud() const { return cloud_; }
    double merge_voxel() const { return merge_voxel_; }
    std::size_t size() const { return cloud_.size(); }
    bool empty() const { return cloud_.empty(); }

    std::array<std::int64_t, 3> cell_of(const Vec3& position) const;
    bool cell_occupied(const std::array<std::int64_t, 3>& cell) const;

    /// Index of the point stored in the cell containing `position`, or npos.
    std::size_t point_in_cell(const std::array<std::int64_t, 3>& cell) const;
    static constexpr std::size_t npos = std::size_t(-1);

private:
    struct CellHash {
        std::size_t operator()(const std::array<std::int64_t, 3>& c) const;
    };

    double merge_voxel_ = 0.0;
    PointCloud cloud_;
    std::unordered_map<std::array<std::int64_t, 3>, std::size_t, CellHash> cells_;
};

enum class AlignmentMode { kKnownPoses, kIcp };

struct AlignmentResult {
    RigidTransform transform;  // maps new_points into the memory frame
    double rms = 0.0;          // final point-to-point RMS residual
    int iterations = 0;
    bool diverged = false;
};

/// Estimates the rigid transform carrying `new_points` into the memory
/// frame. Known-poses mode returns the identity (one shared world frame).
/// ICP mode alternates nearest-neighbor matching on the memory's
/// deduplication grid with a closed-form rigid fit; if the residual rises
/// three iterations in a row it stops and returns the best transform seen,
/// flagged as diverged. Throws if either cloud is empty in ICP mode.
AlignmentResult align_chunk(const PointCloud& new_points, const SpatialMemory& memory,
                            AlignmentMode mode, int icp_iters = 20);

}  // namespace vwm
