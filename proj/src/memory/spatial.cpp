#include "vwm/memory/spatial.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SVD>

#include "vwm/core/error.hpp"
#include "vwm/core/rng.hpp"

namespace vwm {

std::size_t SpatialMemory::CellHash::operator()(const std::array<std::int64_t, 3>& c) const {
    std::uint64_t h = splitmix64(std::uint64_t(c[0]));
    h = splitmix64(h ^ std::uint64_t(c[1]));
    h = splitmix64(h ^ std::uint64_t(c[2]));
    return std::size_t(h);
}

SpatialMemory::SpatialMemory(double merge_voxel) : merge_voxel_(merge_voxel) {
    if (!(merge_voxel > 0.0))
        throw ValidationError("spatial memory: merge voxel size must be positive");
}

std::array<std::int64_t, 3> SpatialMemory::cell_of(const Vec3& position) const {
    return {std::int64_t(std::floor(position.x() / merge_voxel_)),
            std::int64_t(std::floor(position.y() / merge_voxel_)),
            std::int64_t(std::floor(position.z() / merge_voxel_))};
}

bool SpatialMemory::cell_occupied(const std::array<std::int64_t, 3>& cell) const {
    return cells_.count(cell) != 0;
}

std::size_t SpatialMemory::point_in_cell(const std::array<std::int64_t, 3>& cell) const {
    const auto it = cells_.find(cell);
    return it == cells_.end() ? npos : it->second;
}

void SpatialMemory::merge(const PointCloud& new_points, const RigidTransform& alignment) {
    new_points.validate();
    alignment.validate();

    for (std::size_t i = 0; i < new_points.size(); ++i) {
        const Vec3 p = alignment.apply(new_points.positions[i]);
        const float confidence = new_points.confidences[i];
        const auto cell = cell_of(p);
        const auto it = cells_.find(cell);
        if (it == cells_.end()) {
            cells_.emplace(cell, cloud_.size());
            cloud_.push_back(p, new_points.colors[i], confidence);
        } else if (confidence > cloud_.confidences[it->second]) {
            // Replace in place: storage order is insertion order.
            cloud_.positions[it->second] = p;
            cloud_.colors[it->second] = new_points.colors[i];
            cloud_.confidences[it->second] = confidence;
        }
    }
}

namespace {

// Exact nearest neighbor over the memory's one-point-per-cell grid by
// scanning Chebyshev shells outward until no farther shell can win.
class GridNearest {
public:
    explicit GridNearest(const SpatialMemory& memory) : memory_(memory) {
        lo_ = {std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max(),
               std::numeric_limits<std::int64_t>::max()};
        hi_ = {std::numeric_limits<std::int64_t>::min(), std::numeric_limits<std::int64_t>::min(),
               std::numeric_limits<std::int64_t>::min()};
        for (const Vec3& p : memory.cloud().positions) {
            const auto c = memory.cell_of(p);
            for (int a = 0; a < 3; ++a) {
                lo_[std::size_t(a)] = std::min(lo_[std::size_t(a)], c[std::size_t(a)]);
                hi_[std::size_t(a)] = std::max(hi_[std::size_t(a)], c[std::size_t(a)]);
            }
        }
    }

    std::size_t find(const Vec3& query, double* distance) const {
        const auto center = memory_.cell_of(query);
        std::int64_t max_shell = 0;
        for (int a = 0; a < 3; ++a) {
            max_shell = std::max(max_shell, std::abs(center[std::size_t(a)] - lo_[std::size_t(a)]));
            max_shell = std::max(max_shell, std::abs(center[std::size_t(a)] - hi_[std::size_t(a)]));
        }

        std::size_t best = SpatialMemory::npos;
        double best_d = std::numeric_limits<double>::infinity();
        const double cell = memory_.merge_voxel();
        for (std::int64_t s = 0; s <= max_shell; ++s) {
            // Any point in a cell at Chebyshev distance s is at least
            // (s - 1) * cell away; once that exceeds the best hit, stop.
            if (best != SpatialMemory::npos && double(s - 1) * cell > best_d) break;
            scan_shell(center, s, query, &best, &best_d);
        }
        *distance = best_d;
        return best;
    }

private:
    void scan_shell(const std::array<std::int64_t, 3>& center, std::int64_t s, const Vec3& query,
                    std::size_t* best, double* best_d) const {
        auto visit = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
            const std::size_t idx = memory_.point_in_cell({x, y, z});
            if (idx == SpatialMemory::npos) return;
            const double d = (memory_.cloud().positions[idx] - query).norm();
            if (d < *best_d) {
                *best_d = d;
                *best = idx;
            }
        };
        if (s == 0) {
            visit(center[0], center[1], center[2]);
            return;
        }
        for (std::int64_t dx = -s; dx <= s; ++dx) {
            for (std::int64_t dy = -s; dy <= s; ++dy) {
                for (std::int64_t dz = -s; dz <= s; ++dz) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != s) continue;
                    visit(center[0] + dx, center[1] + dy, center[2] + dz);
                }
            }
        }
    }

    const SpatialMemory& memory_;
    std::array<std::int64_t, 3> lo_, hi_;
};

// Closed-form least-squares rigid fit mapping sources onto targets
// (Kabsch via SVD, reflection-corrected).
RigidTransform fit_rigid(const std::vector<Vec3>& sources, const std::vector<Vec3>& targets) {
    const double n = double(sources.size());
    Vec3 src_mean = Vec3::Zero(), tgt_mean = Vec3::Zero();
    for (const Vec3& p : sources) src_mean += p;
    for (const Vec3& q : targets) tgt_mean += q;
    src_mean /= n;
    tgt_mean /= n;

    Mat3 cross = Mat3::Zero();
    for (std::size_t i = 0; i < sources.size(); ++i)
        cross += (sources[i] - src_mean) * (targets[i] - tgt_mean).transpose();

    Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;
    RigidTransform result;
    result.rotation = svd.matrixV() * flip * svd.matrixU().transpose();
    result.translation = tgt_mean - result.rotation * src_mean;
    return result;
}

}  // namespace

AlignmentResult align_chunk(const PointCloud& new_points, const SpatialMemory& memory,
                            AlignmentMode mode, int icp_iters) {
    if (mode == AlignmentMode::kKnownPoses) return {};

    if (new_points.empty() || memory.empty())
        throw ValidationError("align: both clouds must be non-empty in ICP mode");
    if (icp_iters < 1) throw ValidationError("align: iteration count must be positive");

    const GridNearest nearest(memory);
    const std::size_t n = new_points.size();

    AlignmentResult best;
    best.rms = std::numeric_limits<double>::infinity();
    RigidTransform current;
    double previous_rms = std::numeric_limits<double>::infinity();
    int rising = 0;

    std::vector<Vec3> sources(n), targets(n);
    for (int iter = 0; iter < icp_iters; ++iter) {
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 moved = current.apply(new_points.positions[i]);
            double dist = 0.0;
            const std::size_t match = nearest.find(moved, &dist);
            sources[i] = new_points.positions[i];
            targets[i] = memory.cloud().positions[match];
            sum_sq += dist * dist;
        }
        const double rms = std::sqrt(sum_sq / double(n));

        if (rms < best.rms) {
            best.rms = rms;
            best.transform = current;
            best.iterations = iter;
        }
        if (rms > previous_rms) {
            if (++rising >= 3) {
                best.diverged = true;
                return best;
            }
        } else {
            rising = 0;
        }
        previous_rms = rms;

        current = fit_rigid(sources, targets);
    }

    // Residual under the final fit, so the reported RMS matches the
    // returned transform.
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 moved = current.apply(new_points.positions[i]);
        double dist = 0.0;
        nearest.find(moved, &dist);
        sum_sq += dist * dist;
    }
    const double final_rms = std::sqrt(sum_sq / double(n));
    if (final_rms <= best.rms) {
        best.rms = final_rms;
        best.transform = current;
        best.iterations = icp_iters;
    }
    return best;
}

}  // namespace vwm
