#include "vwm/memory/episodic.hpp"

#include <algorithm>

#include "vwm/core/geometry.hpp"

namespace vwm {

EpisodicMemory::EpisodicMemory(double threshold, std::size_t capacity)
    : threshold_(threshold), capacity_(capacity) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw ValidationError("episodic: threshold must lie in (0,1)");
    if (capacity < 1) throw ValidationError("episodic: capacity must be positive");
}

bool EpisodicMemory::consider(const Frame& frame, double reveal) {
    if (!(reveal >= 0.0 && reveal <= 1.0))
        throw ValidationError("episodic: reveal fraction must lie in [0,1]");
    if (!(reveal > threshold_)) return false;  // strict threshold

    slots_.push_back({frame, reveal, frame.index});
    if (slots_.size() > capacity_) {
        // Evict the smallest reveal score; the scan keeps the first (oldest)
        // of equals, and slots are stored oldest-first.
        std::size_t victim = 0;
        for (std::size_t i = 1; i < slots_.size(); ++i)
            if (slots_[i].reveal_score < slots_[victim].reveal_score) victim = i;
        slots_.erase(slots_.begin() + std::ptrdiff_t(victim));
    }
    return true;
}

double EpisodicMemory::frustum_overlap(const CameraPose& query_pose,
                                       const CameraIntrinsics& query_intr,
                                       const Frame& slot_frame) {
    constexpr int kGrid = 8;
    int inside = 0;
    for (int j = 0; j < kGrid; ++j) {
        for (int k = 0; k < kGrid; ++k) {
            const double u = (k + 0.5) * query_intr.width / kGrid;
            const double v = (j + 0.5) * query_intr.height / kGrid;
            const Vec3 world = query_pose.cam_to_world(backproject(u, v, 1.0, query_intr));
            const Vec3 in_slot = slot_frame.pose.world_to_cam(world);
            if (project(in_slot, slot_frame.intrinsics)) ++inside;
        }
    }
    return double(inside) / (kGrid * kGrid);
}

std::vector<Frame> EpisodicMemory::retrieve(const CameraPose& pose, const CameraIntrinsics& intr,
                                            int n) const {
    if (n < 1) throw ValidationError("episodic: retrieval count must be positive");

    std::vector<std::pair<double, std::size_t>> ranked;  // (score, slot index)
    ranked.reserve(slots_.size());
    for (std::size_t i = 0; i < slots_.size(); ++i)
        ranked.emplace_back(frustum_overlap(pose, intr, slots_[i].frame), i);

    // Score descending; ties toward more recent slots. Scores are multiples
    // of 1/64, so equality comparison is exact.
    std::sort(ranked.begin(), ranked.end(), [this](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return slots_[a.second].step_index > slots_[b.second].step_index;
    });

    std::vector<Frame> result;
    const std::size_t take = std::min(std::size_t(n), ranked.size());
    result.reserve(take);
    for (std::size_t i = 0; i < take; ++i) result.push_back(slots_[ranked[i].second].frame);
    return result;
}

}  // namespace vwm
