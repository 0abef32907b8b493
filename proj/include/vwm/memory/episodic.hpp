#pragma once

#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

struct EpisodicSlot {
    Frame frame;
    double reveal_score = 0.0;
    int step_index = 0;  // the frame's position in the generation stream
};

/// Sparse keyframe bank. A frame is admitted only when its reveal fraction
/// strictly exceeds the threshold; past capacity, the slot with the smallest
/// reveal score is evicted (ties evict the oldest). Slots stay ordered by
/// step index.
class EpisodicMemory {
public:
    explicit EpisodicMemory(double threshold = 0.3, std::size_t capacity = 64);

    /// Returns whether the frame was accepted into a slot.
    bool consider(const Frame& frame, double reveal);

    /// Ranks slots by view-frustum overlap with the query pose — the
    /// fraction of a fixed 8x8 grid of unit-depth query rays whose world
    /// points project inside the slot frame's image with positive depth —
    /// and returns the top n frames (ties broken toward more recent slots).
    std::vector<Frame> retrieve(const CameraPose& pose, const CameraIntrinsics& intr,
                                int n) const;

    /// Overlap score used by retrieve, exposed for inspection.
    static double frustum_overlap(const CameraPose& query_pose, const CameraIntrinsics& query_intr,
                                  const Frame& slot_frame);

    const std::vector<EpisodicSlot>& slots() const { return slots_; }
    double threshold() const { return threshold_; }
    std::size_t capacity() const { return capacity_; }

private:
    double threshold_ = 0.3;
    std::size_t capacity_ = 64;
    std::vector<EpisodicSlot> slots_;
};

}  // namespace vwm
