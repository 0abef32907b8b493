#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

// On-disk frame dataset layout:
//   dir/intrinsics.json
//   dir/trajectory.json            (pose per frame, ordered)
//   dir/rgb/NNNN.ppm               (NNNN = 4-digit zero-padded frame index)
//   dir/depth/NNNN.pfm
//   dir/static_mask/NNNN.ppm       (optional ground-truth labels)
struct FrameDataset {
    CameraIntrinsics intrinsics;
    std::vector<Frame> frames;
    // Parallel to frames when present: per-pixel true = static surface or sky.
    std::vector<std::vector<std::uint8_t>> static_masks;

    bool has_masks() const { return !static_masks.empty(); }
};

std::string frame_name(int index);  // "%04d"

void write_frame_dataset(const std::filesystem::path& dir, const FrameDataset& dataset);
FrameDataset read_frame_dataset(const std::filesystem::path& dir);

}  // namespace vwm
