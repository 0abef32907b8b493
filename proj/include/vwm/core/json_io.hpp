#pragma once

#include <filesystem>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

// Trajectory file: JSON array of
//   {"index": int, "rotation": [9 doubles, row-major], "translation": [3 doubles]}
// Rotations are camera-to-world; each entry is validated on load.
void write_trajectory(const std::filesystem::path& path, const std::vector<CameraPose>& poses);
std::vector<CameraPose> read_trajectory(const std::filesystem::path& path);

// Intrinsics file: {"fx","fy","cx","cy","width","height"}.
void write_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& intrinsics);
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);

}  // namespace vwm
