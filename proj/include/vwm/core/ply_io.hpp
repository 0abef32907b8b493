#pragma once

#include <filesystem>

#include "vwm/core/types.hpp"

namespace vwm {

// Binary little-endian PLY with per-vertex layout:
//   float x, y, z; uchar red, green, blue; float confidence
// Colors are quantized to 8 bits on write and mapped back to [0,1] on read.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);
PointCloud read_ply(const std::filesystem::path& path);

}  // namespace vwm
