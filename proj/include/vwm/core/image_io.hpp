#pragma once

#include <filesystem>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

/// Binary PPM (P6, maxval 255). Channels quantized to 8 bit on write.
void write_ppm(const std::filesystem::path& path, const Image& image);
Image read_ppm(const std::filesystem::path& path);

/// Binary boolean mask stored as PPM: white = true, black = false.
void write_mask_ppm(const std::filesystem::path& path, const std::vector<std::uint8_t>& mask,
                    int width, int height);
std::vector<std::uint8_t> read_mask_ppm(const std::filesystem::path& path, int* width,
                                        int* height);

/// Grayscale PFM ("Pf"), float32 little-endian, bottom-up row order.
void write_pfm(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_pfm(const std::filesystem::path& path);

inline std::uint8_t quantize_channel(float v) {
    int q = int(std::lround(double(v) * 255.0));
    if (q < 0) q = 0;
    if (q > 255) q = 255;
    return std::uint8_t(q);
}

inline float dequantize_channel(std::uint8_t b) { return float(b) / 255.0f; }

}  // namespace vwm
