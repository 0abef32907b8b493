#pragma once

#include <cstdint>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

/// Peak signal-to-noise ratio over RGB with range 1: 10*log10(1/MSE),
/// capped at 100 dB for identical inputs. With a mask, the MSE runs over
/// the true pixels only (all three channels); the mask must select at
/// least one pixel.
double psnr(const Image& a, const Image& b, const std::vector<std::uint8_t>* mask = nullptr);

/// Single-scale SSIM on Rec.601 luma: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, range 1, averaged over window positions that lie
/// fully inside the image. Requires min(width, height) >= 11.
double ssim(const Image& a, const Image& b);

}  // namespace vwm
