#include "vwm/eval/metrics.hpp"

#include <array>
#include <cmath>

#include "vwm/core/error.hpp"

namespace vwm {

double psnr(const Image& a, const Image& b, const std::vector<std::uint8_t>* mask) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("psnr: image dimensions differ");
    if (mask && mask->size() != a.pixel_count())
        throw ValidationError("psnr: mask size does not match the images");

    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < a.pixel_count(); ++p) {
        if (mask && (*mask)[p] == 0) continue;
        for (int c = 0; c < 3; ++c) {
            const double diff = double(a.pixels[3 * p + c]) - double(b.pixels[3 * p + c]);
            sum_sq += diff * diff;
        }
        ++count;
    }
    if (count == 0) throw ValidationError("psnr: mask selects no pixels");

    const double mse = sum_sq / double(3 * count);
    if (mse == 0.0) return 100.0;
    return std::min(10.0 * std::log10(1.0 / mse), 100.0);
}

namespace {

constexpr int kWindow = 11;
constexpr int kHalf = kWindow / 2;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> taps{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double x = i - kHalf;
        taps[std::size_t(i)] = std::exp(-x * x / (2.0 * 1.5 * 1.5));
        sum += taps[std::size_t(i)];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

std::vector<double> luma(const Image& img) {
    std::vector<double> out(img.pixel_count());
    for (std::size_t p = 0; p < out.size(); ++p) {
        out[p] = 0.299 * img.pixels[3 * p] + 0.587 * img.pixels[3 * p + 1] +
                 0.114 * img.pixels[3 * p + 2];
    }
    return out;
}

// Separable valid-region Gaussian convolution: output is (w-10) x (h-10).
std::vector<double> blur_valid(const std::vector<double>& in, int w, int h,
                               const std::array<double, kWindow>& taps) {
    const int out_w = w - kWindow + 1;
    std::vector<double> rows(std::size_t(out_w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k) acc += taps[std::size_t(k)] * in[std::size_t(y) * w + x + k];
            rows[std::size_t(y) * out_w + x] = acc;
        }
    }
    const int out_h = h - kWindow + 1;
    std::vector<double> out(std::size_t(out_w) * out_h);
    for (int y = 0; y < out_h; ++y) {
        for (int x = 0; x < out_w; ++x) {
            double acc = 0.0;
            for (int k = 0; k < kWindow; ++k)
                acc += taps[std::size_t(k)] * rows[std::size_t(y + k) * out_w + x];
            out[std::size_t(y) * out_w + x] = acc;
        }
    }
    return out;
}

}  // namespace

double ssim(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height)
        throw ValidationError("ssim: image dimensions differ");
    if (a.width < kWindow || a.height < kWindow)
        throw ValidationError("ssim: image smaller than the 11x11 window");

    constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
    constexpr double kC2 = 0.03 * 0.03;

    const auto taps = gaussian_taps();
    const int w = a.width, h = a.height;
    const std::vector<double> la = luma(a);
    const std::vector<double> lb = luma(b);

    std::vector<double> la2(la.size()), lb2(la.size()), lab(la.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        la2[i] = la[i] * la[i];
        lb2[i] = lb[i] * lb[i];
        lab[i] = la[i] * lb[i];
    }

    const std::vector<double> mu_a = blur_valid(la, w, h, taps);
    const std::vector<double> mu_b = blur_valid(lb, w, h, taps);
    const std::vector<double> m_a2 = blur_valid(la2, w, h, taps);
    const std::vector<double> m_b2 = blur_valid(lb2, w, h, taps);
    const std::vector<double> m_ab = blur_valid(lab, w, h, taps);

    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double var_a = m_a2[i] - mu_a[i] * mu_a[i];
        const double var_b = m_b2[i] - mu_b[i] * mu_b[i];
        const double cov = m_ab[i] - mu_a[i] * mu_b[i];
        total += ((2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2)) /
                 ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (var_a + var_b + kC2));
    }
    return total / double(mu_a.size());
}

}  // namespace vwm
