#include "vwm/core/image_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; big-endian hosts unsupported");

namespace vwm {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what,
                       std::streamoff offset = -1) {
    std::string msg = path.string() + ": " + what;
    if (offset >= 0) msg += " at byte offset " + std::to_string(offset);
    throw ValidationError(msg);
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string() + ": cannot open for reading");
    return in;
}

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(char(c));
        c = in.get();
    }
    return tok;
}

int parse_dim(std::istream& in, const std::filesystem::path& path, const char* name) {
    const std::string tok = next_token(in);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v < 1) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        fail(path, std::string("bad ") + name + " field '" + tok + "'",
             in.tellg() >= 0 ? std::streamoff(in.tellg()) : -1);
    }
}

void write_ppm_payload(std::ofstream& out, int width, int height,
                       const std::vector<std::uint8_t>& bytes) {
    out << "P6\n" << width << " " << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw ValidationError("ppm: write failed");
}

std::vector<std::uint8_t> read_ppm_payload(const std::filesystem::path& path, int* width,
                                           int* height) {
    auto in = open_in(path);
    const std::string magic = next_token(in);
    if (magic != "P6") fail(path, "bad magic '" + magic + "' (expected 'P6')", 0);
    const int w = parse_dim(in, path, "width");
    const int h = parse_dim(in, path, "height");
    const std::string maxval = next_token(in);
    if (maxval != "255")
        fail(path, "unsupported maxval '" + maxval + "' (expected 255)", std::streamoff(in.tellg()));
    // The maxval token is followed by exactly one whitespace byte, already
    // consumed by the tokenizer.
    std::vector<std::uint8_t> bytes(std::size_t(w) * h * 3);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(bytes.size()));
    if (std::size_t(in.gcount()) != bytes.size())
        fail(path, "truncated pixel data (expected " + std::to_string(bytes.size()) + " bytes, got " +
                       std::to_string(in.gcount()) + ")");
    if (width) *width = w;
    if (height) *height = h;
    return bytes;
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Image& image) {
    image.validate();
    std::vector<std::uint8_t> bytes(image.pixels.size());
    for (std::size_t i = 0; i < image.pixels.size(); ++i) bytes[i] = quantize_channel(image.pixels[i]);
    auto out = open_out(path);
    write_ppm_payload(out, image.width, image.height, bytes);
}

Image read_ppm(const std::filesystem::path& path) {
    int w = 0, h = 0;
    const auto bytes = read_ppm_payload(path, &w, &h);
    std::vector<float> pixels(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) pixels[i] = dequantize_channel(bytes[i]);
    return Image(w, h, std::move(pixels));
}

void write_mask_ppm(const std::filesystem::path& path, const std::vector<std::uint8_t>& mask,
                    int width, int height) {
    if (mask.size() != std::size_t(width) * height)
        throw ValidationError("mask: size does not match dimensions");
    std::vector<std::uint8_t> bytes(mask.size() * 3);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const std::uint8_t v = mask[i] ? 255 : 0;
        bytes[3 * i] = bytes[3 * i + 1] = bytes[3 * i + 2] = v;
    }
    auto out = open_out(path);
    write_ppm_payload(out, width, height, bytes);
}

std::vector<std::uint8_t> read_mask_ppm(const std::filesystem::path& path, int* width,
                                        int* height) {
    const auto bytes = read_ppm_payload(path, width, height);
    std::vector<std::uint8_t> mask(bytes.size() / 3);
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = bytes[3 * i] >= 128 ? 1 : 0;
    return mask;
}

void write_pfm(const std::filesystem::path& path, const DepthMap& depth) {
    depth.validate();
    auto out = open_out(path);
    out << "Pf\n" << depth.width << " " << depth.height << "\n-1.0\n";
    // PFM rows run bottom-up.
    for (int y = depth.height - 1; y >= 0; --y) {
        out.write(reinterpret_cast<const char*>(depth.depths.data() + std::size_t(y) * depth.width),
                  std::streamsize(sizeof(float) * depth.width));
    }
    if (!out) throw ValidationError(path.string() + ": write failed");
}

DepthMap read_pfm(const std::filesystem::path& path) {
    auto in = open_in(path);
    const std::string magic = next_token(in);
    if (magic != "Pf") fail(path, "bad magic '" + magic + "' (expected grayscale 'Pf')", 0);
    const int w = parse_dim(in, path, "width");
    const int h = parse_dim(in, path, "height");
    const std::string scale_tok = next_token(in);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception&) {
        fail(path, "bad scale field '" + scale_tok + "'");
    }
    if (scale >= 0.0) fail(path, "big-endian PFM (nonnegative scale) unsupported");

    std::vector<float> row(static_cast<std::size_t>(w));
    std::vector<float> depths(std::size_t(w) * h);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), std::streamsize(sizeof(float) * w));
        if (in.gcount() != std::streamsize(sizeof(float) * w))
            fail(path, "truncated sample data in row " + std::to_string(y));
        std::memcpy(depths.data() + std::size_t(y) * w, row.data(), sizeof(float) * w);
    }
    const double magnitude = -scale;
    if (magnitude != 1.0) {
        for (float& d : depths) d = float(d * magnitude);
    }
    return DepthMap(w, h, std::move(depths));
}

}  // namespace vwm
