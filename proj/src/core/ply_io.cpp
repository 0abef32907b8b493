#include "vwm/core/ply_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vwm/core/error.hpp"
#include "vwm/core/image_io.hpp"

namespace vwm {

namespace {

constexpr std::size_t kVertexBytes = 3 * sizeof(float) + 3 + sizeof(float);  // 19

const char* kExpectedProperties[] = {
    "property float x",         "property float y",    "property float z",
    "property uchar red",       "property uchar green", "property uchar blue",
    "property float confidence",
};

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw ValidationError(path.string() + ": " + what);
}

}  // namespace

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
    cloud.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");

    out << "ply\n"
        << "format binary_little_endian 1.0\n"
        << "element vertex " << cloud.size() << "\n";
    for (const char* prop : kExpectedProperties) out << prop << "\n";
    out << "end_header\n";

    std::vector<char> record(kVertexBytes);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const float xyz[3] = {float(cloud.positions[i].x()), float(cloud.positions[i].y()),
                              float(cloud.positions[i].z())};
        const std::uint8_t rgb[3] = {quantize_channel(float(cloud.colors[i].x())),
                                     quantize_channel(float(cloud.colors[i].y())),
                                     quantize_channel(float(cloud.colors[i].z()))};
        const float conf = cloud.confidences[i];
        std::memcpy(record.data(), xyz, 12);
        std::memcpy(record.data() + 12, rgb, 3);
        std::memcpy(record.data() + 15, &conf, 4);
        out.write(record.data(), std::streamsize(record.size()));
    }
    if (!out) throw ValidationError(path.string() + ": write failed");
}

PointCloud read_ply(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string() + ": cannot open for reading");

    std::string line;
    auto next_line = [&](const char* what) -> const std::string& {
        if (!std::getline(in, line)) fail(path, std::string("truncated header: missing ") + what);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };

    if (next_line("magic") != "ply") fail(path, "bad magic '" + line + "' (expected 'ply')");
    if (next_line("format") != "format binary_little_endian 1.0")
        fail(path, "unsupported format '" + line + "'");

    std::size_t vertex_count = 0;
    {
        const std::string& decl = next_line("element declaration");
        std::istringstream iss(decl);
        std::string kw, name;
        if (!(iss >> kw >> name >> vertex_count) || kw != "element" || name != "vertex")
            fail(path, "bad element declaration '" + decl + "'");
    }
    for (const char* prop : kExpectedProperties) {
        if (next_line("property") != prop)
            fail(path, "unexpected property line '" + line + "' (expected '" + prop + "')");
    }
    if (next_line("end_header") != "end_header") fail(path, "missing end_header, got '" + line + "'");

    PointCloud cloud;
    cloud.positions.reserve(vertex_count);
    cloud.colors.reserve(vertex_count);
    cloud.confidences.reserve(vertex_count);
    std::vector<char> record(kVertexBytes);
    for (std::size_t i = 0; i < vertex_count; ++i) {
        in.read(record.data(), std::streamsize(record.size()));
        if (std::size_t(in.gcount()) != record.size())
            fail(path, "truncated vertex data in record " + std::to_string(i));
        float xyz[3];
        std::uint8_t rgb[3];
        float conf;
        std::memcpy(xyz, record.data(), 12);
        std::memcpy(rgb, record.data() + 12, 3);
        std::memcpy(&conf, record.data() + 15, 4);
        cloud.push_back(Vec3(xyz[0], xyz[1], xyz[2]),
                        Vec3(dequantize_channel(rgb[0]), dequantize_channel(rgb[1]),
                             dequantize_channel(rgb[2])),
                        conf);
    }
    return cloud;
}

}  // namespace vwm
