#include "vwm/core/json_io.hpp"

#include <fstream>

#include <json.hpp>

#include "vwm/core/error.hpp"

namespace vwm {

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw ValidationError(path.string() + ": write failed");
}

double require_number(const json& obj, const char* key, const std::filesystem::path& path) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ValidationError(path.string() + ": missing or non-numeric field '" + key + "'");
    return obj[key].get<double>();
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const std::vector<CameraPose>& poses) {
    json arr = json::array();
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const CameraPose& p = poses[i];
        json rot = json::array();
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) rot.push_back(p.rotation(r, c));
        arr.push_back({{"index", i},
                       {"rotation", rot},
                       {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}}});
    }
    save_json(path, arr);
}

std::vector<CameraPose> read_trajectory(const std::filesystem::path& path) {
    const json arr = load_json(path);
    if (!arr.is_array()) throw ValidationError(path.string() + ": trajectory must be a JSON array");
    std::vector<CameraPose> poses;
    poses.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const json& entry = arr[i];
        const std::string where = path.string() + ": entry " + std::to_string(i);
        if (!entry.is_object()) throw ValidationError(where + " is not an object");
        if (!entry.contains("rotation") || !entry["rotation"].is_array() ||
            entry["rotation"].size() != 9)
            throw ValidationError(where + ": 'rotation' must be an array of 9 numbers");
        if (!entry.contains("translation") || !entry["translation"].is_array() ||
            entry["translation"].size() != 3)
            throw ValidationError(where + ": 'translation' must be an array of 3 numbers");
        Mat3 rot;
        for (int k = 0; k < 9; ++k) rot(k / 3, k % 3) = entry["rotation"][k].get<double>();
        Vec3 trans(entry["translation"][0].get<double>(), entry["translation"][1].get<double>(),
                   entry["translation"][2].get<double>());
        try {
            poses.emplace_back(rot, trans);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return poses;
}

void write_intrinsics(const std::filesystem::path& path, const CameraIntrinsics& intrinsics) {
    save_json(path, json{{"fx", intrinsics.fx},
                         {"fy", intrinsics.fy},
                         {"cx", intrinsics.cx},
                         {"cy", intrinsics.cy},
                         {"width", intrinsics.width},
                         {"height", intrinsics.height}});
}

CameraIntrinsics read_intrinsics(const std::filesystem::path& path) {
    const json obj = load_json(path);
    if (!obj.is_object()) throw ValidationError(path.string() + ": intrinsics must be a JSON object");
    try {
        return CameraIntrinsics(require_number(obj, "fx", path), require_number(obj, "fy", path),
                                require_number(obj, "cx", path), require_number(obj, "cy", path),
                                int(require_number(obj, "width", path)),
                                int(require_number(obj, "height", path)));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

}  // namespace vwm
