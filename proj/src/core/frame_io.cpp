#include "vwm/core/frame_io.hpp"

#include <cstdio>

#include "vwm/core/error.hpp"
#include "vwm/core/image_io.hpp"
#include "vwm/core/json_io.hpp"

namespace vwm {

namespace fs = std::filesystem;

std::string frame_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", index);
    return buf;
}

void write_frame_dataset(const fs::path& dir, const FrameDataset& dataset) {
    if (!dataset.static_masks.empty() && dataset.static_masks.size() != dataset.frames.size())
        throw ValidationError("dataset: static mask count does not match frame count");

    fs::create_directories(dir / "rgb");
    fs::create_directories(dir / "depth");
    if (dataset.has_masks()) fs::create_directories(dir / "static_mask");

    write_intrinsics(dir / "intrinsics.json", dataset.intrinsics);
    std::vector<CameraPose> poses;
    poses.reserve(dataset.frames.size());
    for (const Frame& f : dataset.frames) poses.push_back(f.pose);
    write_trajectory(dir / "trajectory.json", poses);

    for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
        const Frame& f = dataset.frames[i];
        const std::string name = frame_name(int(i));
        write_ppm(dir / "rgb" / (name + ".ppm"), f.image);
        write_pfm(dir / "depth" / (name + ".pfm"), f.depth);
        if (dataset.has_masks())
            write_mask_ppm(dir / "static_mask" / (name + ".ppm"), dataset.static_masks[i],
                           f.image.width, f.image.height);
    }
}

FrameDataset read_frame_dataset(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ValidationError(dir.string() + ": not a directory");

    FrameDataset dataset;
    dataset.intrinsics = read_intrinsics(dir / "intrinsics.json");
    const std::vector<CameraPose> poses = read_trajectory(dir / "trajectory.json");

    const bool with_masks = fs::is_directory(dir / "static_mask");
    dataset.frames.reserve(poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const std::string name = frame_name(int(i));
        Frame frame;
        frame.index = int(i);
        frame.intrinsics = dataset.intrinsics;
        frame.pose = poses[i];
        frame.image = read_ppm(dir / "rgb" / (name + ".ppm"));
        frame.depth = read_pfm(dir / "depth" / (name + ".pfm"));
        frame.validate();
        dataset.frames.push_back(std::move(frame));
        if (with_masks) {
            int mw = 0, mh = 0;
            auto mask = read_mask_ppm(dir / "static_mask" / (name + ".ppm"), &mw, &mh);
            if (mw != dataset.intrinsics.width || mh != dataset.intrinsics.height)
                throw ValidationError(dir.string() + ": static mask " + name +
                                      " dimensions disagree with intrinsics");
            dataset.static_masks.push_back(std::move(mask));
        }
    }
    return dataset;
}

}  // namespace vwm
