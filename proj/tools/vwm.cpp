// vwm: command-line driver for the spatial-memory world engine.
//
// Subcommands compose through files: `simulate` writes oracle RGB-D frame
// datasets, `fuse` turns a dataset into a TSDF checkpoint plus a static
// point cloud, `render` splats a point cloud along a trajectory, `run`
// executes the full autoregressive memory loop, `segment` / `build-pairs`
// produce paired training samples, and `eval-recall` / `eval-suppression`
// score outputs. Every subcommand writes the fully resolved configuration
// next to its outputs and is deterministic in (inputs, config, seed).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vwm/core/error.hpp"
#include "vwm/core/frame_io.hpp"
#include "vwm/core/geometry.hpp"
#include "vwm/core/image_io.hpp"
#include "vwm/core/json_io.hpp"
#include "vwm/core/ply_io.hpp"
#include "vwm/core/types.hpp"
#include "vwm/eval/metrics.hpp"
#include "vwm/eval/recall.hpp"
#include "vwm/memory/spatial.hpp"
#include "vwm/pipeline/pipeline.hpp"
#include "vwm/render/splat.hpp"
#include "vwm/tsdf/volume.hpp"
#include "vwm/worldsim/noise.hpp"
#include "vwm/worldsim/scene.hpp"
#include "vwm/worldsim/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void save_json_file(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

json load_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw vwm::ValidationError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw vwm::ValidationError(path.string() + ": " + e.what());
    }
    return j;
}

// Applies a --config JSON file under explicit-flag precedence: a key fills
// its field only when the matching flag was not passed on the command line.
// Every key must correspond to a known field; leftovers are rejected.
class ConfigMerge {
public:
    ConfigMerge(const std::string& config_path, CLI::App* cmd) : cmd_(cmd) {
        if (config_path.empty()) return;
        loaded_ = load_json_file(config_path);
        if (!loaded_.is_object())
            throw vwm::ValidationError("config: root of " + config_path + " must be an object");
    }

    template <typename T>
    void field(const std::string& key, const std::string& flag, T& value) {
        if (!loaded_.is_object()) return;
        auto it = loaded_.find(key);
        if (it == loaded_.end()) return;
        consumed_.insert(key);
        if (cmd_->count(flag) > 0) return;
        try {
            value = it->get<T>();
        } catch (const json::exception&) {
            throw vwm::ValidationError("config: key '" + key + "' has the wrong type");
        }
    }

    void finish() const {
        if (!loaded_.is_object()) return;
        for (const auto& item : loaded_.items()) {
            if (!consumed_.count(item.key()))
                throw vwm::ValidationError("config: unknown key '" + item.key() + "'");
        }
    }

private:
    CLI::App* cmd_;
    json loaded_;
    std::set<std::string> consumed_;
};

vwm::ScenePreset parse_preset(const std::string& name) {
    if (name == "room-with-mover") return vwm::ScenePreset::kRoomWithMover;
    if (name == "corridor") return vwm::ScenePreset::kCorridor;
    throw vwm::ValidationError("unknown preset '" + name +
                               "' (expected room-with-mover or corridor)");
}

vwm::TrajectoryKind parse_trajectory_kind(const std::string& name) {
    if (name == "orbit") return vwm::TrajectoryKind::kOrbit;
    if (name == "forward-reverse") return vwm::TrajectoryKind::kForwardReverse;
    if (name == "random-walk") return vwm::TrajectoryKind::kRandomWalk;
    throw vwm::ValidationError("unknown trajectory '" + name +
                               "' (expected orbit, forward-reverse, or random-walk)");
}

vwm::AlignmentMode parse_alignment(const std::string& name) {
    if (name == "known-poses") return vwm::AlignmentMode::kKnownPoses;
    if (name == "icp") return vwm::AlignmentMode::kIcp;
    throw vwm::ValidationError("unknown alignment '" + name + "' (expected known-poses or icp)");
}

vwm::CameraIntrinsics make_intrinsics(int width, int height, double focal) {
    vwm::CameraIntrinsics intr;
    intr.width = width;
    intr.height = height;
    intr.fx = focal > 0.0 ? focal : 0.9 * width;
    intr.fy = intr.fx;
    intr.cx = (width - 1) / 2.0;
    intr.cy = (height - 1) / 2.0;
    intr.validate();
    return intr;
}

// Camera paths sized to each preset's interior.
vwm::TrajectoryParams preset_trajectory_params(vwm::ScenePreset preset, std::uint64_t seed) {
    vwm::TrajectoryParams p;
    p.seed = seed;
    if (preset == vwm::ScenePreset::kRoomWithMover) {
        // High, steeply pitched orbit: keeps floor and box-top incidence
        // angles moderate so fused surface distances stay in the band.
        p.target = vwm::Vec3(0.0, 0.3, 0.0);
        p.radius = 1.6;
        p.height = 2.3;
        p.start = vwm::Vec3(0.0, 1.2, -2.2);
        p.end = vwm::Vec3(0.0, 1.2, 2.2);
        p.walk_min = vwm::Vec3(-2.0, 0.6, -2.0);
        p.walk_max = vwm::Vec3(2.0, 2.4, 2.0);
    } else {
        p.target = vwm::Vec3(0.0, 1.1, 8.0);
        p.radius = 0.7;
        p.height = 0.6;
        p.start = vwm::Vec3(0.0, 1.1, -6.0);
        p.end = vwm::Vec3(0.0, 1.1, 4.0);
        p.walk_min = vwm::Vec3(-0.7, 0.5, -6.0);
        p.walk_max = vwm::Vec3(0.7, 1.9, 4.0);
    }
    if (preset == vwm::ScenePreset::kCorridor) {
        // Orbit stays inside the corridor rather than circling its far end.
        p.target = vwm::Vec3(0.0, 1.1, 0.0);
    }
    return p;
}

// The forward-reverse target differs from the orbit/walk look-at point for
// the corridor (dolly toward the far end), so resolve per kind.
vwm::TrajectoryParams trajectory_params_for(vwm::ScenePreset preset, vwm::TrajectoryKind kind,
                                            std::uint64_t seed) {
    vwm::TrajectoryParams p = preset_trajectory_params(preset, seed);
    if (preset == vwm::ScenePreset::kCorridor && kind == vwm::TrajectoryKind::kForwardReverse) {
        p.target = vwm::Vec3(0.0, 1.1, 8.0);
    }
    return p;
}

// Axis-aligned bounds of everything a frame set observed: valid depth
// samples backprojected to world space plus the camera centers, padded by
// the truncation band so boundary surfaces keep their full support.
void data_bounds(const std::vector<vwm::Frame>& frames, double pad, vwm::Vec3* lo,
                 vwm::Vec3* hi) {
    *lo = vwm::Vec3::Constant(std::numeric_limits<double>::infinity());
    *hi = vwm::Vec3::Constant(-std::numeric_limits<double>::infinity());
    bool any = false;
    for (const vwm::Frame& frame : frames) {
        *lo = lo->cwiseMin(frame.pose.center());
        *hi = hi->cwiseMax(frame.pose.center());
        for (int y = 0; y < frame.depth.height; ++y) {
            for (int x = 0; x < frame.depth.width; ++x) {
                const float d = frame.depth.at(x, y);
                if (!vwm::DepthMap::is_valid(d)) continue;
                any = true;
                const vwm::Vec3 p = frame.pose.cam_to_world(
                    vwm::backproject(double(x), double(y), double(d), frame.intrinsics));
                *lo = lo->cwiseMin(p);
                *hi = hi->cwiseMax(p);
            }
        }
    }
    if (!any) throw vwm::ValidationError("frames carry no valid depth to bound a volume");
    *lo -= vwm::Vec3::Constant(pad);
    *hi += vwm::Vec3::Constant(pad);
}

json fusion_to_json(const vwm::FusionConfig& fusion) {
    return json{{"truncation", fusion.truncation},
                {"frame_weight", fusion.frame_weight},
                {"max_grid_dim", fusion.max_grid_dim},
                {"min_weight", fusion.min_weight},
                {"surface_band", fusion.surface_band},
                {"variance_cap", fusion.variance_cap},
                {"variance_filter", fusion.variance_filter_enabled}};
}

vwm::FusionConfig fusion_from_json(const json& j) {
    vwm::FusionConfig fusion;
    try {
        fusion.truncation = j.at("truncation").get<double>();
        fusion.frame_weight = j.at("frame_weight").get<double>();
        fusion.max_grid_dim = j.at("max_grid_dim").get<int>();
        fusion.min_weight = j.at("min_weight").get<double>();
        fusion.surface_band = j.at("surface_band").get<double>();
        fusion.variance_cap = j.at("variance_cap").get<double>();
        fusion.variance_filter_enabled = j.at("variance_filter").get<bool>();
    } catch (const json::exception& e) {
        throw vwm::ValidationError(std::string("fusion config: ") + e.what());
    }
    return fusion;
}

void add_fusion_flags(CLI::App* cmd, vwm::FusionConfig* fusion) {
    cmd->add_option("--truncation", fusion->truncation,
                    "truncation band in meters (0 = five voxels)");
    cmd->add_option("--frame-weight", fusion->frame_weight, "per-frame fusion weight");
    cmd->add_option("--max-grid-dim", fusion->max_grid_dim, "voxel-count cap per axis");
    cmd->add_option("--min-weight", fusion->min_weight, "extraction: minimum accumulated weight");
    cmd->add_option("--surface-band", fusion->surface_band,
                    "extraction: |distance| band, normalized");
    cmd->add_option("--variance-cap", fusion->variance_cap,
                    "extraction: cap on the distance variance");
    cmd->add_flag("--variance-filter,!--no-variance-filter", fusion->variance_filter_enabled,
                  "gate extraction on distance variance");
}

void merge_fusion_config(ConfigMerge* merge, vwm::FusionConfig* fusion) {
    merge->field("truncation", "--truncation", fusion->truncation);
    merge->field("frame_weight", "--frame-weight", fusion->frame_weight);
    merge->field("max_grid_dim", "--max-grid-dim", fusion->max_grid_dim);
    merge->field("min_weight", "--min-weight", fusion->min_weight);
    merge->field("surface_band", "--surface-band", fusion->surface_band);
    merge->field("variance_cap", "--variance-cap", fusion->variance_cap);
    merge->field("variance_filter", "--variance-filter", fusion->variance_filter_enabled);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
    std::string preset = "room-with-mover";
    std::uint64_t seed = 1;
    int frames = 60;
    int width = 160;
    int height = 120;
    double focal = 0.0;  // 0 = auto
    std::string trajectory = "orbit";
    double noise_rgb = 0.0;
    double noise_depth = 0.0;
    double noise_pose_rot = 0.0;
    double noise_pose_trans = 0.0;
    int threads = 1;
    std::string out;
    std::string config;
};

json simulate_config_echo(const SimulateOptions& o) {
    return json{{"preset", o.preset},
                {"seed", o.seed},
                {"frames", o.frames},
                {"width", o.width},
                {"height", o.height},
                {"focal", o.focal},
                {"trajectory", o.trajectory},
                {"noise_rgb", o.noise_rgb},
                {"noise_depth", o.noise_depth},
                {"noise_pose_rot", o.noise_pose_rot},
                {"noise_pose_trans", o.noise_pose_trans}};
}

void run_simulate(SimulateOptions& o, CLI::App* cmd) {
    ConfigMerge merge(o.config, cmd);
    merge.field("preset", "--preset", o.preset);
    merge.field("seed", "--seed", o.seed);
    merge.field("frames", "--frames", o.frames);
    merge.field("width", "--width", o.width);
    merge.field("height", "--height", o.height);
    merge.field("focal", "--focal", o.focal);
    merge.field("trajectory", "--trajectory", o.trajectory);
    merge.field("noise_rgb", "--noise-rgb", o.noise_rgb);
    merge.field("noise_depth", "--noise-depth", o.noise_depth);
    merge.field("noise_pose_rot", "--noise-pose-rot", o.noise_pose_rot);
    merge.field("noise_pose_trans", "--noise-pose-trans", o.noise_pose_trans);
    merge.finish();

    if (o.frames < 2) throw vwm::ValidationError("simulate: --frames must be >= 2");
    const vwm::ScenePreset preset = parse_preset(o.preset);
    const vwm::TrajectoryKind kind = parse_trajectory_kind(o.trajectory);

    const vwm::SyntheticScene scene = vwm::build_scene(o.seed, preset);
    scene.validate(o.frames - 1);
    const vwm::CameraIntrinsics intr = make_intrinsics(o.width, o.height, o.focal);
    const std::vector<vwm::CameraPose> poses =
        vwm::make_trajectory(kind, trajectory_params_for(preset, kind, o.seed), o.frames);

    vwm::NoiseModel noise;
    noise.rgb_sigma = o.noise_rgb;
    noise.depth_sigma_rel = o.noise_depth;
    noise.pose_jitter_rot_deg = o.noise_pose_rot;
    noise.pose_jitter_trans = o.noise_pose_trans;
    noise.seed = o.seed;
    noise.validate();

    vwm::FrameDataset dataset;
    dataset.intrinsics = intr;
    dataset.frames.reserve(std::size_t(o.frames));
    dataset.static_masks.reserve(std::size_t(o.frames));
    for (int t = 0; t < o.frames; ++t) {
        auto [frame, static_mask] = vwm::render_frame(scene, poses[std::size_t(t)], intr, t,
                                                      o.threads);
        frame.index = t;
        dataset.frames.push_back(vwm::perturb_frame(frame, noise, t));
        dataset.static_masks.push_back(std::move(static_mask));
    }

    const fs::path out_dir(o.out);
    vwm::write_frame_dataset(out_dir, dataset);
    vwm::write_scene(out_dir / "scene.json", scene);
    save_json_file(out_dir / "resolved_config.json", simulate_config_echo(o));
    std::cout << "simulated " << o.frames << " frames (" << o.preset << ", " << o.trajectory
              << ") -> " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// fuse

struct FuseOptions {
    std::string in;
    std::string out;
    double voxel_size = 0.05;
    vwm::FusionConfig fusion;
    std::vector<double> bounds_min;
    std::vector<double> bounds_max;
    int threads = 1;
    std::string config;
};

json fuse_config_echo(const FuseOptions& o) {
    json j = fusion_to_json(o.fusion);
    j["voxel_size"] = o.voxel_size;
    return j;
}

void run_fuse(FuseOptions& o, CLI::App* cmd) {
    ConfigMerge merge(o.config, cmd);
    merge.field("voxel_size", "--voxel-size", o.voxel_size);
    merge_fusion_config(&merge, &o.fusion);
    merge.finish();
    o.fusion.validate(o.voxel_size);

    const vwm::FrameDataset dataset = vwm::read_frame_dataset(o.in);
    if (dataset.frames.empty()) throw vwm::ValidationError("fuse: dataset has no frames");

    vwm::Vec3 lo, hi;
    if (!o.bounds_min.empty() || !o.bounds_max.empty()) {
        if (o.bounds_min.size() != 3 || o.bounds_max.size() != 3)
            throw vwm::ValidationError("fuse: --bounds-min and --bounds-max each take x y z");
        lo = vwm::Vec3(o.bounds_min[0], o.bounds_min[1], o.bounds_min[2]);
        hi = vwm::Vec3(o.bounds_max[0], o.bounds_max[1], o.bounds_max[2]);
    } else {
        data_bounds(dataset.frames, o.fusion.resolved_truncation(o.voxel_size) + o.voxel_size,
                    &lo, &hi);
    }

    vwm::TsdfVolume volume = vwm::new_volume(lo, hi, o.voxel_size, o.fusion);
    for (const vwm::Frame& frame : dataset.frames) {
        vwm::integrate_frame(volume, frame, o.fusion, o.threads);
    }
    const vwm::PointCloud points = vwm::extract_static_points(volume, o.fusion);

    const fs::path out_dir(o.out);
    fs::create_directories(out_dir);
    vwm::save_volume(out_dir / "volume.tsdf", volume);
    vwm::write_ply(out_dir / "points.ply", points);
    save_json_file(out_dir / "resolved_config.json", fuse_config_echo(o));
    std::cout << "fused " << dataset.frames.size() << " frames into " << volume.dims[0] << "x"
              << volume.dims[1] << "x" << volume.dims[2] << " voxels -> " << points.size()
              << " static points\n";
}

// ---------------------------------------------------------------------------
// render

struct RenderOptions {
    std::string points;
    std::string trajectory;
    std::string intrinsics;
    int splat_radius = 1;
    std::string out;
    std::string config;
};

void run_render(RenderOptions& o, CLI::App* cmd) {
    ConfigMerge merge(o.config, cmd);
    merge.field("splat_radius", "--splat-radius", o.splat_radius);
    merge.finish();
    if (o.splat_radius < 0) throw vwm::ValidationError("render: --splat-radius must be >= 0");

    const vwm::PointCloud points = vwm::read_ply(o.points);
    const std::vector<vwm::CameraPose> poses = vwm::read_trajectory(o.trajectory);
    const vwm::CameraIntrinsics intr = vwm::read_intrinsics(o.intrinsics);
    if (poses.empty()) throw vwm::ValidationError("render: trajectory is empty");

    const fs::path out_dir(o.out);
    fs::create_directories(out_dir / "condition");
    fs::create_directories(out_dir / "mask");
    fs::create_directories(out_dir / "depth");
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const vwm::RenderedView view = vwm::render_points(points, intr, poses[i], o.splat_radius);
        const std::string name = vwm::frame_name(int(i));
        vwm::write_ppm(out_dir / "condition" / (name + ".ppm"), view.image);
        vwm::write_mask_ppm(out_dir / "mask" / (name + ".ppm"), view.mask, intr.width,
                            intr.height);
        vwm::write_pfm(out_dir / "depth" / (name + ".pfm"), view.depth);
    }
    save_json_file(out_dir / "resolved_config.json", json{{"splat_radius", o.splat_radius}});
    std::cout << "rendered " << poses.size() << " views of " << points.size() << " points -> "
              << o.out << "\n";
}

// ---------------------------------------------------------------------------
// run

struct RunOptions {
    std::string preset = "room-with-mover";
    std::uint64_t seed = 1;
    int steps = 3;
    int chunk = 49;
    int context = 5;
    int width = 160;
    int height = 120;
    double focal = 0.0;
    double voxel_size = 0.05;
    vwm::FusionConfig fusion;
    int splat_radius = 1;
    double theta = 0.3;
    int episodic_capacity = 64;
    double noise_rgb = 0.0;
    double noise_depth = 0.0;
    double noise_pose_rot = 0.0;
    double noise_pose_trans = 0.0;
    std::string alignment = "known-poses";
    double guidance = 0.75;
    bool spatial_memory = true;
    std::string trajectory = "forward-reverse";
    int threads = 1;
    std::string out;
    std::string config;
};

json run_config_echo(const RunOptions& o) {
    json j = fusion_to_json(o.fusion);
    j["preset"] = o.preset;
    j["seed"] = o.seed;
    j["steps"] = o.steps;
    j["chunk"] = o.chunk;
    j["context"] = o.context;
    j["width"] = o.width;
    j["height"] = o.height;
    j["focal"] = o.focal;
    j["voxel_size"] = o.voxel_size;
    j["splat_radius"] = o.splat_radius;
    j["theta"] = o.theta;
    j["episodic_capacity"] = o.episodic_capacity;
    j["noise_rgb"] = o.noise_rgb;
    j["noise_depth"] = o.noise_depth;
    j["noise_pose_rot"] = o.noise_pose_rot;
    j["noise_pose_trans"] = o.noise_pose_trans;
    j["alignment"] = o.alignment;
    j["guidance"] = o.guidance;
    j["spatial_memory"] = o.spatial_memory;
    j["trajectory"] = o.trajectory;
    return j;
}

void run_run(RunOptions& o, CLI::App* cmd) {
    ConfigMerge merge(o.config, cmd);
    merge.field("preset", "--preset", o.preset);
    merge.field("seed", "--seed", o.seed);
    merge.field("steps", "--steps", o.steps);
    merge.field("chunk", "--chunk", o.chunk);
    merge.field("context", "--context", o.context);
    merge.field("width", "--width", o.width);
    merge.field("height", "--height", o.height);
    merge.field("focal", "--focal", o.focal);
    merge.field("voxel_size", "--voxel-size", o.voxel_size);
    merge_fusion_config(&merge, &o.fusion);
    merge.field("splat_radius", "--splat-radius", o.splat_radius);
    merge.field("theta", "--theta", o.theta);
    merge.field("episodic_capacity", "--episodic-capacity", o.episodic_capacity);
    merge.field("noise_rgb", "--noise-rgb", o.noise_rgb);
    merge.field("noise_depth", "--noise-depth", o.noise_depth);
    merge.field("noise_pose_rot", "--noise-pose-rot", o.noise_pose_rot);
    merge.field("noise_pose_trans", "--noise-pose-trans", o.noise_pose_trans);
    merge.field("alignment", "--alignment", o.alignment);
    merge.field("guidance", "--guidance", o.guidance);
    merge.field("spatial_memory", "--spatial-memory", o.spatial_memory);
    merge.field("trajectory", "--trajectory", o.trajectory);
    merge.finish();

    if (o.episodic_capacity < 1)
        throw vwm::ValidationError("run: --episodic-capacity must be >= 1");
    const vwm::ScenePreset preset = parse_preset(o.preset);
    const vwm::TrajectoryKind kind = parse_trajectory_kind(o.trajectory);

    vwm::PipelineConfig cfg;
    cfg.chunk_length = o.chunk;
    cfg.context = o.context;
    cfg.voxel_size = o.voxel_size;
    cfg.fusion = o.fusion;
    cfg.splat_radius = o.splat_radius;
    cfg.noise.rgb_sigma = o.noise_rgb;
    cfg.noise.depth_sigma_rel = o.noise_depth;
    cfg.noise.pose_jitter_rot_deg = o.noise_pose_rot;
    cfg.noise.pose_jitter_trans = o.noise_pose_trans;
    cfg.noise.seed = o.seed;
    cfg.intrinsics = make_intrinsics(o.width, o.height, o.focal);
    cfg.scene = vwm::build_scene(o.seed, preset);
    cfg.alignment = parse_alignment(o.alignment);
    cfg.spatial_memory_enabled = o.spatial_memory;
    cfg.guidance_strength = o.guidance;
    cfg.episodic_threshold = o.theta;
    cfg.episodic_capacity = std::size_t(o.episodic_capacity);
    cfg.threads = o.threads;

    const int needed = cfg.frames_for_steps(o.steps);
    // Forward-reverse trajectories must be even-length palindromes; one
    // surplus pose beyond the generated frames is harmless.
    int traj_n = needed;
    if (kind == vwm::TrajectoryKind::kForwardReverse && traj_n % 2 != 0) traj_n += 1;
    cfg.trajectory =
        vwm::make_trajectory(kind, trajectory_params_for(preset, kind, o.seed), traj_n);

    const vwm::PipelineResult result = vwm::run_autoregressive(cfg, o.steps);

    // Flatten the per-step records into one dataset plus condition images.
    const fs::path out_dir(o.out);
    vwm::FrameDataset dataset;
    dataset.intrinsics = cfg.intrinsics;
    fs::create_directories(out_dir / "condition");
    fs::create_directories(out_dir / "condition_mask");
    json steps_json = json::array();
    int frame_count = 0;
    for (const vwm::StepRecord& rec : result.steps) {
        json step;
        step["step"] = rec.step;
        step["first_frame"] = frame_count;
        step["frame_count"] = rec.generated.size();
        step["episodic_additions"] = rec.episodic_additions;
        step["memory_size_before"] = rec.memory_size_before;
        step["memory_size_after"] = rec.memory_size_after;
        step["reveal_fractions"] = rec.reveal_fractions;
        steps_json.push_back(std::move(step));

        double reveal_sum = 0.0;
        for (std::size_t f = 0; f < rec.generated.size(); ++f) {
            const std::string name = vwm::frame_name(rec.generated[f].index);
            vwm::write_ppm(out_dir / "condition" / (name + ".ppm"), rec.conditions[f].image);
            vwm::write_mask_ppm(out_dir / "condition_mask" / (name + ".ppm"),
                                rec.conditions[f].mask, cfg.intrinsics.width,
                                cfg.intrinsics.height);
            dataset.frames.push_back(rec.generated[f]);
            dataset.static_masks.push_back(rec.static_masks[f]);
            reveal_sum += rec.reveal_fractions[f];
            ++frame_count;
        }
        std::cout << "step " << rec.step << ": " << rec.generated.size()
                  << " frames, mean reveal "
                  << (rec.generated.empty() ? 0.0 : reveal_sum / double(rec.generated.size()))
                  << ", memory " << rec.memory_size_before << " -> " << rec.memory_size_after
                  << ", episodic +" << rec.episodic_additions << "\n";
    }
    vwm::write_frame_dataset(out_dir, dataset);
    vwm::write_trajectory(out_dir / "nominal_trajectory.json", cfg.trajectory);
    vwm::write_ply(out_dir / "memory.ply", result.spatial.cloud());
    vwm::write_scene(out_dir / "scene.json", cfg.scene);

    const json config_echo = run_config_echo(o);
    json manifest;
    manifest["config"] = config_echo;
    manifest["frame_count"] = frame_count;
    manifest["steps"] = std::move(steps_json);
    manifest["outputs"] = json{{"rgb", "rgb"},
                               {"depth", "depth"},
                               {"static_mask", "static_mask"},
                               {"condition", "condition"},
                               {"condition_mask", "condition_mask"},
                               {"trajectory", "trajectory.json"},
                               {"nominal_trajectory", "nominal_trajectory.json"},
                               {"memory", "memory.ply"},
                               {"scene", "scene.json"},
                               {"intrinsics", "intrinsics.json"}};
    save_json_file(out_dir / "manifest.json", manifest);
    save_json_file(out_dir / "resolved_config.json", config_echo);
    std::cout << "run complete: " << frame_count << " frames, memory "
              << result.spatial.size() << " points, episodic "
              << result.episodic.slots().size() << " slots -> " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// segment

struct SegmentOptions {
    std::string in;
    std::string out;
};

void run_segment(SegmentOptions& o) {
    const vwm::FrameDataset dataset = vwm::read_frame_dataset(o.in);
    const std::vector<vwm::Clip> clips = vwm::segment_clips(dataset.frames);
    const fs::path out_dir(o.out);
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const vwm::Clip& clip = clips[i];
        char name[16];
        std::snprintf(name, sizeof(name), "clip_%03zu", i);
        json meta;
        meta["clip"] = i;
        meta["start_index"] = clip.start_index;
        meta["transition_index"] = clip.transition_index;
        meta["source_start"] = clip.start_index;
        meta["source_count"] = clip.source.size();
        meta["target_start"] = clip.start_index + int(clip.source.size());
        meta["target_count"] = clip.target.size();
        save_json_file(out_dir / name / "meta.json", meta);
    }
    save_json_file(out_dir / "resolved_config.json", json::object());
    std::cout << "segmented " << dataset.frames.size() << " frames into " << clips.size()
              << " clips -> " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// build-pairs

struct BuildPairsOptions {
    std::string in;
    std::string out;
    double voxel_size = 0.05;
    vwm::FusionConfig fusion;
    int splat_radius = 1;
    int threads = 1;
    std::string config;
};

json build_pairs_config_echo(const BuildPairsOptions& o) {
    json j = fusion_to_json(o.fusion);
    j["voxel_size"] = o.voxel_size;
    j["splat_radius"] = o.splat_radius;
    return j;
}

void run_build_pairs(BuildPairsOptions& o, CLI::App* cmd) {
    ConfigMerge merge(o.config, cmd);
    merge.field("voxel_size", "--voxel-size", o.voxel_size);
    merge.field("splat_radius", "--splat-radius", o.splat_radius);
    merge_fusion_config(&merge, &o.fusion);
    merge.finish();
    if (o.splat_radius < 0) throw vwm::ValidationError("build-pairs: --splat-radius must be >= 0");

    const vwm::FrameDataset dataset = vwm::read_frame_dataset(o.in);
    const std::vector<vwm::Clip> clips = vwm::segment_clips(dataset.frames);
    if (clips.empty())
        throw vwm::ValidationError("build-pairs: need at least 97 frames, got " +
                                   std::to_string(dataset.frames.size()));

    const fs::path out_dir(o.out);
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const vwm::PairedSample sample =
            vwm::build_pair(clips[i], o.fusion, o.voxel_size, o.splat_radius, o.threads);
        char name[16];
        std::snprintf(name, sizeof(name), "pair_%03zu", i);
        const fs::path pair_dir = out_dir / name;
        fs::create_directories(pair_dir / "condition");
        fs::create_directories(pair_dir / "mask");
        fs::create_directories(pair_dir / "target");
        for (std::size_t f = 0; f < sample.targets.size(); ++f) {
            const std::string frame = vwm::frame_name(int(f));
            vwm::write_ppm(pair_dir / "condition" / (frame + ".ppm"),
                           sample.conditions[f].image);
            vwm::write_mask_ppm(pair_dir / "mask" / (frame + ".ppm"), sample.conditions[f].mask,
                                dataset.intrinsics.width, dataset.intrinsics.height);
            vwm::write_ppm(pair_dir / "target" / (frame + ".ppm"), sample.targets[f].image);
        }
        json meta;
        meta["pair"] = i;
        meta["start_index"] = clips[i].start_index;
        meta["transition_index"] = sample.transition_index;
        meta["target_count"] = sample.targets.size();
        save_json_file(pair_dir / "meta.json", meta);
    }
    save_json_file(out_dir / "resolved_config.json", build_pairs_config_echo(o));
    std::cout << "built " << clips.size() << " paired samples -> " << o.out << "\n";
}

// ---------------------------------------------------------------------------
// eval-recall

struct EvalRecallOptions {
    std::string run_dir;
    std::string out = "report.json";
    std::string csv;
};

void run_eval_recall(EvalRecallOptions& o) {
    const fs::path run_dir(o.run_dir);
    const fs::path nominal = run_dir / "nominal_trajectory.json";
    const std::vector<vwm::CameraPose> trajectory =
        vwm::read_trajectory(fs::exists(nominal) ? nominal : run_dir / "trajectory.json");

    std::vector<vwm::RecallFrame> frames;
    for (int i = 0;; ++i) {
        const std::string name = vwm::frame_name(i);
        const fs::path rgb = run_dir / "rgb" / (name + ".ppm");
        if (!fs::exists(rgb)) break;
        vwm::RecallFrame frame;
        frame.image = vwm::read_ppm(rgb);
        const fs::path static_mask = run_dir / "static_mask" / (name + ".ppm");
        if (fs::exists(static_mask)) {
            frame.static_mask = vwm::read_mask_ppm(static_mask, nullptr, nullptr);
        }
        const fs::path rendered_mask = run_dir / "condition_mask" / (name + ".ppm");
        if (fs::exists(rendered_mask)) {
            frame.rendered_mask = vwm::read_mask_ppm(rendered_mask, nullptr, nullptr);
        }
        frames.push_back(std::move(frame));
    }
    if (frames.empty()) throw vwm::ValidationError("eval-recall: no rgb frames in " + o.run_dir);

    const vwm::RecallReport report = vwm::view_recall_eval(frames, trajectory);
    vwm::write_recall_report_json(o.out, report);
    if (!o.csv.empty()) vwm::write_recall_report_csv(o.csv, report);
    fs::path echo(o.out);
    echo.replace_extension(".config.json");
    save_json_file(echo, json{{"run_dir", o.run_dir}});
    std::cout << "recall over " << report.pair_count() << " pairs: mean PSNR "
              << report.mean_psnr << " dB, mean SSIM " << report.mean_ssim
              << ", masked-static mean PSNR " << report.mean_masked_psnr << " dB ("
              << report.masked_pair_count << " pairs)\n";
}

// ---------------------------------------------------------------------------
// eval-suppression

struct EvalSuppressionOptions {
    std::string fuse_dir;
    std::string scene;
    int max_frame = 0;
    std::string out = "suppression.json";
};

void run_eval_suppression(EvalSuppressionOptions& o) {
    if (o.max_frame < 0) throw vwm::ValidationError("eval-suppression: --max-frame must be >= 0");
    const fs::path fuse_dir(o.fuse_dir);
    const vwm::TsdfVolume volume = vwm::load_volume(fuse_dir / "volume.tsdf");
    const vwm::PointCloud points = vwm::read_ply(fuse_dir / "points.ply");
    const json echo = load_json_file(fuse_dir / "resolved_config.json");
    const vwm::FusionConfig fusion = fusion_from_json(echo);
    const vwm::SyntheticScene scene = vwm::read_scene(o.scene);

    const vwm::SuppressionReport report =
        vwm::suppression_metrics(points, volume, scene, fusion, o.max_frame);
    vwm::write_suppression_report_json(o.out, report);
    fs::path config_echo(o.out);
    config_echo.replace_extension(".config.json");
    save_json_file(config_echo,
                   json{{"fuse_dir", o.fuse_dir}, {"scene", o.scene}, {"max_frame", o.max_frame}});
    std::cout << "dynamic leak " << report.dynamic_leak_rate << " (" << report.leaked_points
              << "/" << report.extracted_points << " points), static recall "
              << report.static_recall << " (" << report.surface_voxels_recalled << "/"
              << report.surface_voxels_observed << " voxels)\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatial-memory world engine"};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "render oracle RGB-D frames to disk");
    sim_cmd->add_option("--preset", sim.preset, "scene preset: room-with-mover | corridor");
    sim_cmd->add_option("--seed", sim.seed, "scene and noise seed");
    sim_cmd->add_option("--frames", sim.frames, "number of frames");
    sim_cmd->add_option("--width", sim.width, "image width in pixels");
    sim_cmd->add_option("--height", sim.height, "image height in pixels");
    sim_cmd->add_option("--focal", sim.focal, "focal length in pixels (0 = auto)");
    sim_cmd->add_option("--trajectory", sim.trajectory,
                        "orbit | forward-reverse | random-walk");
    sim_cmd->add_option("--noise-rgb", sim.noise_rgb, "RGB noise std");
    sim_cmd->add_option("--noise-depth", sim.noise_depth, "relative depth noise std");
    sim_cmd->add_option("--noise-pose-rot", sim.noise_pose_rot, "pose jitter rotation std, deg");
    sim_cmd->add_option("--noise-pose-trans", sim.noise_pose_trans,
                        "pose jitter translation std, m");
    sim_cmd->add_option("--threads", sim.threads, "worker threads");
    sim_cmd->add_option("--out", sim.out, "output directory")->required();
    sim_cmd->add_option("--config", sim.config, "JSON config file (flags override)");
    sim_cmd->callback([&] { run_simulate(sim, sim_cmd); });

    FuseOptions fuse;
    CLI::App* fuse_cmd =
        app.add_subcommand("fuse", "fuse a frame dataset into a volume and static points");
    fuse_cmd->add_option("--in", fuse.in, "frame dataset directory")->required();
    fuse_cmd->add_option("--out", fuse.out, "output directory")->required();
    fuse_cmd->add_option("--voxel-size", fuse.voxel_size, "voxel edge length, m");
    add_fusion_flags(fuse_cmd, &fuse.fusion);
    fuse_cmd->add_option("--bounds-min", fuse.bounds_min, "volume min corner x y z")
        ->expected(3);
    fuse_cmd->add_option("--bounds-max", fuse.bounds_max, "volume max corner x y z")
        ->expected(3);
    fuse_cmd->add_option("--threads", fuse.threads, "worker threads");
    fuse_cmd->add_option("--config", fuse.config, "JSON config file (flags override)");
    fuse_cmd->callback([&] { run_fuse(fuse, fuse_cmd); });

    RenderOptions render;
    CLI::App* render_cmd =
        app.add_subcommand("render", "splat a point cloud along a trajectory");
    render_cmd->add_option("--points", render.points, "input PLY point cloud")->required();
    render_cmd->add_option("--trajectory", render.trajectory, "trajectory JSON")->required();
    render_cmd->add_option("--intrinsics", render.intrinsics, "intrinsics JSON")->required();
    render_cmd->add_option("--splat-radius", render.splat_radius, "square splat radius, px");
    render_cmd->add_option("--out", render.out, "output directory")->required();
    render_cmd->add_option("--config", render.config, "JSON config file (flags override)");
    render_cmd->callback([&] { run_render(render, render_cmd); });

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand("run", "autoregressive memory-guided generation");
    run_cmd->add_option("--preset", run.preset, "scene preset: room-with-mover | corridor");
    run_cmd->add_option("--seed", run.seed, "scene and noise seed");
    run_cmd->add_option("--steps", run.steps, "autoregressive steps");
    run_cmd->add_option("--chunk", run.chunk, "frames per step");
    run_cmd->add_option("--context", run.context, "working-memory context length");
    run_cmd->add_option("--width", run.width, "image width in pixels");
    run_cmd->add_option("--height", run.height, "image height in pixels");
    run_cmd->add_option("--focal", run.focal, "focal length in pixels (0 = auto)");
    run_cmd->add_option("--voxel-size", run.voxel_size, "voxel edge length, m");
    add_fusion_flags(run_cmd, &run.fusion);
    run_cmd->add_option("--splat-radius", run.splat_radius, "square splat radius, px");
    run_cmd->add_option("--theta", run.theta, "episodic reveal threshold");
    run_cmd->add_option("--episodic-capacity", run.episodic_capacity, "episodic slot count");
    run_cmd->add_option("--noise-rgb", run.noise_rgb, "RGB noise std");
    run_cmd->add_option("--noise-depth", run.noise_depth, "relative depth noise std");
    run_cmd->add_option("--noise-pose-rot", run.noise_pose_rot, "pose jitter rotation std, deg");
    run_cmd->add_option("--noise-pose-trans", run.noise_pose_trans,
                        "pose jitter translation std, m");
    run_cmd->add_option("--alignment", run.alignment, "chunk alignment: known-poses | icp");
    run_cmd->add_option("--guidance", run.guidance, "memory guidance strength in [0,1]");
    run_cmd->add_flag("--spatial-memory,!--no-spatial-memory", run.spatial_memory,
                      "persist fused static points across steps");
    run_cmd->add_option("--trajectory", run.trajectory,
                        "orbit | forward-reverse | random-walk");
    run_cmd->add_option("--threads", run.threads, "worker threads");
    run_cmd->add_option("--out", run.out, "output directory")->required();
    run_cmd->add_option("--config", run.config, "JSON config file (flags override)");
    run_cmd->callback([&] { run_run(run, run_cmd); });

    SegmentOptions segment;
    CLI::App* segment_cmd =
        app.add_subcommand("segment", "cut a frame dataset into source/target clips");
    segment_cmd->add_option("--in", segment.in, "frame dataset directory")->required();
    segment_cmd->add_option("--out", segment.out, "output directory")->required();
    segment_cmd->callback([&] { run_segment(segment); });

    BuildPairsOptions pairs;
    CLI::App* pairs_cmd =
        app.add_subcommand("build-pairs", "fuse clip sources and render target conditions");
    pairs_cmd->add_option("--in", pairs.in, "frame dataset directory")->required();
    pairs_cmd->add_option("--out", pairs.out, "output directory")->required();
    pairs_cmd->add_option("--voxel-size", pairs.voxel_size, "voxel edge length, m");
    add_fusion_flags(pairs_cmd, &pairs.fusion);
    pairs_cmd->add_option("--splat-radius", pairs.splat_radius, "square splat radius, px");
    pairs_cmd->add_option("--threads", pairs.threads, "worker threads");
    pairs_cmd->add_option("--config", pairs.config, "JSON config file (flags override)");
    pairs_cmd->callback([&] { run_build_pairs(pairs, pairs_cmd); });

    EvalRecallOptions recall;
    CLI::App* recall_cmd =
        app.add_subcommand("eval-recall", "score forward/reverse view consistency");
    recall_cmd->add_option("--run-dir", recall.run_dir, "run output directory")->required();
    recall_cmd->add_option("--out", recall.out, "report JSON path");
    recall_cmd->add_option("--csv", recall.csv, "optional per-pair CSV path");
    recall_cmd->callback([&] { run_eval_recall(recall); });

    EvalSuppressionOptions suppression;
    CLI::App* suppression_cmd =
        app.add_subcommand("eval-suppression", "score dynamic suppression against ground truth");
    suppression_cmd->add_option("--fuse-dir", suppression.fuse_dir, "fuse output directory")
        ->required();
    suppression_cmd->add_option("--scene", suppression.scene, "scene JSON path")->required();
    suppression_cmd->add_option("--max-frame", suppression.max_frame,
                                "last frame index of the fused range");
    suppression_cmd->add_option("--out", suppression.out, "report JSON path");
    suppression_cmd->callback([&] { run_eval_suppression(suppression); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vwm::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
