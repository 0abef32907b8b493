#include "vwm/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "vwm/core/error.hpp"
#include "vwm/core/geometry.hpp"

namespace vwm {

namespace {

constexpr int kClipLength = 97;
constexpr int kSourceLength = 49;

/// Per-pixel noise attenuation: covered pixels keep (1 - gamma) of the
/// noise amplitude, uncovered pixels keep all of it.
std::vector<float> coverage_attenuation(const RenderedView& condition, double gamma) {
    std::vector<float> scale(condition.mask.size());
    for (std::size_t i = 0; i < condition.mask.size(); ++i) {
        scale[i] = condition.mask[i] ? static_cast<float>(1.0 - gamma) : 1.0f;
    }
    return scale;
}

}  // namespace

int PipelineConfig::frames_for_steps(int n_steps) const {
    if (n_steps <= 0) return 0;
    return chunk_length + (n_steps - 1) * (chunk_length - context);
}

void PipelineConfig::validate(int n_steps) const {
    if (n_steps < 1) {
        throw ValidationError("pipeline: n_steps must be >= 1, got " + std::to_string(n_steps));
    }
    if (chunk_length < 2) {
        throw ValidationError("pipeline: chunk_length must be >= 2, got " +
                              std::to_string(chunk_length));
    }
    if (context < 1 || context >= chunk_length) {
        throw ValidationError("pipeline: context must be in [1, chunk_length), got " +
                              std::to_string(context));
    }
    if (!(voxel_size > 0.0)) {
        throw ValidationError("pipeline: voxel_size must be positive");
    }
    if (splat_radius < 0) {
        throw ValidationError("pipeline: splat_radius must be >= 0");
    }
    if (!(guidance_strength >= 0.0 && guidance_strength <= 1.0)) {
        throw ValidationError("pipeline: guidance_strength must be in [0, 1]");
    }
    if (threads < 1) {
        throw ValidationError("pipeline: threads must be >= 1");
    }
    fusion.validate(voxel_size);
    noise.validate();
    intrinsics.validate();
    const int needed = frames_for_steps(n_steps);
    if (static_cast<int>(trajectory.size()) < needed) {
        throw ValidationError("pipeline: trajectory has " + std::to_string(trajectory.size()) +
                              " poses but " + std::to_string(n_steps) + " steps need " +
                              std::to_string(needed));
    }
    for (const auto& pose : trajectory) pose.validate();
    scene.validate(needed - 1);
    // Episodic parameters are validated by the bank's own constructor.
    EpisodicMemory probe(episodic_threshold, episodic_capacity);
    (void)probe;
}

PipelineResult run_autoregressive(const PipelineConfig& cfg, int n_steps) {
    cfg.validate(n_steps);

    PipelineResult result{
        {},
        SpatialMemory(cfg.voxel_size),
        EpisodicMemory(cfg.episodic_threshold, cfg.episodic_capacity),
        WorkingMemory(static_cast<std::size_t>(cfg.context)),
    };
    result.steps.reserve(static_cast<std::size_t>(n_steps));

    int global_t = 0;
    for (int step = 0; step < n_steps; ++step) {
        try {
            StepRecord rec;
            rec.step = step;
            rec.memory_size_before = result.spatial.size();

            const int count = step == 0 ? cfg.chunk_length : cfg.chunk_length - cfg.context;
            rec.generated.reserve(static_cast<std::size_t>(count));
            rec.static_masks.reserve(static_cast<std::size_t>(count));
            rec.conditions.reserve(static_cast<std::size_t>(count));
            rec.reveal_fractions.reserve(static_cast<std::size_t>(count));

            // The working window carries generation continuity; its tail must
            // abut the chunk we are about to produce.
            if (!result.working.window().empty() &&
                result.working.window().back().index + 1 != global_t) {
                throw std::logic_error("working memory window is not contiguous with step");
            }

            for (int f = 0; f < count; ++f, ++global_t) {
                const CameraPose& pose = cfg.trajectory[static_cast<std::size_t>(global_t)];

                // Condition views come from the memory as it stood before this
                // step; the merge below happens only once the chunk is done.
                RenderedView condition = render_points(result.spatial.cloud(), cfg.intrinsics,
                                                       pose, cfg.splat_radius);
                const double reveal = reveal_fraction(condition);

                auto [oracle, static_mask] =
                    render_frame(cfg.scene, pose, cfg.intrinsics, global_t, cfg.threads);
                oracle.index = global_t;

                const std::vector<float> pixel_scale =
                    coverage_attenuation(condition, cfg.guidance_strength);
                const double pose_scale = 1.0 - cfg.guidance_strength * (1.0 - reveal);
                Frame generated = perturb_frame(oracle, cfg.noise, global_t, &pixel_scale,
                                                pose_scale);

                rec.static_masks.push_back(std::move(static_mask));
                rec.generated.push_back(std::move(generated));
                rec.conditions.push_back(std::move(condition));
                rec.reveal_fractions.push_back(reveal);
            }

            // Fuse this chunk alone; the persistent cross-chunk state lives in
            // the point-based memory, not in any shared volume.
            TsdfVolume volume = new_volume(cfg.scene.bounds_min, cfg.scene.bounds_max,
                                           cfg.voxel_size, cfg.fusion);
            for (const Frame& frame : rec.generated) {
                integrate_frame(volume, frame, cfg.fusion, cfg.threads);
            }
            PointCloud extracted = extract_static_points(volume, cfg.fusion);

            if (cfg.spatial_memory_enabled) {
                AlignmentResult alignment;
                alignment.transform = RigidTransform::identity();
                if (cfg.alignment == AlignmentMode::kIcp && !result.spatial.empty() &&
                    extracted.size() > 0) {
                    alignment = align_chunk(extracted, result.spatial, AlignmentMode::kIcp);
                }
                result.spatial.merge(extracted, alignment.transform);
            }

            for (std::size_t f = 0; f < rec.generated.size(); ++f) {
                if (result.episodic.consider(rec.generated[f], rec.reveal_fractions[f])) {
                    ++rec.episodic_additions;
                }
                result.working.push(rec.generated[f]);
            }

            rec.memory_size_after = result.spatial.size();
            result.steps.push_back(std::move(rec));
        } catch (const ValidationError& e) {
            throw ValidationError("step " + std::to_string(step) + ": " + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error("step " + std::to_string(step) + ": " + e.what());
        }
    }
    return result;
}

std::vector<Clip> segment_clips(const std::vector<Frame>& frames) {
    std::vector<Clip> clips;
    const std::size_t n = frames.size();
    for (std::size_t start = 0; start + kClipLength <= n; start += kClipLength) {
        Clip clip;
        clip.start_index = static_cast<int>(start);
        clip.transition_index = kSourceLength - 1;
        clip.source.assign(frames.begin() + static_cast<std::ptrdiff_t>(start),
                           frames.begin() + static_cast<std::ptrdiff_t>(start + kSourceLength));
        clip.target.assign(frames.begin() + static_cast<std::ptrdiff_t>(start + kSourceLength),
                           frames.begin() + static_cast<std::ptrdiff_t>(start + kClipLength));
        clips.push_back(std::move(clip));
    }
    return clips;
}

PairedSample build_pair(const Clip& clip, const FusionConfig& fusion, double voxel_size,
                        int splat_radius, int threads) {
    if (clip.source.empty() || clip.target.empty()) {
        throw ValidationError("build_pair: clip must have source and target frames");
    }
    fusion.validate(voxel_size);

    // Size the volume from the observed geometry: every valid depth sample
    // backprojected to world space, plus the camera centers, padded by the
    // truncation band so surface voxels are never clipped at the boundary.
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());
    auto grow = [&](const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    };
    bool any_depth = false;
    for (const Frame& frame : clip.source) {
        frame.validate();
        grow(frame.pose.center());
        for (int y = 0; y < frame.depth.height; ++y) {
            for (int x = 0; x < frame.depth.width; ++x) {
                const float d = frame.depth.at(x, y);
                if (!DepthMap::is_valid(d)) continue;
                any_depth = true;
                const Vec3 cam = backproject(static_cast<double>(x), static_cast<double>(y),
                                             static_cast<double>(d), frame.intrinsics);
                grow(frame.pose.cam_to_world(cam));
            }
        }
    }
    if (!any_depth) {
        throw ValidationError("build_pair: source frames carry no valid depth");
    }
    const double pad = fusion.resolved_truncation(voxel_size) + voxel_size;
    lo -= Vec3::Constant(pad);
    hi += Vec3::Constant(pad);

    TsdfVolume volume = new_volume(lo, hi, voxel_size, fusion);
    for (const Frame& frame : clip.source) {
        integrate_frame(volume, frame, fusion, threads);
    }
    const PointCloud points = extract_static_points(volume, fusion);

    PairedSample sample;
    sample.transition_index = clip.transition_index;
    sample.targets = clip.target;
    sample.conditions.reserve(clip.target.size());
    for (const Frame& frame : clip.target) {
        sample.conditions.push_back(
            render_points(points, frame.intrinsics, frame.pose, splat_radius));
    }
    return sample;
}

}  // namespace vwm
