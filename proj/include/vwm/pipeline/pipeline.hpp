#pragma once

#include <cstdint>
#include <vector>

#include "vwm/core/types.hpp"
#include "vwm/memory/episodic.hpp"
#include "vwm/memory/spatial.hpp"
#include "vwm/memory/working.hpp"
#include "vwm/render/splat.hpp"
#include "vwm/tsdf/volume.hpp"
#include "vwm/worldsim/noise.hpp"
#include "vwm/worldsim/scene.hpp"

namespace vwm {

/// Full configuration of the autoregressive loop. The oracle scene stands
/// in for a learned generator; guidance_strength controls how strongly the
/// memory's condition coverage suppresses the injected generation noise
/// (0 = conditions ignored, 1 = covered pixels perfectly stabilized).
struct PipelineConfig {
    int chunk_length = 49;  // frames generated in step 0
    int context = 5;        // trailing window re-conditioned each later step
    double voxel_size = 0.05;
    FusionConfig fusion;
    int splat_radius = 1;
    NoiseModel noise;
    std::vector<CameraPose> trajectory;
    CameraIntrinsics intrinsics;
    SyntheticScene scene;
    AlignmentMode alignment = AlignmentMode::kKnownPoses;
    bool spatial_memory_enabled = true;
    double guidance_strength = 0.75;
    double episodic_threshold = 0.3;
    std::size_t episodic_capacity = 64;
    int threads = 1;

    /// Frames produced by n_steps: chunk_length + (n_steps-1) *
    /// (chunk_length - context).
    int frames_for_steps(int n_steps) const;

    void validate(int n_steps) const;
};

/// Audit record of one autoregressive step. All sequences cover the newly
/// generated frames of the step (chunk_length of them in step 0,
/// chunk_length - context afterwards).
struct StepRecord {
    int step = 0;
    std::vector<Frame> generated;
    std::vector<std::vector<std::uint8_t>> static_masks;  // oracle ground truth
    std::vector<RenderedView> conditions;                 // pre-merge memory renders
    std::vector<double> reveal_fractions;
    int episodic_additions = 0;
    std::size_t memory_size_before = 0;
    std::size_t memory_size_after = 0;
};

struct PipelineResult {
    std::vector<StepRecord> steps;
    SpatialMemory spatial;
    EpisodicMemory episodic;
    WorkingMemory working;
};

/// Runs the memory-guided loop: per step, render condition views from the
/// spatial memory at the chunk's new poses, "generate" those frames (oracle
/// render plus noise attenuated per pixel by condition coverage), fuse the
/// chunk into a fresh volume, extract static points, align, and merge them
/// into the spatial memory, feed reveal fractions to the episodic bank, and
/// push the frames through the working window. Deterministic for a fixed
/// config, including across thread counts.
PipelineResult run_autoregressive(const PipelineConfig& cfg, int n_steps);

/// One 97-frame window: 49 source frames, 48 target frames, and the local
/// index of the shared transition frame (the last source frame, which
/// consumers may prepend to the target).
struct Clip {
    std::vector<Frame> source;
    std::vector<Frame> target;
    int transition_index = 48;
    int start_index = 0;  // global index of source[0] in the input stream
};

/// Non-overlapping 97-frame windows at stride 97; a trailing remainder is
/// dropped.
std::vector<Clip> segment_clips(const std::vector<Frame>& frames);

/// Paired training sample: the source half fused to a static point cloud
/// (dynamic content suppressed by the fusion filters), rendered along the
/// target poses; target RGB kept as supervision.
struct PairedSample {
    std::vector<RenderedView> conditions;  // one per target frame
    std::vector<Frame> targets;
    int transition_index = 48;
};

PairedSample build_pair(const Clip& clip, const FusionConfig& fusion, double voxel_size,
                        int splat_radius, int threads = 1);

}  // namespace vwm
