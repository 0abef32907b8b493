#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "vwm/core/types.hpp"

namespace vwm {

enum class PrimitiveKind { kBox, kSphere, kPlane };

/// One solid-color (optionally checkered) primitive in its local frame.
/// Static primitives have local frame == world frame; dynamic ones are
/// translated by their motion path.
struct Primitive {
    PrimitiveKind kind = PrimitiveKind::kBox;
    Vec3 color = Vec3(0.5, 0.5, 0.5);

    // Checkerboard: when checker_scale > 0, cells of that size alternate
    // between `color` and `checker_color` by 3D cell parity.
    double checker_scale = 0.0;
    Vec3 checker_color = Vec3::Zero();

    Vec3 box_min = Vec3::Zero(), box_max = Vec3::Zero();  // kBox
    Vec3 center = Vec3::Zero();                           // kSphere
    double radius = 0.0;                                  // kSphere
    Vec3 point = Vec3::Zero();                            // kPlane (infinite)
    Vec3 normal = Vec3(0.0, 1.0, 0.0);                    // kPlane

    void validate() const;
};

/// Position as a function of frame index: constant + linear + sinusoid.
struct MotionPath {
    Vec3 base = Vec3::Zero();
    Vec3 linear = Vec3::Zero();     // per frame
    Vec3 amplitude = Vec3::Zero();  // componentwise sinusoid amplitude
    double omega = 0.0;             // radians per frame
    double phase = 0.0;

    Vec3 position(double t) const {
        return base + linear * t + amplitude * std::sin(omega * t + phase);
    }
};

struct DynamicObject {
    Primitive shape;  // local frame; world placement = local + path.position(t)
    MotionPath path;
};

/// Procedural scene: ground-truth oracle for generation and evaluation.
struct SyntheticScene {
    std::vector<Primitive> static_primitives;
    std::vector<DynamicObject> dynamic_objects;
    Vec3 bounds_min = Vec3::Zero(), bounds_max = Vec3::Zero();
    std::uint64_t seed = 0;

    /// Checks primitive sanity, that every primitive touches the bounds, and
    /// (conservatively, via the path envelope) that dynamic objects stay in
    /// bounds over frames [0, max_frame].
    void validate(int max_frame) const;

    /// World-space membership test against the volume swept by any dynamic
    /// object over integer frames [0, max_frame], with each shape inflated
    /// by `inflate` on all sides.
    bool in_dynamic_swept_volume(const Vec3& p, int max_frame, double inflate) const;

    /// Unsigned distance from p to the nearest static primitive surface,
    /// counting faces buried inside other primitives.
    double static_surface_distance(const Vec3& p) const;

    /// Whether p lies inside any static solid (boxes and spheres; planes
    /// are thin and have no interior).
    bool inside_static_solid(const Vec3& p) const;

    /// Whether p lies within h of the boundary of the union of static
    /// solids — the surface a camera can actually observe. Outside the
    /// union this is the primitive-distance test; inside it asks whether
    /// stepping h along some axis escapes (exact for axis-aligned faces,
    /// so faces buried inside another solid do not count).
    bool near_static_surface(const Vec3& p, double h) const;
};

enum class ScenePreset { kRoomWithMover, kCorridor };

/// Deterministic in (seed, preset). room-with-mover: a checkered room open
/// at the top, three solid boxes, and one sphere gliding on a sinusoidal
/// path. corridor: a static solid-color hallway.
SyntheticScene build_scene(std::uint64_t seed, ScenePreset preset);

/// Miss color for primary rays (sky); misses carry no depth and are
/// labelled static.
inline Vec3 sky_color() { return Vec3(0.6, 0.8, 1.0); }

/// Analytic ray cast of every pixel at time t. Depth is camera-space z of
/// the nearest hit. static_mask is true where the nearest hit is a static
/// primitive and on misses.
std::pair<Frame, std::vector<std::uint8_t>> render_frame(const SyntheticScene& scene,
                                                         const CameraPose& pose,
                                                         const CameraIntrinsics& intr, int t,
                                                         int threads = 1);

/// Scene description file: {"bounds", "seed", "primitives", "dynamics"}.
void write_scene(const std::filesystem::path& path, const SyntheticScene& scene);
SyntheticScene read_scene(const std::filesystem::path& path);

}  // namespace vwm
