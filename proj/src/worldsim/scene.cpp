#include "vwm/worldsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "vwm/core/error.hpp"
#include "vwm/core/parallel.hpp"
#include "vwm/core/rng.hpp"

namespace vwm {

namespace {

constexpr double kRayEps = 1e-9;

// Smallest ray parameter s > eps with o + s*d on the primitive (local
// frame), or a miss. d need not be unit length: callers use the
// unnormalized pinhole direction so s is camera-space depth directly.
std::optional<double> intersect(const Primitive& prim, const Vec3& o, const Vec3& d) {
    switch (prim.kind) {
        case PrimitiveKind::kSphere: {
            const Vec3 oc = o - prim.center;
            const double a = d.dot(d);
            const double b = 2.0 * oc.dot(d);
            const double c = oc.dot(oc) - prim.radius * prim.radius;
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) return std::nullopt;
            const double sq = std::sqrt(disc);
            const double s1 = (-b - sq) / (2.0 * a);
            if (s1 > kRayEps) return s1;
            const double s2 = (-b + sq) / (2.0 * a);
            if (s2 > kRayEps) return s2;
            return std::nullopt;
        }
        case PrimitiveKind::kBox: {
            double t0 = -std::numeric_limits<double>::infinity();
            double t1 = std::numeric_limits<double>::infinity();
            for (int a = 0; a < 3; ++a) {
                if (std::abs(d[a]) < 1e-15) {
                    if (o[a] < prim.box_min[a] || o[a] > prim.box_max[a]) return std::nullopt;
                    continue;
                }
                double ta = (prim.box_min[a] - o[a]) / d[a];
                double tb = (prim.box_max[a] - o[a]) / d[a];
                if (ta > tb) std::swap(ta, tb);
                t0 = std::max(t0, ta);
                t1 = std::min(t1, tb);
            }
            if (t0 > t1) return std::nullopt;
            if (t0 > kRayEps) return t0;
            if (t1 > kRayEps) return t1;  // origin inside the box
            return std::nullopt;
        }
        case PrimitiveKind::kPlane: {
            const double denom = prim.normal.dot(d);
            if (std::abs(denom) < 1e-15) return std::nullopt;
            const double s = prim.normal.dot(prim.point - o) / denom;
            if (s > kRayEps) return s;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// Surface color at a local-frame point. Checker cells are offset by half a
// cell so that faces lying at integer multiples of the scale sit in cell
// centers, keeping the parity stable against floating-point noise.
Vec3 shade(const Primitive& prim, const Vec3& local_point) {
    if (prim.checker_scale <= 0.0) return prim.color;
    const double s = prim.checker_scale;
    std::int64_t parity = 0;
    for (int a = 0; a < 3; ++a)
        parity += std::int64_t(std::floor((local_point[a] + 0.5 * s) / s));
    return (parity & 1) ? prim.checker_color : prim.color;
}

double surface_distance(const Primitive& prim, const Vec3& p) {
    switch (prim.kind) {
        case PrimitiveKind::kSphere:
            return std::abs((p - prim.center).norm() - prim.radius);
        case PrimitiveKind::kBox: {
            const Vec3 center = 0.5 * (prim.box_min + prim.box_max);
            const Vec3 half = 0.5 * (prim.box_max - prim.box_min);
            const Vec3 q = (p - center).cwiseAbs() - half;
            const double outside = q.cwiseMax(0.0).norm();
            const double inside = std::min(q.maxCoeff(), 0.0);
            return std::abs(outside + inside);
        }
        case PrimitiveKind::kPlane:
            return std::abs(prim.normal.dot(p - prim.point));
    }
    return std::numeric_limits<double>::infinity();
}

bool inside_inflated(const Primitive& prim, const Vec3& local_p, double inflate) {
    switch (prim.kind) {
        case PrimitiveKind::kSphere:
            return (local_p - prim.center).norm() <= prim.radius + inflate;
        case PrimitiveKind::kBox:
            return (local_p.array() >= prim.box_min.array() - inflate).all() &&
                   (local_p.array() <= prim.box_max.array() + inflate).all();
        case PrimitiveKind::kPlane:
            return std::abs(prim.normal.dot(local_p - prim.point)) <= inflate;
    }
    return false;
}

void require_color(const Vec3& c, const char* what) {
    if (!(c.minCoeff() >= 0.0 && c.maxCoeff() <= 1.0))
        throw ValidationError(std::string("scene: ") + what + " outside [0,1]");
}

}  // namespace

void Primitive::validate() const {
    require_color(color, "primitive color");
    if (checker_scale < 0.0) throw ValidationError("scene: negative checker scale");
    if (checker_scale > 0.0) require_color(checker_color, "checker color");
    switch (kind) {
        case PrimitiveKind::kBox:
            if (!((box_max - box_min).minCoeff() > 0.0))
                throw ValidationError("scene: box must have positive extent");
            break;
        case PrimitiveKind::kSphere:
            if (!(radius > 0.0)) throw ValidationError("scene: sphere radius must be positive");
            break;
        case PrimitiveKind::kPlane:
            if (std::abs(normal.norm() - 1.0) > 1e-9)
                throw ValidationError("scene: plane normal must be unit length");
            break;
    }
}

void SyntheticScene::validate(int max_frame) const {
    if (!((bounds_max - bounds_min).minCoeff() > 0.0))
        throw ValidationError("scene: bounds must have positive extent");

    auto check_intersects_bounds = [this](const Primitive& prim, const Vec3& lo_off,
                                          const Vec3& hi_off) {
        Vec3 lo, hi;
        switch (prim.kind) {
            case PrimitiveKind::kBox:
                lo = prim.box_min + lo_off;
                hi = prim.box_max + hi_off;
                break;
            case PrimitiveKind::kSphere:
                lo = prim.center - Vec3::Constant(prim.radius) + lo_off;
                hi = prim.center + Vec3::Constant(prim.radius) + hi_off;
                break;
            case PrimitiveKind::kPlane: {
                // An infinite plane intersects the bounds box iff the
                // corners do not all lie strictly on one side.
                double lo_d = std::numeric_limits<double>::infinity();
                double hi_d = -std::numeric_limits<double>::infinity();
                for (int corner = 0; corner < 8; ++corner) {
                    const Vec3 c((corner & 1) ? bounds_max.x() : bounds_min.x(),
                                 (corner & 2) ? bounds_max.y() : bounds_min.y(),
                                 (corner & 4) ? bounds_max.z() : bounds_min.z());
                    const double d = prim.normal.dot(c - prim.point);
                    lo_d = std::min(lo_d, d);
                    hi_d = std::max(hi_d, d);
                }
                if (lo_d > 0.0 || hi_d < 0.0)
                    throw ValidationError("scene: plane lies outside the bounds");
                return;
            }
        }
        if ((hi.array() < bounds_min.array()).any() || (lo.array() > bounds_max.array()).any())
            throw ValidationError("scene: primitive lies outside the bounds");
    };

    for (const Primitive& prim : static_primitives) {
        prim.validate();
        check_intersects_bounds(prim, Vec3::Zero(), Vec3::Zero());
    }
    for (const DynamicObject& obj : dynamic_objects) {
        obj.shape.validate();
        // Conservative position envelope over frames [0, max_frame]:
        // base + linear*t spans an interval per axis, the sinusoid adds
        // +/- |amplitude|.
        const Vec3 drift = obj.path.linear * double(std::max(max_frame, 0));
        const Vec3 lo = obj.path.base.cwiseMin(obj.path.base + drift) - obj.path.amplitude.cwiseAbs();
        const Vec3 hi = obj.path.base.cwiseMax(obj.path.base + drift) + obj.path.amplitude.cwiseAbs();
        check_intersects_bounds(obj.shape, lo, hi);

        Vec3 shape_lo, shape_hi;
        switch (obj.shape.kind) {
            case PrimitiveKind::kBox:
                shape_lo = obj.shape.box_min;
                shape_hi = obj.shape.box_max;
                break;
            case PrimitiveKind::kSphere:
                shape_lo = obj.shape.center - Vec3::Constant(obj.shape.radius);
                shape_hi = obj.shape.center + Vec3::Constant(obj.shape.radius);
                break;
            case PrimitiveKind::kPlane:
                throw ValidationError("scene: dynamic planes are not supported");
        }
        if (((shape_lo + lo).array() < bounds_min.array()).any() ||
            ((shape_hi + hi).array() > bounds_max.array()).any())
            throw ValidationError("scene: dynamic object can leave the bounds");
    }
}

bool SyntheticScene::in_dynamic_swept_volume(const Vec3& p, int max_frame, double inflate) const {
    for (const DynamicObject& obj : dynamic_objects) {
        for (int t = 0; t <= max_frame; ++t) {
            const Vec3 local = p - obj.path.position(t);
            if (inside_inflated(obj.shape, local, inflate)) return true;
        }
    }
    return false;
}

double SyntheticScene::static_surface_distance(const Vec3& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Primitive& prim : static_primitives)
        best = std::min(best, surface_distance(prim, p));
    return best;
}

bool SyntheticScene::inside_static_solid(const Vec3& p) const {
    for (const Primitive& prim : static_primitives) {
        if (prim.kind == PrimitiveKind::kPlane) continue;
        if (inside_inflated(prim, p, 0.0)) return true;
    }
    return false;
}

bool SyntheticScene::near_static_surface(const Vec3& p, double h) const {
    if (!inside_static_solid(p)) return static_surface_distance(p) <= h;
    for (int axis = 0; axis < 3; ++axis) {
        for (const double sign : {-1.0, 1.0}) {
            Vec3 q = p;
            q[axis] += sign * h;
            if (!inside_static_solid(q)) return true;
        }
    }
    return false;
}

SyntheticScene build_scene(std::uint64_t seed, ScenePreset preset) {
    SyntheticScene scene;
    scene.seed = seed;

    auto box = [](const Vec3& lo, const Vec3& hi, const Vec3& color) {
        Primitive p;
        p.kind = PrimitiveKind::kBox;
        p.box_min = lo;
        p.box_max = hi;
        p.color = color;
        return p;
    };

    if (preset == ScenePreset::kRoomWithMover) {
        scene.bounds_min = Vec3(-3.35, -0.35, -3.35);
        scene.bounds_max = Vec3(3.35, 3.2, 3.35);

        // Five checkered walls (floor plus four sides, open top). Walls are
        // thicker than the default fusion truncation band so their hidden
        // faces sit beyond the behind-surface cutoff and never accumulate
        // weight; face coordinates avoid checker-cell boundaries.
        Rng wall_rng(mix_seed(seed, 1));
        const double thick = 0.35;
        const struct {
            Vec3 lo, hi;
        } walls[5] = {
            {Vec3(-3.35, -thick, -3.35), Vec3(3.35, 0.0, 3.35)},  // floor
            {Vec3(-3.35, -thick, -3.35), Vec3(-3.0, 3.2, 3.35)},
            {Vec3(3.0, -thick, -3.35), Vec3(3.35, 3.2, 3.35)},
            {Vec3(-3.35, -thick, -3.35), Vec3(3.35, 3.2, -3.0)},
            {Vec3(-3.35, -thick, 3.0), Vec3(3.35, 3.2, 3.35)},
        };
        for (const auto& w : walls) {
            Primitive p = box(w.lo, w.hi, Vec3::Zero());
            for (int c = 0; c < 3; ++c) p.color[c] = wall_rng.uniform(0.15, 0.45);
            p.checker_scale = 0.8;
            for (int c = 0; c < 3; ++c) p.checker_color[c] = wall_rng.uniform(0.55, 0.9);
            scene.static_primitives.push_back(p);
        }

        // Three solid boxes standing on the floor, clear of the mover's
        // altitude band.
        Rng box_rng(mix_seed(seed, 2));
        for (int i = 0; i < 3; ++i) {
            const double cx = box_rng.uniform(-2.0, 2.0);
            const double cz = box_rng.uniform(-2.0, 2.0);
            const double hx = box_rng.uniform(0.2, 0.45);
            const double hz = box_rng.uniform(0.2, 0.45);
            const double h = box_rng.uniform(0.4, 0.9);
            Vec3 color;
            for (int c = 0; c < 3; ++c) color[c] = box_rng.uniform(0.2, 0.9);
            scene.static_primitives.push_back(
                box(Vec3(cx - hx, 0.0, cz - hz), Vec3(cx + hx, h, cz + hz), color));
        }

        // One sphere gliding sinusoidally in the x/z plane, in an altitude
        // band above the boxes and below typical camera heights so its
        // swept volume touches no static surface.
        Rng mover_rng(mix_seed(seed, 3));
        DynamicObject mover;
        mover.shape.kind = PrimitiveKind::kSphere;
        mover.shape.center = Vec3::Zero();
        mover.shape.radius = mover_rng.uniform(0.25, 0.4);
        mover.shape.color =
            Vec3(mover_rng.uniform(0.75, 1.0), mover_rng.uniform(0.05, 0.25),
                 mover_rng.uniform(0.05, 0.25));
        mover.path.base = Vec3(mover_rng.uniform(-0.8, 0.8), mover_rng.uniform(1.65, 1.85),
                               mover_rng.uniform(-0.8, 0.8));
        mover.path.amplitude = Vec3(mover_rng.uniform(0.8, 1.4), 0.0, mover_rng.uniform(0.8, 1.4));
        mover.path.omega = mover_rng.uniform(0.15, 0.3);
        mover.path.phase = mover_rng.uniform(0.0, 2.0 * M_PI);
        scene.dynamic_objects.push_back(mover);
    } else {  // kCorridor
        scene.bounds_min = Vec3(-1.35, -0.35, -8.35);
        scene.bounds_max = Vec3(1.35, 2.55, 8.35);

        Rng rng(mix_seed(seed, 4));
        auto solid = [&rng]() {
            Vec3 c;
            for (int i = 0; i < 3; ++i) c[i] = rng.uniform(0.15, 0.9);
            return c;
        };
        scene.static_primitives.push_back(
            box(Vec3(-1.35, -0.35, -8.35), Vec3(1.35, 0.0, 8.35), solid()));  // floor
        scene.static_primitives.push_back(
            box(Vec3(-1.35, 2.2, -8.35), Vec3(1.35, 2.55, 8.35), solid()));  // ceiling
        scene.static_primitives.push_back(
            box(Vec3(-1.35, -0.35, -8.35), Vec3(-1.0, 2.55, 8.35), solid()));
        scene.static_primitives.push_back(
            box(Vec3(1.0, -0.35, -8.35), Vec3(1.35, 2.55, 8.35), solid()));
        scene.static_primitives.push_back(
            box(Vec3(-1.35, -0.35, -8.35), Vec3(1.35, 2.55, -8.0), solid()));  // far end
        scene.static_primitives.push_back(
            box(Vec3(-1.35, -0.35, 8.0), Vec3(1.35, 2.55, 8.35), solid()));  // near end

        // A few crates along alternating sides for parallax.
        for (int i = 0; i < 4; ++i) {
            const double z = -6.0 + 4.0 * i;
            const double x = (i % 2 == 0) ? -0.65 : 0.65;
            const double half = rng.uniform(0.15, 0.3);
            const double h = rng.uniform(0.4, 1.0);
            scene.static_primitives.push_back(
                box(Vec3(x - half, 0.0, z - half), Vec3(x + half, h, z + half), solid()));
        }
    }

    scene.validate(0);
    return scene;
}

std::pair<Frame, std::vector<std::uint8_t>> render_frame(const SyntheticScene& scene,
                                                         const CameraPose& pose,
                                                         const CameraIntrinsics& intr, int t,
                                                         int threads) {
    intr.validate();
    pose.validate();

    Frame frame;
    frame.index = t;
    frame.intrinsics = intr;
    frame.pose = pose;
    frame.image = Image(intr.width, intr.height);
    frame.depth = DepthMap(intr.width, intr.height);
    std::vector<std::uint8_t> static_mask(std::size_t(intr.width) * intr.height, 1);

    // Dynamic placements are fixed for the whole frame.
    std::vector<Vec3> offsets(scene.dynamic_objects.size());
    for (std::size_t i = 0; i < offsets.size(); ++i)
        offsets[i] = scene.dynamic_objects[i].path.position(t);

    const Vec3 origin = pose.center();
    const Vec3 sky = sky_color();

    parallel_for(0, intr.height, threads, [&](std::int64_t y_lo, std::int64_t y_hi) {
        for (std::int64_t y = y_lo; y < y_hi; ++y) {
            for (int x = 0; x < intr.width; ++x) {
                // Unnormalized pinhole direction: the ray parameter equals
                // camera-space z, i.e. the stored depth.
                const Vec3 dir_cam((x - intr.cx) / intr.fx, (y - intr.cy) / intr.fy, 1.0);
                const Vec3 dir = pose.rotation * dir_cam;

                double best_s = std::numeric_limits<double>::infinity();
                const Primitive* hit = nullptr;
                Vec3 hit_offset = Vec3::Zero();
                bool hit_static = true;

                for (const Primitive& prim : scene.static_primitives) {
                    const auto s = intersect(prim, origin, dir);
                    if (s && *s < best_s) {
                        best_s = *s;
                        hit = &prim;
                        hit_offset = Vec3::Zero();
                        hit_static = true;
                    }
                }
                for (std::size_t i = 0; i < scene.dynamic_objects.size(); ++i) {
                    const auto s =
                        intersect(scene.dynamic_objects[i].shape, origin - offsets[i], dir);
                    if (s && *s < best_s) {
                        best_s = *s;
                        hit = &scene.dynamic_objects[i].shape;
                        hit_offset = offsets[i];
                        hit_static = false;
                    }
                }

                const std::size_t px = std::size_t(y) * intr.width + x;
                if (hit == nullptr) {
                    frame.image.set(x, int(y), float(sky.x()), float(sky.y()), float(sky.z()));
                    continue;  // invalid depth, static label
                }
                const Vec3 local = origin - hit_offset + best_s * dir;
                const Vec3 color = shade(*hit, local);
                frame.image.set(x, int(y), float(color.x()), float(color.y()), float(color.z()));
                frame.depth.set(x, int(y), float(best_s));
                static_mask[px] = hit_static ? 1 : 0;
            }
        }
    });

    return {std::move(frame), std::move(static_mask)};
}

namespace {

using nlohmann::json;

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ValidationError(where + ": expected an array of 3 numbers");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* key : allowed) ok = ok || item.key() == key;
        if (!ok) throw ValidationError(where + ": unknown key '" + item.key() + "'");
    }
}

json primitive_to_json(const Primitive& p) {
    json j;
    switch (p.kind) {
        case PrimitiveKind::kBox:
            j["type"] = "box";
            j["min"] = vec_to_json(p.box_min);
            j["max"] = vec_to_json(p.box_max);
            break;
        case PrimitiveKind::kSphere:
            j["type"] = "sphere";
            j["center"] = vec_to_json(p.center);
            j["radius"] = p.radius;
            break;
        case PrimitiveKind::kPlane:
            j["type"] = "plane";
            j["point"] = vec_to_json(p.point);
            j["normal"] = vec_to_json(p.normal);
            break;
    }
    j["color"] = vec_to_json(p.color);
    if (p.checker_scale > 0.0) {
        j["checker_scale"] = p.checker_scale;
        j["checker_color"] = vec_to_json(p.checker_color);
    }
    return j;
}

Primitive primitive_from_json(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("type"))
        throw ValidationError(where + ": primitive must be an object with a 'type'");
    Primitive p;
    const std::string type = j["type"].get<std::string>();
    if (type == "box") {
        reject_unknown_keys(j, {"type", "min", "max", "color", "checker_scale", "checker_color"},
                            where);
        p.kind = PrimitiveKind::kBox;
        p.box_min = vec_from_json(j.at("min"), where + ".min");
        p.box_max = vec_from_json(j.at("max"), where + ".max");
    } else if (type == "sphere") {
        reject_unknown_keys(j, {"type", "center", "radius", "color", "checker_scale",
                                "checker_color"},
                            where);
        p.kind = PrimitiveKind::kSphere;
        p.center = vec_from_json(j.at("center"), where + ".center");
        p.radius = j.at("radius").get<double>();
    } else if (type == "plane") {
        reject_unknown_keys(j, {"type", "point", "normal", "color", "checker_scale",
                                "checker_color"},
                            where);
        p.kind = PrimitiveKind::kPlane;
        p.point = vec_from_json(j.at("point"), where + ".point");
        p.normal = vec_from_json(j.at("normal"), where + ".normal");
        const double n = p.normal.norm();
        if (!(n > 0.0)) throw ValidationError(where + ": plane normal must be nonzero");
        p.normal /= n;
    } else {
        throw ValidationError(where + ": unknown primitive type '" + type + "'");
    }
    p.color = vec_from_json(j.at("color"), where + ".color");
    if (j.contains("checker_scale")) {
        p.checker_scale = j["checker_scale"].get<double>();
        p.checker_color = vec_from_json(j.at("checker_color"), where + ".checker_color");
    }
    p.validate();
    return p;
}

}  // namespace

void write_scene(const std::filesystem::path& path, const SyntheticScene& scene) {
    json doc;
    doc["seed"] = scene.seed;
    doc["bounds"] = {{"min", vec_to_json(scene.bounds_min)}, {"max", vec_to_json(scene.bounds_max)}};
    doc["primitives"] = json::array();
    for (const Primitive& p : scene.static_primitives)
        doc["primitives"].push_back(primitive_to_json(p));
    doc["dynamics"] = json::array();
    for (const DynamicObject& obj : scene.dynamic_objects) {
        doc["dynamics"].push_back(
            {{"primitive", primitive_to_json(obj.shape)},
             {"path",
              {{"base", vec_to_json(obj.path.base)},
               {"linear", vec_to_json(obj.path.linear)},
               {"amplitude", vec_to_json(obj.path.amplitude)},
               {"omega", obj.path.omega},
               {"phase", obj.path.phase}}}});
    }
    std::ofstream out(path);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw ValidationError(path.string() + ": write failed");
}

SyntheticScene read_scene(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError(path.string() + ": cannot open for reading");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    const std::string where = path.string();
    reject_unknown_keys(doc, {"seed", "bounds", "primitives", "dynamics"}, where);

    SyntheticScene scene;
    scene.seed = doc.value("seed", std::uint64_t(0));
    if (!doc.contains("bounds")) throw ValidationError(where + ": missing 'bounds'");
    reject_unknown_keys(doc["bounds"], {"min", "max"}, where + ".bounds");
    scene.bounds_min = vec_from_json(doc["bounds"].at("min"), where + ".bounds.min");
    scene.bounds_max = vec_from_json(doc["bounds"].at("max"), where + ".bounds.max");

    for (const json& j : doc.value("primitives", json::array()))
        scene.static_primitives.push_back(primitive_from_json(j, where + ".primitives"));
    for (const json& j : doc.value("dynamics", json::array())) {
        reject_unknown_keys(j, {"primitive", "path"}, where + ".dynamics");
        DynamicObject obj;
        obj.shape = primitive_from_json(j.at("primitive"), where + ".dynamics.primitive");
        const json& path_j = j.at("path");
        reject_unknown_keys(path_j, {"base", "linear", "amplitude", "omega", "phase"},
                            where + ".dynamics.path");
        obj.path.base = vec_from_json(path_j.at("base"), where + ".path.base");
        obj.path.linear = vec_from_json(path_j.value("linear", json::array({0.0, 0.0, 0.0})),
                                        where + ".path.linear");
        obj.path.amplitude = vec_from_json(
            path_j.value("amplitude", json::array({0.0, 0.0, 0.0})), where + ".path.amplitude");
        obj.path.omega = path_j.value("omega", 0.0);
        obj.path.phase = path_j.value("phase", 0.0);
        scene.dynamic_objects.push_back(obj);
    }
    scene.validate(0);
    return scene;
}

}  // namespace vwm
