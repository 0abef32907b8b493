#include "vwm/tsdf/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "vwm/core/geometry.hpp"
#include "vwm/core/parallel.hpp"

namespace vwm {

void FusionConfig::validate(double voxel_size) const {
    if (!(frame_weight > 0.0)) throw ValidationError("fusion: frame weight must be positive");
    if (max_grid_dim < 1) throw ValidationError("fusion: max grid dim must be positive");
    if (!(min_weight > 0.0)) throw ValidationError("fusion: min weight must be positive");
    if (!(surface_band > 0.0)) throw ValidationError("fusion: surface band must be positive");
    if (!(variance_cap > 0.0)) throw ValidationError("fusion: variance cap must be positive");
    if (truncation < 0.0) throw ValidationError("fusion: truncation must be nonnegative");
    if (resolved_truncation(voxel_size) < voxel_size)
        throw ValidationError("fusion: truncation smaller than the voxel size");
}

GridGeometry compute_grid_geometry(const Vec3& bounds_min, const Vec3& bounds_max,
                                   double requested_voxel_size, int max_grid_dim) {
    const Vec3 extent = bounds_max - bounds_min;
    if (!(extent.minCoeff() > 0.0))
        throw ValidationError("grid: bounds must have positive extent on every axis");
    if (!(requested_voxel_size > 0.0))
        throw ValidationError("grid: voxel size must be positive");
    if (max_grid_dim < 1) throw ValidationError("grid: max grid dim must be positive");

    GridGeometry geom;
    geom.origin = bounds_min;
    geom.voxel_size = requested_voxel_size;

    auto dims_for = [&extent](double voxel) {
        std::array<int, 3> dims;
        for (int a = 0; a < 3; ++a) dims[std::size_t(a)] = int(std::ceil(extent[a] / voxel));
        return dims;
    };

    geom.dims = dims_for(geom.voxel_size);
    const int max_dim = *std::max_element(geom.dims.begin(), geom.dims.end());
    if (max_dim > max_grid_dim) {
        geom.voxel_size = extent.maxCoeff() / double(max_grid_dim);
        geom.dims = dims_for(geom.voxel_size);
        // ceil(extent / (max_extent / cap)) can still land one voxel over on
        // the longest axis when the division rounds up; the cap is a hard
        // contract, so clamp.
        for (int& dim : geom.dims) dim = std::min(dim, max_grid_dim);
    }
    return geom;
}

TsdfVolume new_volume(const Vec3& bounds_min, const Vec3& bounds_max,
                      double requested_voxel_size, const FusionConfig& cfg) {
    const GridGeometry geom =
        compute_grid_geometry(bounds_min, bounds_max, requested_voxel_size, cfg.max_grid_dim);
    cfg.validate(geom.voxel_size);

    TsdfVolume volume;
    volume.origin = geom.origin;
    volume.voxel_size = geom.voxel_size;
    volume.dims = geom.dims;
    volume.truncation = cfg.resolved_truncation(geom.voxel_size);

    const std::size_t n =
        std::size_t(geom.dims[0]) * std::size_t(geom.dims[1]) * std::size_t(geom.dims[2]);
    volume.d.assign(n, 1.0f);  // unobserved = free space
    volume.w.assign(n, 0.0f);
    volume.m2.assign(n, 0.0f);
    volume.color.assign(3 * n, 0.0f);
    return volume;
}

namespace {

struct SdfSample {
    double sdf = 0.0;  // normalized
    int px = 0, py = 0;
};

// Shared skip logic for voxel_sdf and integrate_frame; all arithmetic in
// double, camera-frame position precomputed by the caller.
std::optional<SdfSample> sample_sdf(const Vec3& point_cam, const Frame& frame,
                                    double truncation) {
    const auto proj = project(point_cam, frame.intrinsics);
    if (!proj) return std::nullopt;
    const int px = nearest_pixel(proj->u, frame.intrinsics.width);
    const int py = nearest_pixel(proj->v, frame.intrinsics.height);
    const float depth = frame.depth.at(px, py);
    if (!DepthMap::is_valid(depth)) return std::nullopt;
    const double sdf = (double(depth) - proj->z) / truncation;
    if (sdf < -1.0) return std::nullopt;  // occluded beyond the band
    return SdfSample{std::min(sdf, 1.0), px, py};
}

}  // namespace

std::optional<double> voxel_sdf(const Vec3& voxel_center_world, const Frame& frame,
                                double truncation) {
    if (!(truncation > 0.0)) throw ValidationError("voxel_sdf: truncation must be positive");
    const auto sample = sample_sdf(frame.pose.world_to_cam(voxel_center_world), frame, truncation);
    if (!sample) return std::nullopt;
    return sample->sdf;
}

void integrate_frame(TsdfVolume& volume, const Frame& frame, const FusionConfig& cfg,
                     int threads) {
    frame.validate();
    const double weight = cfg.frame_weight;
    if (!(weight > 0.0)) throw ValidationError("integrate: frame weight must be positive");

    const Mat3 world_to_cam_rot = frame.pose.rotation.transpose();
    const Vec3 cam_center = frame.pose.translation;
    const int nx = volume.dims[0], ny = volume.dims[1];

    // One slice of constant z per task granule; voxel updates are disjoint,
    // so any thread split is bit-identical to the sequential pass.
    parallel_for(0, volume.dims[2], threads, [&](std::int64_t z_lo, std::int64_t z_hi) {
        for (std::int64_t iz = z_lo; iz < z_hi; ++iz) {
            for (int iy = 0; iy < ny; ++iy) {
                std::size_t idx = volume.linear_index(0, iy, int(iz));
                for (int ix = 0; ix < nx; ++ix, ++idx) {
                    const Vec3 center = volume.voxel_center(ix, iy, int(iz));
                    const Vec3 cam = world_to_cam_rot * (center - cam_center);
                    const auto sample = sample_sdf(cam, frame, volume.truncation);
                    if (!sample) continue;

                    const double w_old = volume.w[idx];
                    const double w_new = w_old + weight;
                    const double mean_old = volume.d[idx];
                    const double delta = sample->sdf - mean_old;
                    // Weighted mean; with w_old = 0 this is the sample itself
                    // and the initialization value cancels out.
                    const double mean_new =
                        (w_old * mean_old + weight * sample->sdf) / w_new;
                    volume.d[idx] =
                        float(std::clamp(mean_new, -1.0, 1.0));
                    volume.w[idx] = float(w_new);
                    // Incremental weighted variance: delta uses the old mean,
                    // the second factor the new one. Zero on first touch.
                    volume.m2[idx] =
                        float(double(volume.m2[idx]) + weight * delta * (sample->sdf - mean_new));

                    const std::size_t pix =
                        3 * (std::size_t(sample->py) * frame.intrinsics.width + sample->px);
                    for (int c = 0; c < 3; ++c) {
                        const double c_old = volume.color[3 * idx + c];
                        const double c_obs = frame.image.pixels[pix + c];
                        volume.color[3 * idx + c] =
                            float((w_old * c_old + weight * c_obs) / w_new);
                    }
                }
            }
        }
    });
}

PointCloud extract_static_points(const TsdfVolume& volume, const FusionConfig& cfg) {
    PointCloud cloud;
    // Lexicographic (x, y, z) emission order.
    for (int ix = 0; ix < volume.dims[0]; ++ix) {
        for (int iy = 0; iy < volume.dims[1]; ++iy) {
            for (int iz = 0; iz < volume.dims[2]; ++iz) {
                const std::size_t idx = volume.linear_index(ix, iy, iz);
                const float w = volume.w[idx];
                if (w < cfg.min_weight) continue;
                if (std::abs(volume.d[idx]) > cfg.surface_band) continue;
                if (cfg.variance_filter_enabled && volume.variance_at(idx) > cfg.variance_cap)
                    continue;
                cloud.push_back(volume.voxel_center(ix, iy, iz),
                                Vec3(volume.color[3 * idx], volume.color[3 * idx + 1],
                                     volume.color[3 * idx + 2]),
                                w);
            }
        }
    }
    return cloud;
}

namespace {

constexpr char kMagic[4] = {'T', 'S', 'D', 'F'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_raw(std::ofstream& out, const T* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), std::streamsize(sizeof(T) * count));
}

template <typename T>
void read_raw(std::ifstream& in, T* data, std::size_t count, const std::filesystem::path& path,
              const char* what) {
    in.read(reinterpret_cast<char*>(data), std::streamsize(sizeof(T) * count));
    if (std::size_t(in.gcount()) != sizeof(T) * count)
        throw ValidationError(path.string() + ": truncated " + what + " section");
}

}  // namespace

void save_volume(const std::filesystem::path& path, const TsdfVolume& volume) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError(path.string() + ": cannot open for writing");

    write_raw(out, kMagic, 4);
    write_raw(out, &kVersion, 1);
    const double origin[3] = {volume.origin.x(), volume.origin.y(), volume.origin.z()};
    write_raw(out, origin, 3);
    write_raw(out, &volume.voxel_size, 1);
    const std::uint32_t dims[3] = {std::uint32_t(volume.dims[0]), std::uint32_t(volume.dims[1]),
                                   std::uint32_t(volume.dims[2])};
    write_raw(out, dims, 3);
    write_raw(out, &volume.truncation, 1);
    write_raw(out, volume.d.data(), volume.d.size());
    write_raw(out, volume.w.data(), volume.w.size());
    write_raw(out, volume.m2.data(), volume.m2.size());
    write_raw(out, volume.color.data(), volume.color.size());
    if (!out) throw ValidationError(path.string() + ": write failed");
}

TsdfVolume load_volume(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(path.string() + ": cannot open for reading");

    char magic[4];
    read_raw(in, magic, 4, path, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw ValidationError(path.string() + ": bad magic at byte offset 0 (expected 'TSDF')");
    std::uint32_t version = 0;
    read_raw(in, &version, 1, path, "version");
    if (version != kVersion)
        throw ValidationError(path.string() + ": unsupported version " + std::to_string(version));

    TsdfVolume volume;
    double origin[3];
    read_raw(in, origin, 3, path, "origin");
    volume.origin = Vec3(origin[0], origin[1], origin[2]);
    read_raw(in, &volume.voxel_size, 1, path, "voxel size");
    std::uint32_t dims[3];
    read_raw(in, dims, 3, path, "dims");
    for (int a = 0; a < 3; ++a) {
        if (dims[a] == 0 || dims[a] > 1u << 24)
            throw ValidationError(path.string() + ": implausible dims field");
        volume.dims[std::size_t(a)] = int(dims[a]);
    }
    read_raw(in, &volume.truncation, 1, path, "truncation");
    if (!(volume.voxel_size > 0.0) || !(volume.truncation > 0.0))
        throw ValidationError(path.string() + ": nonpositive voxel size or truncation");

    const std::size_t n =
        std::size_t(dims[0]) * std::size_t(dims[1]) * std::size_t(dims[2]);
    volume.d.resize(n);
    volume.w.resize(n);
    volume.m2.resize(n);
    volume.color.resize(3 * n);
    read_raw(in, volume.d.data(), n, path, "distance");
    read_raw(in, volume.w.data(), n, path, "weight");
    read_raw(in, volume.m2.data(), n, path, "variance");
    read_raw(in, volume.color.data(), 3 * n, path, "color");
    return volume;
}

}  // namespace vwm
