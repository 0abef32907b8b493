#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "helpers.hpp"
#include "vwm/core/error.hpp"
#include "vwm/core/geometry.hpp"
#include "vwm/tsdf/volume.hpp"

using namespace vwm;
using vwm_test::TempDir;

namespace {

// Small grid in front of an identity-pose camera; every voxel projects
// inside a 40x30 image with the test intrinsics.
constexpr double kVoxel = 0.1;
const Vec3 kLo(-0.4, -0.3, 0.8);
const Vec3 kHi(0.4, 0.3, 1.6);

CameraIntrinsics frame_intrinsics() { return vwm_test::test_intrinsics(40, 30); }

TsdfVolume fresh_volume(const FusionConfig& cfg) { return new_volume(kLo, kHi, kVoxel, cfg); }

// Frame observing the fronto-parallel plane z = z0 from the origin.
Frame plane_frame(float z0, int index = 0) {
    return vwm_test::flat_depth_frame(frame_intrinsics(), z0, Vec3(0.3, 0.6, 0.9), index);
}

// Index of a voxel near the grid center that projects on-image.
std::size_t probe_voxel(const TsdfVolume& volume, int* ix, int* iy, int* iz) {
    *ix = volume.dims[0] / 2;
    *iy = volume.dims[1] / 2;
    *iz = volume.dims[2] / 2;
    return volume.linear_index(*ix, *iy, *iz);
}

}  // namespace

TEST_CASE("fusion config validation") {
    FusionConfig cfg;
    CHECK(cfg.resolved_truncation(0.05) == doctest::Approx(0.25));
    cfg.truncation = 0.3;
    CHECK(cfg.resolved_truncation(0.05) == 0.3);

    CHECK_NOTHROW(cfg.validate(0.05));
    cfg.truncation = 0.01;
    CHECK_THROWS_AS(cfg.validate(0.05), ValidationError);  // smaller than the voxel
    cfg = FusionConfig{};
    cfg.frame_weight = 0.0;
    CHECK_THROWS_AS(cfg.validate(0.05), ValidationError);
    cfg = FusionConfig{};
    cfg.surface_band = -0.1;
    CHECK_THROWS_AS(cfg.validate(0.05), ValidationError);
    cfg = FusionConfig{};
    cfg.min_weight = 0.0;
    CHECK_THROWS_AS(cfg.validate(0.05), ValidationError);
    cfg = FusionConfig{};
    cfg.variance_cap = 0.0;
    CHECK_THROWS_AS(cfg.validate(0.05), ValidationError);
}

TEST_CASE("grid sizing follows the ceil rule and the dimension cap") {
    // Requested voxel overflows the cap: 6.0 / 0.004 = 1500 > 1200, so the
    // voxel grows to 6.0 / 1200 = 0.005 and the grid lands exactly on 1200.
    const GridGeometry capped =
        compute_grid_geometry(Vec3::Zero(), Vec3(6.0, 6.0, 6.0), 0.004, 1200);
    CHECK(capped.voxel_size == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(capped.dims == std::array<int, 3>{1200, 1200, 1200});

    // Under the cap the request is honored unchanged.
    const GridGeometry small =
        compute_grid_geometry(Vec3::Zero(), Vec3(1.0, 1.0, 1.0), 0.01, 1200);
    CHECK(small.voxel_size == 0.01);
    CHECK(small.dims == std::array<int, 3>{100, 100, 100});

    // Exactly at the cap: non-strict, unchanged.
    const GridGeometry boundary =
        compute_grid_geometry(Vec3::Zero(), Vec3(2.4, 1.2, 1.2), 0.002, 1200);
    CHECK(boundary.voxel_size == 0.002);
    CHECK(boundary.dims[0] == 1200);

    // Fractional extents round up.
    const GridGeometry ceil_case =
        compute_grid_geometry(Vec3::Zero(), Vec3(1.05, 0.21, 0.3), 0.1, 1200);
    CHECK(ceil_case.dims == std::array<int, 3>{11, 3, 3});

    CHECK_THROWS_AS(compute_grid_geometry(Vec3::Zero(), Vec3(0.0, 1.0, 1.0), 0.1, 1200),
                    ValidationError);
    CHECK_THROWS_AS(compute_grid_geometry(Vec3::Zero(), Vec3(1.0, 1.0, 1.0), 0.0, 1200),
                    ValidationError);
}

TEST_CASE("grid sizing property: the cap holds for any configuration") {
    Rng rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 extent(rng.uniform(0.2, 20.0), rng.uniform(0.2, 20.0),
                          rng.uniform(0.2, 20.0));
        const double voxel = rng.uniform(0.001, 0.5);
        const int cap = trial % 3 == 0 ? 10 : (trial % 3 == 1 ? 100 : 1200);

        const GridGeometry geom = compute_grid_geometry(Vec3::Zero(), extent, voxel, cap);
        CHECK(*std::max_element(geom.dims.begin(), geom.dims.end()) <= cap);
        for (int a = 0; a < 3; ++a) CHECK(geom.dims[std::size_t(a)] >= 1);

        const int raw_max = int(std::ceil(extent.maxCoeff() / voxel));
        if (raw_max <= cap) {
            CHECK(geom.voxel_size == voxel);
            for (int a = 0; a < 3; ++a)
                CHECK(geom.dims[std::size_t(a)] == int(std::ceil(extent[a] / voxel)));
        } else {
            CHECK(geom.voxel_size == doctest::Approx(extent.maxCoeff() / cap).epsilon(1e-12));
        }
    }
}

TEST_CASE("new volume initializes to free space") {
    const FusionConfig cfg;
    const TsdfVolume volume = fresh_volume(cfg);
    CHECK(volume.truncation == doctest::Approx(5.0 * kVoxel));
    CHECK(volume.voxel_count() == std::size_t(8 * 6 * 8));
    CHECK(std::all_of(volume.d.begin(), volume.d.end(), [](float v) { return v == 1.0f; }));
    CHECK(std::all_of(volume.w.begin(), volume.w.end(), [](float v) { return v == 0.0f; }));
    CHECK(std::all_of(volume.m2.begin(), volume.m2.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("voxel sdf skip conditions and clamping") {
    const double tau = 0.5;
    const Vec3 center(0.0, 0.0, 1.0);

    // Surface exactly at the voxel: zero distance.
    auto d = voxel_sdf(center, plane_frame(1.0f), tau);
    REQUIRE(d.has_value());
    CHECK(*d == doctest::Approx(0.0).epsilon(1e-9));

    // Two bands in front of the surface: clamped to +1.
    d = voxel_sdf(center, plane_frame(float(1.0 + 2.0 * tau)), tau);
    REQUIRE(d.has_value());
    CHECK(*d == 1.0);

    // Two bands behind the surface: occluded, absent.
    CHECK_FALSE(voxel_sdf(center, plane_frame(float(1.0 - 2.0 * tau)), tau).has_value());

    // Behind the camera and off-image points are absent.
    CHECK_FALSE(voxel_sdf(Vec3(0.0, 0.0, -1.0), plane_frame(1.0f), tau).has_value());
    CHECK_FALSE(voxel_sdf(Vec3(5.0, 0.0, 1.0), plane_frame(1.0f), tau).has_value());

    // Invalid depth at the pixel is absent.
    Frame invalid = plane_frame(1.0f);
    invalid.depth.depths.assign(invalid.depth.depths.size(), 0.0f);
    CHECK_FALSE(voxel_sdf(center, invalid, tau).has_value());

    CHECK_THROWS_AS(voxel_sdf(center, plane_frame(1.0f), 0.0), ValidationError);
}

TEST_CASE("integration applies the weighted running mean") {
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    int ix, iy, iz;
    const std::size_t idx = probe_voxel(volume, &ix, &iy, &iz);
    const double zc = volume.voxel_center(ix, iy, iz).z();
    const double tau = volume.truncation;

    // First observation lands as-is with zero variance.
    integrate_frame(volume, plane_frame(float(zc + 0.5 * tau)), cfg);
    CHECK(volume.d[idx] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(volume.w[idx] == 1.0f);
    CHECK(volume.variance_at(idx) == doctest::Approx(0.0).epsilon(1e-9));

    // Second identical observation: mean unchanged, weight accumulates.
    integrate_frame(volume, plane_frame(float(zc + 0.5 * tau)), cfg);
    CHECK(volume.d[idx] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(volume.w[idx] == 2.0f);
}

TEST_CASE("integration matches direct weighted-mean arithmetic") {
    // Build the D=0.6, W=2 state with two observations of 0.6, then fold in
    // a 0.2: (2*0.6 + 0.2) / 3.
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    int ix, iy, iz;
    const std::size_t idx = probe_voxel(volume, &ix, &iy, &iz);
    const double zc = volume.voxel_center(ix, iy, iz).z();
    const double tau = volume.truncation;

    integrate_frame(volume, plane_frame(float(zc + 0.6 * tau)), cfg);
    integrate_frame(volume, plane_frame(float(zc + 0.6 * tau)), cfg);
    integrate_frame(volume, plane_frame(float(zc + 0.2 * tau)), cfg);
    CHECK(volume.d[idx] == doctest::Approx((2.0 * 0.6 + 0.2) / 3.0).epsilon(1e-6));
    CHECK(volume.w[idx] == 3.0f);

    // Variance of {0.6, 0.6, 0.2} with equal weights.
    const double mean = (0.6 + 0.6 + 0.2) / 3.0;
    const double var =
        (2.0 * (0.6 - mean) * (0.6 - mean) + (0.2 - mean) * (0.2 - mean)) / 3.0;
    CHECK(volume.variance_at(idx) == doctest::Approx(var).epsilon(1e-5));
}

TEST_CASE("repeating one frame leaves the mean fixed") {
    FusionConfig cfg;
    TsdfVolume once = fresh_volume(cfg);
    const Frame frame = plane_frame(1.2f);
    integrate_frame(once, frame, cfg);

    TsdfVolume ten = fresh_volume(cfg);
    for (int i = 0; i < 10; ++i) integrate_frame(ten, frame, cfg);

    for (std::size_t i = 0; i < once.voxel_count(); ++i) {
        if (once.w[i] == 0.0f) {
            CHECK(ten.w[i] == 0.0f);
            continue;
        }
        CHECK(ten.w[i] == 10.0f * once.w[i]);
        CHECK(std::abs(double(ten.d[i]) - double(once.d[i])) < 1e-6);
    }
}

TEST_CASE("integration rejects inconsistent frames and weights") {
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    Frame frame = plane_frame(1.0f);
    frame.intrinsics.width = 64;  // no longer matches the image buffers
    CHECK_THROWS_AS(integrate_frame(volume, frame, cfg), ValidationError);

    cfg.frame_weight = -1.0;
    CHECK_THROWS_AS(integrate_frame(volume, plane_frame(1.0f), cfg), ValidationError);
}

TEST_CASE("integration order does not change the field") {
    FusionConfig cfg;
    std::vector<Frame> frames;
    Rng rng(55);
    for (int i = 0; i < 6; ++i)
        frames.push_back(plane_frame(float(rng.uniform(0.9, 1.5)), i));

    TsdfVolume baseline = fresh_volume(cfg);
    for (const Frame& f : frames) integrate_frame(baseline, f, cfg);

    std::vector<std::size_t> order(frames.size());
    std::iota(order.begin(), order.end(), 0);
    for (int trial = 0; trial < 5; ++trial) {
        // Deterministic shuffle via the seeded test generator.
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[std::size_t(rng.uniform(0.0, double(i)))]);

        TsdfVolume shuffled = fresh_volume(cfg);
        for (std::size_t i : order) integrate_frame(shuffled, frames[i], cfg);

        double max_dd = 0.0, max_dw = 0.0;
        for (std::size_t v = 0; v < baseline.voxel_count(); ++v) {
            max_dd = std::max(max_dd, std::abs(double(baseline.d[v]) - double(shuffled.d[v])));
            max_dw = std::max(max_dw, std::abs(double(baseline.w[v]) - double(shuffled.w[v])));
        }
        CHECK(max_dd <= 1e-5);
        CHECK(max_dw <= 1e-5);
    }
}

TEST_CASE("thread count does not change the field") {
    FusionConfig cfg;
    Rng rng(66);
    std::vector<Frame> frames;
    for (int i = 0; i < 4; ++i) frames.push_back(plane_frame(float(rng.uniform(0.9, 1.5)), i));

    TsdfVolume serial = fresh_volume(cfg);
    TsdfVolume threaded = fresh_volume(cfg);
    for (const Frame& f : frames) {
        integrate_frame(serial, f, cfg, 1);
        integrate_frame(threaded, f, cfg, 4);
    }
    CHECK(serial.d == threaded.d);
    CHECK(serial.w == threaded.w);
    CHECK(serial.m2 == threaded.m2);
    CHECK(serial.color == threaded.color);
}

TEST_CASE("free-space observations carve away a transient surface") {
    // One surface hit (d = 0) followed by k free-space hits (d = 1) must
    // drift to k / (k + 1), which leaves the extraction band at the first
    // free observation.
    FusionConfig cfg;
    cfg.min_weight = 1.0;  // isolate the band rule from the weight rule

    for (int k = 0; k <= 5; ++k) {
        TsdfVolume volume = fresh_volume(cfg);
        int ix, iy, iz;
        const std::size_t idx = probe_voxel(volume, &ix, &iy, &iz);
        const double zc = volume.voxel_center(ix, iy, iz).z();

        integrate_frame(volume, plane_frame(float(zc)), cfg);
        for (int i = 0; i < k; ++i)
            integrate_frame(volume, plane_frame(float(zc + volume.truncation)), cfg);

        CHECK(volume.d[idx] == doctest::Approx(double(k) / (k + 1)).epsilon(1e-6));

        const PointCloud points = extract_static_points(volume, cfg);
        const Vec3 center = volume.voxel_center(ix, iy, iz);
        const bool present =
            std::any_of(points.positions.begin(), points.positions.end(),
                        [&](const Vec3& p) { return (p - center).norm() < 1e-9; });
        CHECK(present == (k == 0));  // k >= 1 pushes |D| past the 0.25 band
    }
}

TEST_CASE("fused value stays within the contributed range") {
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    int ix, iy, iz;
    const std::size_t idx = probe_voxel(volume, &ix, &iy, &iz);
    const Vec3 center = volume.voxel_center(ix, iy, iz);

    Rng rng(77);
    double lo = 1.0, hi = -1.0;
    float last_w = 0.0f;
    for (int i = 0; i < 30; ++i) {
        const Frame frame = plane_frame(float(rng.uniform(0.9, 1.5)), i);
        const auto d = voxel_sdf(center, frame, volume.truncation);
        REQUIRE(d.has_value());
        lo = std::min(lo, *d);
        hi = std::max(hi, *d);
        integrate_frame(volume, frame, cfg);

        CHECK(volume.w[idx] > last_w);  // weight never decreases
        last_w = volume.w[idx];
        CHECK(double(volume.d[idx]) >= lo - 1e-6);
        CHECK(double(volume.d[idx]) <= hi + 1e-6);
        CHECK(volume.d[idx] >= -1.0f);
        CHECK(volume.d[idx] <= 1.0f);
    }
}

TEST_CASE("accumulated variance matches the brute-force computation") {
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    int ix, iy, iz;
    const std::size_t idx = probe_voxel(volume, &ix, &iy, &iz);
    const Vec3 center = volume.voxel_center(ix, iy, iz);

    Rng rng(88);
    std::vector<double> contributions, weights;
    const double frame_weights[3] = {0.5, 1.0, 2.0};
    for (int i = 0; i < 15; ++i) {
        cfg.frame_weight = frame_weights[i % 3];
        const Frame frame = plane_frame(float(rng.uniform(0.9, 1.5)), i);
        const auto d = voxel_sdf(center, frame, volume.truncation);
        REQUIRE(d.has_value());
        contributions.push_back(*d);
        weights.push_back(cfg.frame_weight);
        integrate_frame(volume, frame, cfg);
    }

    double w_sum = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        w_sum += weights[i];
        mean += weights[i] * contributions[i];
    }
    mean /= w_sum;
    double var = 0.0;
    for (std::size_t i = 0; i < contributions.size(); ++i)
        var += weights[i] * (contributions[i] - mean) * (contributions[i] - mean);
    var /= w_sum;

    CHECK(volume.w[idx] == doctest::Approx(w_sum).epsilon(1e-9));
    CHECK(double(volume.d[idx]) == doctest::Approx(mean).epsilon(1e-6));
    CHECK(volume.variance_at(idx) == doctest::Approx(var).epsilon(1e-4).scale(1.0));
    CHECK(std::abs(volume.variance_at(idx) - var) < 1e-6);
}

TEST_CASE("extraction emits thresholded voxel centers in index order") {
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);

    // Untouched volume: nothing to extract.
    CHECK(extract_static_points(volume, cfg).empty());

    // Hand-set two voxels; only the compliant one is emitted.
    const std::size_t a = volume.linear_index(1, 2, 3);
    volume.d[a] = 0.0f;
    volume.w[a] = 5.0f;
    volume.m2[a] = 0.0f;
    volume.color[3 * a] = 0.9f;

    const std::size_t b = volume.linear_index(4, 1, 2);
    volume.d[b] = 0.9f;  // outside the surface band
    volume.w[b] = 9.0f;

    const PointCloud points = extract_static_points(volume, cfg);
    REQUIRE(points.size() == 1);
    CHECK((points.positions[0] - volume.voxel_center(1, 2, 3)).norm() < 1e-12);
    CHECK(points.confidences[0] == 5.0f);
    CHECK(points.colors[0].x() == doctest::Approx(0.9).epsilon(1e-6));

    // Emission order is lexicographic in (x, y, z).
    const std::size_t c = volume.linear_index(0, 5, 7);
    volume.d[c] = 0.1f;
    volume.w[c] = 4.0f;
    const PointCloud two = extract_static_points(volume, cfg);
    REQUIRE(two.size() == 2);
    CHECK((two.positions[0] - volume.voxel_center(0, 5, 7)).norm() < 1e-12);
    CHECK((two.positions[1] - volume.voxel_center(1, 2, 3)).norm() < 1e-12);
}

TEST_CASE("variance filter gates extraction and can be disabled") {
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    const std::size_t idx = volume.linear_index(2, 2, 2);
    volume.d[idx] = 0.0f;
    volume.w[idx] = 10.0f;
    volume.m2[idx] = float(10.0 * (cfg.variance_cap * 2.0));  // variance = 2x the cap

    CHECK(extract_static_points(volume, cfg).empty());

    cfg.variance_filter_enabled = false;
    CHECK(extract_static_points(volume, cfg).size() == 1);

    // Weight below the minimum is rejected regardless.
    volume.m2[idx] = 0.0f;
    volume.w[idx] = 2.0f;
    cfg.variance_filter_enabled = true;
    CHECK(extract_static_points(volume, cfg).empty());
}

TEST_CASE("volume checkpoint round trip is exact") {
    TempDir dir;
    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    Rng rng(99);
    for (int i = 0; i < 5; ++i)
        integrate_frame(volume, plane_frame(float(rng.uniform(0.9, 1.5)), i), cfg);

    save_volume(dir / "v.tsdf", volume);
    const TsdfVolume back = load_volume(dir / "v.tsdf");
    CHECK(back.origin == volume.origin);
    CHECK(back.voxel_size == volume.voxel_size);
    CHECK(back.dims == volume.dims);
    CHECK(back.truncation == volume.truncation);
    CHECK(back.d == volume.d);
    CHECK(back.w == volume.w);
    CHECK(back.m2 == volume.m2);
    CHECK(back.color == volume.color);

    // Saving twice produces identical bytes.
    save_volume(dir / "v2.tsdf", volume);
    std::ifstream f1(dir / "v.tsdf", std::ios::binary);
    std::ifstream f2(dir / "v2.tsdf", std::ios::binary);
    const std::string b1((std::istreambuf_iterator<char>(f1)), {});
    const std::string b2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(b1 == b2);
}

TEST_CASE("volume checkpoint rejects corrupt files") {
    TempDir dir;
    {
        std::ofstream out(dir / "bad.tsdf", std::ios::binary);
        out << "JUNKJUNKJUNK";
    }
    CHECK_THROWS_AS(load_volume(dir / "bad.tsdf"), ValidationError);

    FusionConfig cfg;
    TsdfVolume volume = fresh_volume(cfg);
    save_volume(dir / "v.tsdf", volume);
    // Truncate the file mid-array.
    const auto full = std::filesystem::file_size(dir / "v.tsdf");
    std::filesystem::resize_file(dir / "v.tsdf", full / 2);
    CHECK_THROWS_AS(load_volume(dir / "v.tsdf"), ValidationError);

    CHECK_THROWS_AS(load_volume(dir / "missing.tsdf"), ValidationError);
}
