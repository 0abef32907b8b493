#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "helpers.hpp"
#include "vwm/core/error.hpp"
#include "vwm/core/frame_io.hpp"
#include "vwm/core/geometry.hpp"
#include "vwm/core/image_io.hpp"
#include "vwm/core/json_io.hpp"
#include "vwm/core/ply_io.hpp"
#include "vwm/core/rng.hpp"

using namespace vwm;
using vwm_test::TempDir;

namespace {

CameraIntrinsics square_intrinsics() {
    CameraIntrinsics intr;
    intr.fx = intr.fy = 100.0;
    intr.cx = intr.cy = 50.0;
    intr.width = intr.height = 100;
    return intr;
}

Mat3 rotation_zyx(double a, double b, double c) {
    Mat3 rz, ry, rx;
    rz << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
    rx << 1, 0, 0, 0, std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c);
    return rz * ry * rx;
}

}  // namespace

TEST_CASE("projection maps pinhole coordinates") {
    const CameraIntrinsics intr = square_intrinsics();

    const auto p = project(Vec3(0.25, -0.25, 1.0), intr);
    REQUIRE(p.has_value());
    CHECK(p->u == doctest::Approx(75.0).epsilon(1e-12));
    CHECK(p->v == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(p->z == doctest::Approx(1.0).epsilon(1e-12));

    // u = 100 falls outside [0, 100).
    CHECK_FALSE(project(Vec3(0.5, 0.0, 1.0), intr).has_value());
    // Behind the camera.
    CHECK_FALSE(project(Vec3(0.0, 0.0, -1.0), intr).has_value());
    CHECK_FALSE(project(Vec3(0.0, 0.0, 0.0), intr).has_value());
}

TEST_CASE("backprojection inverts projection") {
    const CameraIntrinsics intr = square_intrinsics();

    const Vec3 p = backproject(75.0, 25.0, 1.0, intr);
    CHECK((p - Vec3(0.25, -0.25, 1.0)).norm() < 1e-12);
    const Vec3 axis = backproject(50.0, 50.0, 2.0, intr);
    CHECK((axis - Vec3(0.0, 0.0, 2.0)).norm() < 1e-12);

    CHECK_THROWS_AS(backproject(10.0, 10.0, 0.0, intr), ValidationError);
    CHECK_THROWS_AS(backproject(10.0, 10.0, -1.0, intr), ValidationError);
}

TEST_CASE("projection round trip over random pixels stays within 1e-9") {
    const CameraIntrinsics intr = square_intrinsics();
    Rng rng(42);
    double max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(0.0, 99.999);
        const double v = rng.uniform(0.0, 99.999);
        const double z = rng.uniform(0.1, 50.0);
        const auto back = project(backproject(u, v, z, intr), intr);
        REQUIRE(back.has_value());
        max_err = std::max({max_err, std::abs(back->u - u) / std::max(1.0, u),
                            std::abs(back->v - v) / std::max(1.0, v),
                            std::abs(back->z - z) / z});
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("pose transforms apply the rigid model") {
    CameraPose identity;
    const Vec3 p(0.3, -1.2, 2.0);
    CHECK((transform(identity, p, TransformDirection::kCamToWorld) - p).norm() == 0.0);

    CameraPose shift;
    shift.translation = Vec3(1.0, 2.0, 3.0);
    CHECK((transform(shift, Vec3::Zero(), TransformDirection::kCamToWorld) - Vec3(1, 2, 3))
              .norm() == 0.0);
}

TEST_CASE("pose transforms are mutual inverses and preserve distances") {
    Rng rng(7);
    double max_err = 0.0, max_dist_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
        CameraPose pose(rotation_zyx(rng.uniform(0, 6.28), rng.uniform(0, 6.28),
                                     rng.uniform(0, 6.28)),
                        Vec3(rng.normal(), rng.normal(), rng.normal()));
        const Vec3 a(rng.normal(0, 5), rng.normal(0, 5), rng.normal(0, 5));
        const Vec3 b(rng.normal(0, 5), rng.normal(0, 5), rng.normal(0, 5));
        const Vec3 round =
            transform(pose, transform(pose, a, TransformDirection::kCamToWorld),
                      TransformDirection::kWorldToCam);
        max_err = std::max(max_err, (round - a).norm() / std::max(1.0, a.norm()));

        const double d_before = (a - b).norm();
        const double d_after = (transform(pose, a, TransformDirection::kCamToWorld) -
                                transform(pose, b, TransformDirection::kCamToWorld))
                                   .norm();
        max_dist_err =
            std::max(max_dist_err, std::abs(d_after - d_before) / std::max(1.0, d_before));
    }
    CHECK(max_err < 1e-9);
    CHECK(max_dist_err < 1e-9);
}

TEST_CASE("pixel rounding is half-up") {
    CHECK(round_pixel(0.5) == 1);
    CHECK(round_pixel(-0.5) == 0);
    CHECK(round_pixel(0.49) == 0);
    CHECK(round_pixel(1.5) == 2);
    CHECK(nearest_pixel(99.6, 100) == 99);  // rounds to 100, clamped to the last pixel
    CHECK(nearest_pixel(-0.4, 100) == 0);
}

TEST_CASE("ppm round trip is exact on the 8-bit lattice") {
    TempDir dir;
    Image img(7, 5);
    Rng rng(3);
    for (float& v : img.pixels) v = float(int(rng.uniform(0.0, 256.0)) % 256) / 255.0f;

    write_ppm(dir / "a.ppm", img);
    const Image back = read_ppm(dir / "a.ppm");
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    CHECK(back.pixels == img.pixels);
}

TEST_CASE("ppm quantization error stays within half a step") {
    TempDir dir;
    Rng rng(5);
    const Image img = vwm_test::random_image(rng, 9, 6);
    write_ppm(dir / "q.ppm", img);
    const Image back = read_ppm(dir / "q.ppm");
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(std::abs(back.pixels[i] - img.pixels[i]) <= 0.5f / 255.0f + 1e-6f);
}

TEST_CASE("ppm rejects malformed input") {
    TempDir dir;
    {
        std::ofstream out(dir / "bad_magic.ppm", std::ios::binary);
        out << "P5\n2 2\n255\n" << std::string(12, '\0');
    }
    CHECK_THROWS_AS(read_ppm(dir / "bad_magic.ppm"), ValidationError);
    {
        std::ofstream out(dir / "truncated.ppm", std::ios::binary);
        out << "P6\n4 4\n255\nabc";
    }
    CHECK_THROWS_AS(read_ppm(dir / "truncated.ppm"), ValidationError);
    {
        std::ofstream out(dir / "bad_dim.ppm", std::ios::binary);
        out << "P6\n-3 2\n255\n";
    }
    CHECK_THROWS_AS(read_ppm(dir / "bad_dim.ppm"), ValidationError);
    CHECK_THROWS_AS(read_ppm(dir / "missing.ppm"), ValidationError);
}

TEST_CASE("mask ppm round trip") {
    TempDir dir;
    const int w = 6, h = 4;
    std::vector<std::uint8_t> mask(std::size_t(w) * h, 0);
    for (std::size_t i = 0; i < mask.size(); i += 3) mask[i] = 1;

    write_mask_ppm(dir / "m.ppm", mask, w, h);
    int rw = 0, rh = 0;
    const auto back = read_mask_ppm(dir / "m.ppm", &rw, &rh);
    CHECK(rw == w);
    CHECK(rh == h);
    CHECK(back == mask);
}

TEST_CASE("pfm round trip preserves floats exactly") {
    TempDir dir;
    DepthMap depth(5, 4);
    Rng rng(11);
    for (float& d : depth.depths) d = rng.uniform() < 0.2 ? 0.0f : float(rng.uniform(0.01, 90.0));

    write_pfm(dir / "d.pfm", depth);
    const DepthMap back = read_pfm(dir / "d.pfm");
    REQUIRE(back.width == depth.width);
    REQUIRE(back.height == depth.height);
    CHECK(back.depths == depth.depths);
}

TEST_CASE("pfm rejects malformed input") {
    TempDir dir;
    {
        std::ofstream out(dir / "bad.pfm", std::ios::binary);
        out << "PF\n2 2\n-1.0\n" << std::string(32, '\0');  // color PFM unsupported
    }
    CHECK_THROWS_AS(read_pfm(dir / "bad.pfm"), ValidationError);
    {
        std::ofstream out(dir / "short.pfm", std::ios::binary);
        out << "Pf\n4 4\n-1.0\nxy";
    }
    CHECK_THROWS_AS(read_pfm(dir / "short.pfm"), ValidationError);
}

TEST_CASE("ply round trip: empty and single point") {
    TempDir dir;

    PointCloud empty;
    write_ply(dir / "empty.ply", empty);
    CHECK(read_ply(dir / "empty.ply").empty());

    PointCloud one;
    one.push_back(Vec3(1.0, 2.0, 3.0), Vec3(1.0, 0.0, 0.0), 5.0f);
    write_ply(dir / "one.ply", one);
    const PointCloud back = read_ply(dir / "one.ply");
    REQUIRE(back.size() == 1);
    CHECK(back.positions[0].x() == 1.0);
    CHECK(back.positions[0].y() == 2.0);
    CHECK(back.positions[0].z() == 3.0);
    CHECK(back.colors[0] == Vec3(1.0, 0.0, 0.0));
    CHECK(back.confidences[0] == 5.0f);
}

TEST_CASE("ply round trip: 10k random points at storage precision") {
    TempDir dir;
    Rng rng(19);
    PointCloud cloud;
    for (int i = 0; i < 10000; ++i) {
        // Colors on the 8-bit lattice so quantization is lossless.
        const Vec3 color(double(i % 256) / 255.0, double((i * 7) % 256) / 255.0,
                         double((i * 13) % 256) / 255.0);
        cloud.push_back(Vec3(rng.normal(0, 10), rng.normal(0, 10), rng.normal(0, 10)), color,
                        float(rng.uniform(0.0, 100.0)));
    }
    write_ply(dir / "cloud.ply", cloud);
    const PointCloud back = read_ply(dir / "cloud.ply");
    REQUIRE(back.size() == cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        // Positions pass through float32.
        CHECK(float(back.positions[i].x()) == float(cloud.positions[i].x()));
        CHECK(float(back.positions[i].y()) == float(cloud.positions[i].y()));
        CHECK(float(back.positions[i].z()) == float(cloud.positions[i].z()));
        // Colors come back as float(k)/255.0f — exact at float precision.
        CHECK(float(back.colors[i].x()) == float(cloud.colors[i].x()));
        CHECK(float(back.colors[i].y()) == float(cloud.colors[i].y()));
        CHECK(float(back.colors[i].z()) == float(cloud.colors[i].z()));
        CHECK(back.confidences[i] == cloud.confidences[i]);
    }
}

TEST_CASE("ply rejects malformed input") {
    TempDir dir;
    {
        std::ofstream out(dir / "bad.ply", std::ios::binary);
        out << "solid nope\n";
    }
    CHECK_THROWS_AS(read_ply(dir / "bad.ply"), ValidationError);
    {
        std::ofstream out(dir / "short.ply", std::ios::binary);
        out << "ply\nformat binary_little_endian 1.0\nelement vertex 5\n"
               "property float x\nproperty float y\nproperty float z\n"
               "property uchar red\nproperty uchar green\nproperty uchar blue\n"
               "property float confidence\nend_header\nab";
    }
    CHECK_THROWS_AS(read_ply(dir / "short.ply"), ValidationError);
}

TEST_CASE("trajectory json round trip is exact") {
    TempDir dir;
    TrajectoryParams params;
    params.target = Vec3(0.1, 0.2, 0.3);
    params.radius = 1.7;
    params.height = 0.9;
    const auto poses = make_trajectory(TrajectoryKind::kOrbit, params, 9);

    write_trajectory(dir / "traj.json", poses);
    const auto back = read_trajectory(dir / "traj.json");
    REQUIRE(back.size() == poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        CHECK((back[i].rotation - poses[i].rotation).cwiseAbs().maxCoeff() == 0.0);
        CHECK((back[i].translation - poses[i].translation).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("intrinsics json round trip") {
    TempDir dir;
    const CameraIntrinsics intr = vwm_test::test_intrinsics(160, 120);
    write_intrinsics(dir / "intr.json", intr);
    const CameraIntrinsics back = read_intrinsics(dir / "intr.json");
    CHECK(back.fx == intr.fx);
    CHECK(back.fy == intr.fy);
    CHECK(back.cx == intr.cx);
    CHECK(back.cy == intr.cy);
    CHECK(back.width == intr.width);
    CHECK(back.height == intr.height);
}

TEST_CASE("frame dataset round trip with masks") {
    TempDir dir;
    const CameraIntrinsics intr = vwm_test::test_intrinsics(8, 6);
    FrameDataset dataset;
    dataset.intrinsics = intr;
    Rng rng(23);
    for (int t = 0; t < 3; ++t) {
        Frame frame = vwm_test::make_frame(
            vwm_test::pose_at(Vec3(0, 0, -0.1 * t)), intr,
            [&rng](int, int) { return float(rng.uniform(0.5, 3.0)); },
            [t](int x, int y) {
                return Vec3(double((x * 37 + t) % 256) / 255.0, double((y * 53) % 256) / 255.0,
                            double(((x + y) * 11 + t) % 256) / 255.0);
            },
            t);
        dataset.frames.push_back(frame);
        std::vector<std::uint8_t> mask(std::size_t(intr.width) * intr.height, 1);
        mask[std::size_t(t)] = 0;
        dataset.static_masks.push_back(mask);
    }

    write_frame_dataset(dir.path(), dataset);
    const FrameDataset back = read_frame_dataset(dir.path());
    REQUIRE(back.frames.size() == 3);
    REQUIRE(back.has_masks());
    for (int t = 0; t < 3; ++t) {
        const Frame& a = dataset.frames[std::size_t(t)];
        const Frame& b = back.frames[std::size_t(t)];
        CHECK(b.index == a.index);
        CHECK(b.image.pixels == a.image.pixels);  // pixels already on the lattice
        CHECK(b.depth.depths == a.depth.depths);
        CHECK((b.pose.translation - a.pose.translation).cwiseAbs().maxCoeff() == 0.0);
        CHECK(back.static_masks[std::size_t(t)] == dataset.static_masks[std::size_t(t)]);
    }
}
