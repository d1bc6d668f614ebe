// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "test_support.hpp"

namespace semimesh {
namespace {

using testing::boundary_band;
using testing::raster_objective;
using testing::relative_error;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

using testing::small_camera;
using testing::three_triangles;

TEST(FaceCoverage, HalfOnTheEdge) {
    const Triangle2 t{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    EXPECT_DOUBLE_EQ(face_coverage(t, Vec2(0.5, 0.0), 1e-4), 0.5);
    EXPECT_DOUBLE_EQ(face_coverage(t, Vec2(0.5, 0.5), 1e-4), 0.5);
}

TEST(FaceCoverage, FarOutsideVanishes) {
    const Triangle2 t{Vec2(0, 0), Vec2(0.2, 0), Vec2(0, 0.2)};
    EXPECT_LT(face_coverage(t, Vec2(0.5, 0.5), 1e-4), 1e-3);
    EXPECT_LT(face_coverage(t, Vec2(-0.05, -0.05), 1e-4), 1e-3);
}

TEST(FaceCoverage, EquilateralCentroidHandValue) {
    // Side 0.2 of the image width is 0.4 in normalized units; the centroid sits at the
    // inradius side / (2 sqrt 3) from every edge.
    const double side = 0.4, h = side * std::sqrt(3.0) / 2.0;
    const Triangle2 t{Vec2(-side / 2, -h / 3), Vec2(side / 2, -h / 3), Vec2(0, 2 * h / 3)};
    const double inradius = side / (2.0 * std::sqrt(3.0));
    for (double sigma : {1e-4, 1e-2, 0.05}) {
        EXPECT_NEAR(face_coverage(t, Vec2(0, 0), sigma), sigmoid(inradius * inradius / sigma), 1e-14) << sigma;
    }
}

TEST(FaceCoverage, OutsideUsesNegativeDistance) {
    const Triangle2 t{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    EXPECT_NEAR(face_coverage(t, Vec2(0.3, -0.1), 0.01), sigmoid(-0.01 / 0.01), 1e-14);
    EXPECT_NEAR(face_coverage(t, Vec2(-0.1, -0.1), 0.01), sigmoid(-0.02 / 0.01), 1e-14);
}

TEST(FaceCoverage, DegenerateTriangleHasNoInterior) {
    const Triangle2 t{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)};
    for (double x : {-0.5, 0.0, 0.5, 1.5})
        for (double y : {-0.1, 0.0, 0.1}) EXPECT_LE(face_coverage(t, Vec2(x, y), 1e-3), 0.5);
}

TEST(Rasterize, EmptySceneIsBackground) {
    TexturedMesh empty;
    SoftRasterConfig cfg;
    cfg.background = Vec3(0.1, 0.2, 0.3);
    const auto cam = small_camera(8);
    const auto out = rasterize(empty, cam, cfg);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            EXPECT_EQ(out.image.pixel(x, y), cfg.background);
            EXPECT_EQ(out.mask.at(x, y), 0.0);
        }
}

TEST(Rasterize, LargeTriangleHardLimit) {
    const Vec3 c(0.2, 0.7, 0.4);
    const auto m = testing::single_triangle(Vec3(0, -0.6, -0.6), Vec3(0, -0.6, 0.6), Vec3(0, 0.5, 0.0), c);
    SoftRasterConfig cfg;
    cfg.sigma = 1e-6;
    Camera cam;
    const auto out = rasterize(m, cam, cfg);
    const auto band = boundary_band(m, cam, 1e-3, 1.0);
    const auto db = rasterize_depth(m, cam);
    int inside = 0, outside = 0;
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            if (band.at(x, y) > 0) continue;
            if (db.face_at(x, y) == 0) {
                ++inside;
                EXPECT_NEAR(out.mask.at(x, y), 1.0, 1e-9);
                EXPECT_LT((out.image.pixel(x, y) - c).norm(), 1e-9);
            } else {
                ++outside;
                EXPECT_LT(out.mask.at(x, y), 1e-9);
                EXPECT_LT(out.image.pixel(x, y).norm(), 1e-9);
            }
        }
    EXPECT_GT(inside, 500);
    EXPECT_GT(outside, 500);
}

TEST(Rasterize, NearRedOccludesFarBlue) {
    auto m = testing::single_triangle(Vec3(0.3, -0.4, -0.4), Vec3(0.3, -0.4, 0.4), Vec3(0.3, 0.4, 0.0), Vec3(1, 0, 0));
    testing::append_mesh(m, testing::single_triangle(Vec3(-0.3, -0.5, -0.5), Vec3(-0.3, -0.5, 0.5), Vec3(-0.3, 0.5, 0.0),
                                                     Vec3(0, 0, 1)));
    Camera cam;
    for (double gamma : {1e-3, 1e-4}) {
        SoftRasterConfig cfg;
        cfg.gamma = gamma;
        const auto out = rasterize(m, cam, cfg);
        const auto center = out.image.pixel(cam.width / 2, cam.height / 2);
        EXPECT_NEAR(center.x(), 1.0, 1e-9) << gamma;
        EXPECT_NEAR(center.z(), 0.0, 1e-9) << gamma;
    }
    // Reversed order: the red face still wins.
    std::swap(m.faces[0], m.faces[1]);
    const auto out = rasterize(m, cam, SoftRasterConfig{});
    EXPECT_NEAR(out.image.at(cam.width / 2, cam.height / 2, 0), 1.0, 1e-9);
}

TEST(Rasterize, OutputsInUnitRange) {
    const auto m = three_triangles();
    for (double sigma : {1e-2, 1e-4, 1e-6}) {
        SoftRasterConfig cfg;
        cfg.sigma = sigma;
        cfg.background = Vec3(1, 1, 1);
        const auto out = rasterize(m, small_camera(), cfg);
        for (double v : out.image.values()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0 + 1e-15);
        }
        for (double v : out.mask.values()) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
        }
    }
}

TEST(Rasterize, MaskMonotoneInFaceCount) {
    const auto full = three_triangles();
    SoftRasterConfig cfg;
    cfg.sigma = 1e-3;
    const auto cam = small_camera();
    Mask previous(cam.width, cam.height);
    for (std::size_t n = 1; n <= full.faces.size(); ++n) {
        auto m = full;
        m.faces.resize(n);
        const auto out = rasterize(m, cam, cfg);
        for (std::size_t i = 0; i < previous.values().size(); ++i)
            EXPECT_GE(out.mask.values()[i], previous.values()[i]);
        previous = out.mask;
    }
}

TEST(Rasterize, InvariantToFaceOrder) {
    const auto sphere = make_shape(ShapeKind::sphere, ShapeParams{});
    const auto cam = small_camera();
    SoftRasterConfig cfg;
    cfg.sigma = 1e-3;
    cfg.gamma = 1e-2;
    const auto a = rasterize(sphere, cam, cfg);
    auto shuffled = sphere;
    std::mt19937_64 rng(4);
    std::shuffle(shuffled.faces.begin(), shuffled.faces.end(), rng);
    const auto b = rasterize(shuffled, cam, cfg);
    for (std::size_t i = 0; i < a.image.values().size(); ++i)
        EXPECT_NEAR(a.image.values()[i], b.image.values()[i], 1e-12);
    for (std::size_t i = 0; i < a.mask.values().size(); ++i) EXPECT_NEAR(a.mask.values()[i], b.mask.values()[i], 1e-12);
}

TEST(Rasterize, ConvergesToHardZBuffer) {
    const auto cube = make_shape(ShapeKind::box, ShapeParams{});
    auto colored = cube;
    // Per-face constant colors need unshared vertices: duplicate them face by face.
    TexturedMesh split;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (const auto& f : colored.faces) {
        const Vec3 c(u(rng), u(rng), u(rng));
        testing::append_mesh(split, testing::single_triangle(colored.vertices[f[0]], colored.vertices[f[1]],
                                                             colored.vertices[f[2]], c));
    }
    Camera cam;
    cam.azimuth = 0.6;
    cam.elevation = 0.4;
    cam.distance = 3.5;
    SoftRasterConfig cfg;
    cfg.sigma = 1e-8;
    cfg.gamma = 1e-8;
    const auto out = rasterize(split, cam, cfg);
    const auto db = rasterize_depth(split, cam);
    int compared = 0;
    for (int y = 1; y + 1 < cam.height; ++y)
        for (int x = 1; x + 1 < cam.width; ++x) {
            // Skip pixels within one pixel of a change of front face.
            bool edge = false;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) edge = edge || db.face_at(x + dx, y + dy) != db.face_at(x, y);
            if (edge) continue;
            ++compared;
            const int f = db.face_at(x, y);
            if (f < 0) {
                EXPECT_LT(out.mask.at(x, y), 1e-6);
            } else {
                EXPECT_GT(out.mask.at(x, y), 1.0 - 1e-6);
                EXPECT_LT((out.image.pixel(x, y) - split.colors[split.faces[f][0]]).norm(), 1e-6) << x << "," << y;
            }
        }
    EXPECT_GT(compared, 1000);
}

TEST(RasterizeBackward, ZeroCotangentsGiveZeroGradients) {
    const auto m = three_triangles();
    const auto cam = small_camera();
    const auto g = rasterize_backward(m, cam, SoftRasterConfig{}, Image(32, 32), Mask(32, 32));
    for (const auto& v : g.d_vertices) EXPECT_TRUE(v.isZero(0.0));
    for (const auto& v : g.d_colors) EXPECT_TRUE(v.isZero(0.0));
    EXPECT_EQ(g.d_azimuth, 0.0);
    EXPECT_EQ(g.d_elevation, 0.0);
}

TEST(RasterizeBackward, RejectsMismatchedCotangents) {
    EXPECT_THROW(rasterize_backward(three_triangles(), small_camera(), SoftRasterConfig{}, Image(31, 32), Mask(32, 32)),
                 DimensionMismatch);
}

TEST(RasterizeBackward, GradientPointsTowardBrightTarget) {
    // A target region to the right of the triangle in the image: moving the triangle
    // toward it increases overlap.
    Camera cam;
    cam.width = cam.height = 48;
    const auto m = testing::single_triangle(Vec3(0, -0.2, -0.2), Vec3(0, -0.2, 0.2), Vec3(0, 0.2, 0.0));
    SoftRasterConfig cfg;
    cfg.sigma = 1e-3;
    Mask d_mask(48, 48);
    for (int y = 0; y < 48; ++y)
        for (int x = 30; x < 48; ++x) d_mask.at(x, y) = 1.0;
    const auto g = rasterize_backward(m, cam, cfg, Image(48, 48), d_mask);
    const Vec3 right = cam.basis().right;
    Vec3 total = Vec3::Zero();
    for (const auto& d : g.d_vertices) total += d;
    EXPECT_GT(total.dot(right), 0.0);
    // Finite-difference confirmation along the same direction.
    auto shifted = [&](double t) {
        auto s = m;
        for (auto& v : s.vertices) v += t * right;
        return raster_objective(s, cam, cfg, Image(48, 48), d_mask);
    };
    EXPECT_GT(shifted(1e-3), shifted(-1e-3));
}

void check_vertex_gradients(const SoftRasterConfig& cfg, std::uint64_t seed) {
    auto m = three_triangles();
    const auto cam = small_camera();
    auto d_image = testing::random_image(32, 32, seed);
    auto d_mask = testing::random_mask(32, 32, seed + 1);
    const auto band = boundary_band(m, cam, cfg.sigma);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x)
            if (band.at(x, y) > 0) {
                d_mask.at(x, y) = 0.0;
                for (int c = 0; c < 3; ++c) d_image.at(x, y, c) = 0.0;
            }
    const auto g = rasterize_backward(m, cam, cfg, d_image, d_mask);
    auto objective = [&] { return raster_objective(m, cam, cfg, d_image, d_mask); };
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            const double fd = testing::central_difference(m.vertices[i][k], 1e-6, objective);
            EXPECT_LE(relative_error(g.d_vertices[i][k], fd, 1e-6), 1e-2)
                << "vertex " << i << " axis " << k << ": " << g.d_vertices[i][k] << " vs " << fd;
        }
    for (std::size_t i = 0; i < m.colors.size(); ++i)
        for (int k = 0; k < 3; ++k) {
            // Linear in colors, so a large step carries no truncation error.
            const double fd = testing::central_difference(m.colors[i][k], 1e-2, objective);
            EXPECT_LE(relative_error(g.d_colors[i][k], fd, 1e-6), 1e-4) << "color " << i << " channel " << k;
        }
}

TEST(RasterizeBackward, VertexAndColorGradientsMatchFiniteDifferences) {
    check_vertex_gradients(SoftRasterConfig{}, 11);
}

TEST(RasterizeBackward, SmoothSettingsMatchFiniteDifferences) {
    SoftRasterConfig cfg;
    cfg.sigma = 3e-3;
    cfg.gamma = 3e-2;
    check_vertex_gradients(cfg, 21);
}

TEST(RasterizeBackward, PoseGradientMatchesFiniteDifferences) {
    const auto m = three_triangles();
    auto cam = small_camera();
    SoftRasterConfig cfg;
    cfg.sigma = 3e-3;
    cfg.gamma = 3e-2;
    const auto d_image = testing::random_image(32, 32, 31);
    const auto d_mask = testing::random_mask(32, 32, 32);
    const auto g = rasterize_backward(m, cam, cfg, d_image, d_mask);
    auto objective = [&] { return raster_objective(m, cam, cfg, d_image, d_mask); };
    EXPECT_LE(relative_error(g.d_azimuth, testing::central_difference(cam.azimuth, 1e-6, objective), 1e-6), 1e-3);
    EXPECT_LE(relative_error(g.d_elevation, testing::central_difference(cam.elevation, 1e-6, objective), 1e-6), 1e-3);
}

TEST(RasterizeBackward, DeterministicAcrossCalls) {
    const auto m = three_triangles();
    const auto cam = small_camera();
    const auto d_image = testing::random_image(32, 32, 41);
    const auto d_mask = testing::random_mask(32, 32, 42);
    const auto a = rasterize_backward(m, cam, SoftRasterConfig{}, d_image, d_mask);
    const auto b = rasterize_backward(m, cam, SoftRasterConfig{}, d_image, d_mask);
    EXPECT_EQ(a.d_vertices, b.d_vertices);
    EXPECT_EQ(a.d_colors, b.d_colors);
    EXPECT_EQ(a.d_azimuth, b.d_azimuth);
}

TEST(SoftRasterConfig, RejectsNonPositiveConstants) {
    SoftRasterConfig cfg;
    cfg.sigma = 0.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
    cfg = SoftRasterConfig{};
    cfg.gamma = -1.0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

}  // namespace
}  // namespace semimesh
