// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

namespace semimesh {
namespace {

using testing::random_occupancy;

OccupancyGrid analytic_ball(int r, double radius) {
    // Signed-distance ramp clamped to [0,1], 0.5 exactly on the sphere.
    OccupancyGrid g(r);
    const double width = g.cell_width();
    for (int z = 0; z < r; ++z)
        for (int y = 0; y < r; ++y)
            for (int x = 0; x < r; ++x) {
                const double d = radius - g.cell_center(x, y, z).norm();
                g.at(x, y, z) = std::clamp(0.5 + d / width, 0.0, 1.0);
            }
    return g;
}

TEST(ExtractMesh, EmptyFieldThrows) {
    EXPECT_THROW(extract_mesh(OccupancyGrid(8), 0.5), EmptyMeshError);
    EXPECT_THROW(extract_mesh(OccupancyGrid(8, 0.3), 0.5), EmptyMeshError);
}

TEST(ExtractMesh, RejectsIsoOutsideUnitInterval) {
    const auto g = analytic_ball(8, 0.5);
    EXPECT_THROW(extract_mesh(g, 0.0), InvalidArgument);
    EXPECT_THROW(extract_mesh(g, 1.0), InvalidArgument);
    EXPECT_THROW(extract_mesh(g, 1.5), InvalidArgument);
}

TEST(ExtractMesh, SphereVerticesNearAnalyticSurface) {
    const auto mesh = extract_mesh(analytic_ball(32, 0.6), 0.5);
    EXPECT_TRUE(is_watertight(mesh));
    EXPECT_EQ(euler_characteristic(mesh), 2);
    for (const auto& v : mesh.vertices) EXPECT_LE(std::abs(v.norm() - 0.6), 2.0 * 2.0 / 32.0);
    for (const auto& c : mesh.colors) EXPECT_EQ(c, Vec3::Constant(kFallbackGray));
}

TEST(ExtractMesh, SingleCellHasSphereTopology) {
    OccupancyGrid g(6);
    g.at(2, 3, 2) = 1.0;
    const auto mesh = extract_mesh(g, 0.5);
    EXPECT_TRUE(is_watertight(mesh));
    EXPECT_EQ(euler_characteristic(mesh), 2);
    EXPECT_GT(signed_volume(mesh), 0.0);
}

TEST(ExtractMesh, BoundaryCellIsClosedByPadding) {
    OccupancyGrid g(4);
    g.at(0, 0, 0) = 1.0;
    const auto mesh = extract_mesh(g, 0.5);
    EXPECT_TRUE(is_watertight(mesh));
    EXPECT_EQ(euler_characteristic(mesh), 2);
}

TEST(ExtractMesh, RandomFieldsAreWatertightAndOutward) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = random_occupancy(6, seed);
        const auto mesh = extract_mesh(g, 0.5);
        EXPECT_TRUE(is_watertight(mesh)) << seed;
        EXPECT_NO_THROW(mesh.validate());
        EXPECT_GT(signed_volume(mesh), 0.0) << seed;
    }
}

TEST(ExtractMesh, VerticesInterpolateCrossingEdges) {
    // Every vertex lies on a lattice edge (two coordinates on cell centers, or padding
    // centers just outside) and the linearly interpolated field there equals iso.
    const auto g = random_occupancy(5, 3);
    const double iso = 0.4;
    const auto mesh = extract_mesh(g, iso);
    const int r = g.resolution();
    const double w = g.cell_width();
    auto value = [&](int x, int y, int z) {
        if (x < 0 || y < 0 || z < 0 || x >= r || y >= r || z >= r) return 0.0;
        return g.at(x, y, z);
    };
    for (const auto& v : mesh.vertices) {
        Vec3 t;
        int on_lattice = 0, free_axis = -1;
        for (int k = 0; k < 3; ++k) {
            t[k] = (v[k] + 1.0) / w - 0.5;
            if (std::abs(t[k] - std::round(t[k])) < 1e-9)
                ++on_lattice;
            else
                free_axis = k;
        }
        ASSERT_GE(on_lattice, 2);
        if (on_lattice == 3) continue;  // vertex at a lattice point: field equals iso there
        std::array<int, 3> lo{};
        for (int k = 0; k < 3; ++k) lo[k] = static_cast<int>(k == free_axis ? std::floor(t[k]) : std::round(t[k]));
        auto hi = lo;
        hi[free_axis] += 1;
        const double s = t[free_axis] - lo[free_axis];
        const double f = (1 - s) * value(lo[0], lo[1], lo[2]) + s * value(hi[0], hi[1], hi[2]);
        EXPECT_NEAR(f, iso, 1e-6);
    }
}

TEST(ExtractMesh, RaisingIsoNeverGrowsVolume) {
    const auto g = random_occupancy(6, 9);
    double previous = std::numeric_limits<double>::infinity();
    for (double iso : {0.2, 0.35, 0.5, 0.65, 0.8}) {
        const auto mesh = extract_mesh(g, iso);
        const auto vox = voxelize(mesh, 64);
        double count = 0.0;
        for (double v : vox.values()) count += v;
        EXPECT_LE(count, previous) << iso;
        previous = count;
    }
}

TEST(Visibility, FrontTriangleFullyVisible) {
    Camera cam;
    const auto m = testing::single_triangle(Vec3(0.3, -0.3, -0.3), Vec3(0.3, 0.3, -0.3), Vec3(0.3, 0.0, 0.3));
    const auto vis = vertex_visibility(m, cam);
    EXPECT_EQ(vis, (std::vector<std::uint8_t>{1, 1, 1}));
}

TEST(Visibility, OccludedTriangleIsHidden) {
    Camera cam;
    auto m = testing::single_triangle(Vec3(0.3, -0.5, -0.5), Vec3(0.3, 0.5, -0.5), Vec3(0.3, 0.0, 0.5));
    testing::append_mesh(m, testing::single_triangle(Vec3(-0.3, -0.2, -0.2), Vec3(-0.3, 0.2, -0.2), Vec3(-0.3, 0.0, 0.2)));
    const auto vis = vertex_visibility(m, cam);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(vis[i], 1);
    for (int i = 3; i < 6; ++i) EXPECT_EQ(vis[i], 0) << i;
}

TEST(Visibility, OutOfFrameVertexIsInvisible) {
    Camera cam;
    const auto m = testing::single_triangle(Vec3(0.3, -0.3, -0.3), Vec3(0.3, 0.3, -0.3), Vec3(0.3, 0.0, 5.0));
    const auto vis = vertex_visibility(m, cam);
    EXPECT_EQ(vis[2], 0);
}

TEST(Visibility, SphereShowsAboutHalfItsVertices) {
    // A small sphere keeps the visible cap close to a hemisphere under perspective.
    ShapeParams p;
    p.radius = 0.3;
    p.subdivisions = 4;
    const auto sphere = make_shape(ShapeKind::sphere, p);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> az(0.0, 6.283), el(-1.2, 1.2);
    for (int i = 0; i < 10; ++i) {
        Camera cam;
        cam.azimuth = az(rng);
        cam.elevation = el(rng);
        cam.width = cam.height = 128;
        const auto vis = vertex_visibility(sphere, cam);
        double frac = 0.0;
        for (auto v : vis) frac += v;
        frac /= static_cast<double>(vis.size());
        EXPECT_GE(frac, 0.4);
        EXPECT_LE(frac, 0.6);
    }
}

TEST(Visibility, LargeSphereCapFollowsPerspective) {
    // A cap of fraction (1 - r / rho) / 2 is in view; limb vertices within tolerance add a little.
    ShapeParams p;
    p.radius = 0.6;
    const auto sphere = make_shape(ShapeKind::sphere, p);
    Camera cam;
    cam.width = cam.height = 128;
    cam.azimuth = 1.0;
    cam.elevation = 0.3;
    const auto vis = vertex_visibility(sphere, cam);
    double frac = 0.0;
    for (auto v : vis) frac += v;
    frac /= static_cast<double>(vis.size());
    const double cap = 0.5 * (1.0 - p.radius / cam.distance);
    EXPECT_GE(frac, cap - 0.02);
    EXPECT_LE(frac, cap + 0.07);
}

TexturedMesh mirrored_pair() {
    // Faces the camera at azimuth pi/2 (on +z); the two halves land on opposite image sides.
    TexturedMesh m = testing::single_triangle(Vec3(0.3, -0.2, 0.1), Vec3(0.6, -0.2, 0.1), Vec3(0.45, 0.2, 0.1));
    testing::append_mesh(m, testing::single_triangle(Vec3(-0.3, -0.2, 0.1), Vec3(-0.6, -0.2, 0.1), Vec3(-0.45, 0.2, 0.1)));
    return m;
}

TEST(SymmetricPartners, NearestMirroredVertex) {
    const auto partners = symmetric_partners(mirrored_pair());
    EXPECT_EQ(partners, (std::vector<int>{3, 4, 5, 0, 1, 2}));
}

Camera side_camera() {
    Camera cam;
    cam.azimuth = std::numbers::pi / 2;
    return cam;
}

TEST(SampleTextures, SingleVisibleSource) {
    const Camera cam = side_camera();
    const auto m = mirrored_pair();
    const Image img(cam.width, cam.height, 0.8);
    const std::vector<std::uint8_t> vis{1, 1, 1, 0, 0, 0};
    const auto t = sample_textures(m, img, cam, vis);
    for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 3; ++c) EXPECT_NEAR(t[i][c], 0.8 / (1.0 + kTextureFusionEpsilon), 1e-12);
}

TEST(SampleTextures, BothVisibleAverage) {
    const Camera cam = side_camera();
    const auto m = mirrored_pair();
    Image img(cam.width, cam.height);
    // Left half 0.2, right half 0.6; each triangle projects into one half.
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) img.set_pixel(x, y, Vec3::Constant(x < cam.width / 2 ? 0.2 : 0.6));
    const std::vector<std::uint8_t> vis(6, 1);
    const auto t = sample_textures(m, img, cam, vis);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(t[i][0], (0.2 + 0.6) / (2.0 + kTextureFusionEpsilon), 1e-12);
}

TEST(SampleTextures, NeitherVisibleFallsBackToGray) {
    Camera cam;
    const auto m = mirrored_pair();
    const Image img(cam.width, cam.height, 0.9);
    const std::vector<std::uint8_t> vis(6, 0);
    for (const auto& c : sample_textures(m, img, cam, vis)) EXPECT_EQ(c, Vec3::Constant(kFallbackGray));
}

TEST(SampleTextures, SymmetricSceneGivesSymmetricColors) {
    // Camera on the symmetry plane looking along -z sees a mirror-symmetric image.
    ShapeParams p;
    p.subdivisions = 3;
    const auto sphere = make_shape(ShapeKind::sphere, p);
    Camera cam;
    cam.azimuth = std::numbers::pi / 2;
    cam.elevation = 0.3;
    Image img(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) {
            const double mx = std::min(x, cam.width - 1 - x);
            img.set_pixel(x, y, Vec3(mx / cam.width, static_cast<double>(y) / cam.height, 0.5));
        }
    const auto textured = texture_from_view(sphere, img, cam);
    const auto partners = symmetric_partners(textured);
    for (std::size_t i = 0; i < textured.vertices.size(); ++i) {
        ASSERT_LT((textured.vertices[partners[i]] - Vec3(-textured.vertices[i].x(), textured.vertices[i].y(),
                                                         textured.vertices[i].z()))
                      .norm(),
                  1e-9);
        EXPECT_LE((textured.colors[i] - textured.colors[partners[i]]).cwiseAbs().maxCoeff(), 1e-5) << i;
    }
}

TEST(SampleTextures, ColorsStayInUnitRange) {
    const auto mesh = extract_mesh(random_occupancy(6, 4), 0.5);
    Camera cam;
    cam.azimuth = 0.7;
    const auto img = testing::random_image(cam.width, cam.height, 5, 0.0, 1.0);
    const auto textured = texture_from_view(mesh, img, cam);
    ASSERT_EQ(textured.visibility.size(), mesh.vertices.size());
    for (const auto& c : textured.colors) {
        EXPECT_GE(c.minCoeff(), 0.0);
        EXPECT_LE(c.maxCoeff(), 1.0);
    }
}

}  // namespace
}  // namespace semimesh
