// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

namespace semimesh {
namespace {

using testing::random_occupancy;

double brute_iou(const OccupancyGrid& a, double ta, const OccupancyGrid& b, double tb) {
    const int r = a.resolution();
    long inter = 0, uni = 0;
    for (int z = 0; z < r; ++z)
        for (int y = 0; y < r; ++y)
            for (int x = 0; x < r; ++x) {
                const bool pa = a.at(x, y, z) >= ta, pb = b.at(x, y, z) >= tb;
                inter += pa && pb;
                uni += pa || pb;
            }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

FScore brute_fscore(const std::vector<Vec3>& pred, const std::vector<Vec3>& gt, double tau) {
    auto covered = [tau](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
        std::size_t hit = 0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, (p - q).norm());
            hit += best <= tau;
        }
        return static_cast<double>(hit) / static_cast<double>(from.size());
    };
    FScore f;
    f.precision = covered(pred, gt);
    f.recall = covered(gt, pred);
    f.fscore = f.precision + f.recall > 0 ? 2 * f.precision * f.recall / (f.precision + f.recall) : 0.0;
    return f;
}

std::vector<Vec3> random_cloud(std::size_t n, std::uint64_t seed, double spread) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<Vec3> out(n);
    for (auto& p : out) p = Vec3(u(rng), u(rng), u(rng));
    return out;
}

double occupied(const OccupancyGrid& g) {
    double n = 0.0;
    for (double v : g.values()) n += v >= 0.5;
    return n;
}

TEST(Iou3d, IdenticalAndDisjoint) {
    const auto g = random_occupancy(6, 1);
    EXPECT_EQ(iou3d(g, 0.5, g, 0.5), 1.0);
    OccupancyGrid left(4), right(4);
    for (int z = 0; z < 4; ++z)
        for (int y = 0; y < 4; ++y)
            for (int x = 0; x < 4; ++x) (x < 2 ? left : right).at(x, y, z) = 1.0;
    EXPECT_EQ(iou3d(left, 0.5, right, 0.5), 0.0);
    EXPECT_EQ(iou3d(OccupancyGrid(4), 0.5, OccupancyGrid(4), 0.5), 1.0);
}

TEST(Iou3d, MatchesTripleLoopExactly) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> t(0.1, 0.9);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto a = random_occupancy(4, 2 * seed), b = random_occupancy(4, 2 * seed + 1);
        const double ta = t(rng), tb = t(rng);
        EXPECT_EQ(iou3d(a, ta, b, tb), brute_iou(a, ta, b, tb));
        EXPECT_EQ(iou3d(a, ta, b, tb), iou3d(b, tb, a, ta));
    }
}

TEST(Iou3d, ThresholdIsInclusive) {
    OccupancyGrid a(2, 0.5);
    EXPECT_EQ(binarize(a, 0.5), std::vector<std::uint8_t>(8, 1));
    EXPECT_EQ(iou3d(a, 0.5, OccupancyGrid(2, 1.0), 0.5), 1.0);
}

TEST(Iou3d, ResolutionMismatchThrows) {
    EXPECT_THROW(iou3d(OccupancyGrid(4), 0.5, OccupancyGrid(5), 0.5), DimensionMismatch);
}

TEST(SampleSurface, PointsLieInsideSingleTriangle) {
    const Vec3 a(0.1, 0.2, 0.3), b(0.7, -0.1, 0.0), c(-0.2, 0.5, 0.4);
    const auto mesh = testing::single_triangle(a, b, c);
    const Vec3 n = (b - a).cross(c - a);
    for (const auto& p : sample_surface(mesh, 2000, 3)) {
        // Barycentric coordinates from signed sub-triangle areas.
        const double wa = (b - p).cross(c - p).dot(n) / n.squaredNorm();
        const double wb = (c - p).cross(a - p).dot(n) / n.squaredNorm();
        const double wc = 1.0 - wa - wb;
        EXPECT_GE(wa, -1e-12);
        EXPECT_GE(wb, -1e-12);
        EXPECT_GE(wc, -1e-12);
        EXPECT_NEAR((p - a).dot(n), 0.0, 1e-12);
    }
}

TEST(SampleSurface, FacesPickedByArea) {
    // Areas 1 and 3.
    auto mesh = testing::single_triangle(Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0));
    testing::append_mesh(mesh, testing::single_triangle(Vec3(0, 0, 5), Vec3(3, 0, 5), Vec3(0, 2, 5)));
    const std::size_t n = 20000;
    const auto pts = sample_surface(mesh, n, 4);
    ASSERT_EQ(pts.size(), n);
    double first = 0;
    for (const auto& p : pts) first += p.z() < 2.5;
    const double sd = std::sqrt(n * 0.25 * 0.75);
    EXPECT_NEAR(first, n / 4.0, 3 * sd);
}

TEST(SampleSurface, SeededAndDeterministic) {
    const auto mesh = make_shape(ShapeKind::torus, ShapeParams{});
    EXPECT_EQ(sample_surface(mesh, 500, 9), sample_surface(mesh, 500, 9));
    EXPECT_NE(sample_surface(mesh, 500, 9), sample_surface(mesh, 500, 10));
}

TEST(SampleSurface, Errors) {
    EXPECT_THROW(sample_surface(TexturedMesh{}, 10, 1), EmptyMeshError);
    const auto flat = testing::single_triangle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0));
    EXPECT_THROW(sample_surface(flat, 10, 1), Error);
    EXPECT_THROW(sample_surface(make_shape(ShapeKind::sphere), 0, 1), InvalidArgument);
}

TEST(FScore, IdenticalAndFarApart) {
    const auto a = random_cloud(50, 1, 1.0);
    const auto f = fscore(a, a, 0.01);
    EXPECT_EQ(f.precision, 1.0);
    EXPECT_EQ(f.recall, 1.0);
    EXPECT_EQ(f.fscore, 1.0);
    auto b = a;
    for (auto& p : b) p.x() += 30.0;
    const auto g = fscore(a, b, 0.1);
    EXPECT_EQ(g.precision, 0.0);
    EXPECT_EQ(g.recall, 0.0);
    EXPECT_EQ(g.fscore, 0.0);
}

TEST(FScore, OffsetSquareGridsMatchBruteForce) {
    const double tau = 0.05;
    std::vector<Vec3> a, b;
    for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
            a.emplace_back(i / 20.0, j / 20.0, 0.0);
            b.emplace_back(i / 20.0 + 1.5 * tau, j / 20.0, 0.0);
        }
    const auto f = fscore(a, b, tau), o = brute_fscore(a, b, tau);
    EXPECT_NEAR(f.precision, o.precision, 1e-12);
    EXPECT_NEAR(f.recall, o.recall, 1e-12);
    EXPECT_NEAR(f.fscore, o.fscore, 1e-12);
}

TEST(FScore, MatchesAllPairsOracle) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto a = random_cloud(50, 3 * seed, 0.5), b = random_cloud(50, 3 * seed + 1, 0.5);
        const double tau = 0.05 + 0.002 * static_cast<double>(seed);
        const auto f = fscore(a, b, tau), o = brute_fscore(a, b, tau);
        EXPECT_NEAR(f.precision, o.precision, 1e-12);
        EXPECT_NEAR(f.recall, o.recall, 1e-12);
        EXPECT_NEAR(f.fscore, o.fscore, 1e-12);
        // Swapping arguments swaps precision and recall.
        const auto s = fscore(b, a, tau);
        EXPECT_EQ(s.precision, f.recall);
        EXPECT_EQ(s.recall, f.precision);
        EXPECT_DOUBLE_EQ(s.fscore, f.fscore);
    }
}

TEST(FScore, Errors) {
    const std::vector<Vec3> a{Vec3::Zero()};
    EXPECT_THROW(fscore(a, std::vector<Vec3>{}, 0.1), InvalidArgument);
    EXPECT_THROW(fscore(a, a, 0.0), InvalidArgument);
}

TEST(RotateGrid, QuarterTurnsArePermutations) {
    const auto g = random_occupancy(6, 5);
    const auto r = canonical_rotation(std::numbers::pi / 2, 0.0);
    auto once = rotate_grid(g, r);
    auto back = rotate_grid(once, r.transpose());
    EXPECT_EQ(back, g);
    EXPECT_NEAR(occupied(once), occupied(g), 0.0);
}

OccupancyGrid asymmetric_grid() { return voxelize(make_shape(ShapeKind::chair_proxy, ShapeParams{}), 32); }

TEST(AlignSearch, IdentityForEqualGrids) {
    const auto g = asymmetric_grid();
    const std::vector<double> az{0.0, std::numbers::pi / 2}, el{0.0}, th{0.5};
    const auto a = align_search(g, g, az, el, th);
    EXPECT_EQ(a.azimuth, 0.0);
    EXPECT_EQ(a.elevation, 0.0);
    EXPECT_EQ(a.iou, 1.0);
}

TEST(AlignSearch, RecoversQuarterTurn) {
    const auto gt = asymmetric_grid();
    const auto pred = rotate_grid(gt, canonical_rotation(std::numbers::pi / 2, 0.0));
    std::vector<double> az;
    for (int k = 0; k < 4; ++k) az.push_back(k * std::numbers::pi / 2);
    const std::vector<double> el{0.0}, th{0.5};
    const auto a = align_search(pred, gt, az, el, th);
    EXPECT_DOUBLE_EQ(a.azimuth, std::numbers::pi / 2);
    EXPECT_GE(a.iou, 0.99);
    // Never worse than the identity alignment.
    EXPECT_GE(a.iou, iou3d(pred, 0.5, gt, 0.5));
}

TEST(AlignSearch, EmptyPredictionIsDeterministic) {
    const auto gt = asymmetric_grid();
    const std::vector<double> az{0.5, 0.0, 1.0}, el{0.2, 0.0}, th{0.7, 0.3};
    const auto a = align_search(OccupancyGrid(32), gt, az, el, th);
    const auto b = align_search(OccupancyGrid(32), gt, az, el, th);
    EXPECT_EQ(a.iou, 0.0);
    EXPECT_EQ(a.azimuth, 0.0);
    EXPECT_EQ(a.elevation, 0.0);
    EXPECT_EQ(a.threshold, 0.3);
    EXPECT_EQ(a.azimuth, b.azimuth);
    EXPECT_THROW(align_search(gt, gt, std::vector<double>{}, el, th), InvalidArgument);
}

TEST(Voxelize, CubeVolume) {
    ShapeParams p;
    p.half_extent = Vec3(0.5, 0.5, 0.5);
    const auto g = voxelize(make_shape(ShapeKind::box, p), 32);
    // Cell centers at odd multiples of 1/32: |c| < 0.5 for 16 cells per axis.
    EXPECT_NEAR(occupied(g), 0.125 * 32 * 32 * 32, 0.02 * 0.125 * 32 * 32 * 32);
    EXPECT_EQ(g.at(16, 16, 16), 1.0);
    EXPECT_EQ(g.at(0, 0, 0), 0.0);
}

TEST(Voxelize, MeshOutsideCubeGivesZeros) {
    ShapeParams p;
    p.radius = 0.3;
    auto sphere = make_shape(ShapeKind::sphere, p);
    for (auto& v : sphere.vertices) v += Vec3(3.0, 0.0, 0.0);
    const auto g = voxelize(sphere, 16);
    EXPECT_EQ(occupied(g), 0.0);
}

TEST(Voxelize, SphereVolume) {
    ShapeParams p;
    p.radius = 0.6;
    const auto g = voxelize(make_shape(ShapeKind::sphere, p), 32);
    const double expect = 4.0 / 3.0 * std::numbers::pi * 0.216 / 8.0 * 32 * 32 * 32;
    EXPECT_NEAR(occupied(g), expect, 0.03 * expect);
}

TEST(Voxelize, OpenMeshThrows) {
    auto sphere = make_shape(ShapeKind::sphere, ShapeParams{});
    std::erase_if(sphere.faces, [&](const Face& f) { return sphere.vertices[f[0]].z() > 0.2; });
    EXPECT_THROW(voxelize(sphere, 32), NonWatertightError);
}

TEST(Voxelize, ExtractRoundTripKeepsOccupancy) {
    for (auto kind : {ShapeKind::sphere, ShapeKind::box, ShapeKind::cylinder}) {
        const auto first = voxelize(make_shape(kind, ShapeParams{}), 32);
        const auto second = voxelize(extract_mesh(first, 0.5), 32);
        EXPECT_NEAR(occupied(second), occupied(first), 0.05 * occupied(first)) << to_string(kind);
    }
}

}  // namespace
}  // namespace semimesh
