// SPDX-License-Identifier: Apache-2.0
#include "semimesh/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "semimesh/errors.hpp"
#include "semimesh/eval.hpp"
#include "semimesh/meshex.hpp"
#include "semimesh/softras.hpp"

namespace semimesh {

namespace {

constexpr double kShapeBound = 0.9;

void require(bool ok, const std::string& message) {
    if (!ok) throw InvalidArgument(message);
}

void paint(TexturedMesh& mesh) {
    mesh.colors.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) mesh.colors[i] = procedural_color(mesh.vertices[i]);
}

void check_bounds(const TexturedMesh& mesh, std::string_view name) {
    for (const auto& v : mesh.vertices)
        require(v.cwiseAbs().maxCoeff() <= kShapeBound + 1e-9,
                std::string(name) + " parameters place the shape outside [-0.9, 0.9]^3");
}

TexturedMesh icosphere(double radius, int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TexturedMesh m;
    m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (auto& v : m.vertices) v.normalize();
    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto [it, inserted] = midpoint.emplace(key, static_cast<int>(m.vertices.size()));
            if (inserted) m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
            return it->second;
        };
        std::vector<Face> next;
        next.reserve(m.faces.size() * 4);
        for (const auto& f : m.faces) {
            const int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        m.faces = std::move(next);
    }
    for (auto& v : m.vertices) v *= radius;
    return m;
}

/// Axis-aligned box centered at `center` with an n x n grid on every face.
TexturedMesh grid_box(const Vec3& center, const Vec3& half, int n) {
    TexturedMesh raw;
    for (int axis = 0; axis < 3; ++axis) {
        for (int s : {-1, 1}) {
            int u = (axis + 1) % 3, v = (axis + 2) % 3;
            if (s < 0) std::swap(u, v);
            const int base = static_cast<int>(raw.vertices.size());
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i) {
                    Vec3 p = center;
                    p[axis] += s * half[axis];
                    p[u] += half[u] * (2.0 * i / n - 1.0);
                    p[v] += half[v] * (2.0 * j / n - 1.0);
                    raw.vertices.push_back(p);
                }
            auto id = [&](int i, int j) { return base + j * (n + 1) + i; };
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    raw.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
                    raw.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
                }
        }
    }
    return weld_vertices(raw, 1e-9);
}

TexturedMesh cylinder(double radius, double half_height, int segments) {
    TexturedMesh m;
    for (int ring = 0; ring < 2; ++ring) {
        const double y = ring == 0 ? -half_height : half_height;
        for (int k = 0; k < segments; ++k) {
            const double a = 2.0 * std::numbers::pi * k / segments;
            m.vertices.emplace_back(radius * std::cos(a), y, radius * std::sin(a));
        }
    }
    const int bottom = static_cast<int>(m.vertices.size());
    m.vertices.emplace_back(0.0, -half_height, 0.0);
    const int top = bottom + 1;
    m.vertices.emplace_back(0.0, half_height, 0.0);
    for (int k = 0; k < segments; ++k) {
        const int k1 = (k + 1) % segments;
        const int a = k, b = k1, c = segments + k, d = segments + k1;
        m.faces.push_back({a, c, b});
        m.faces.push_back({b, c, d});
        m.faces.push_back({bottom, a, b});
        m.faces.push_back({top, d, c});
    }
    return m;
}

TexturedMesh torus(double major, double minor, int segments) {
    const int rings = 2 * segments;
    TexturedMesh m;
    for (int i = 0; i < rings; ++i) {
        const double u = 2.0 * std::numbers::pi * i / rings;
        for (int j = 0; j < segments; ++j) {
            const double v = 2.0 * std::numbers::pi * j / segments;
            const double w = major + minor * std::cos(v);
            m.vertices.emplace_back(w * std::cos(u), minor * std::sin(v), w * std::sin(u));
        }
    }
    auto id = [&](int i, int j) { return (i % rings) * segments + (j % segments); };
    for (int i = 0; i < rings; ++i)
        for (int j = 0; j < segments; ++j) {
            m.faces.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    return m;
}

TexturedMesh box_plus_bump(const ShapeParams& p) {
    const Vec3& h = p.half_extent;
    require(p.bump_radius > 0.0 && p.bump_radius < std::min(h.x(), h.z()),
            "box_plus_bump bump_radius must lie in (0, min(half_extent.x, half_extent.z))");
    require(p.bump_height >= 0.0, "box_plus_bump bump_height must be non-negative");
    TexturedMesh m = grid_box(Vec3::Zero(), h, 1 << (p.subdivisions + 1));
    for (auto& v : m.vertices) {
        if (v.y() < h.y() - 1e-12) continue;
        const double s = std::max(0.0, 1.0 - (v.x() * v.x() + v.z() * v.z()) / (p.bump_radius * p.bump_radius));
        v.y() += p.bump_height * s * s;
    }
    return m;
}

TexturedMesh chair_proxy(const ShapeParams& p) {
    require(p.voxel_resolution >= 8, "chair_proxy voxel_resolution must be >= 8");
    struct Part {
        Vec3 center, half;
    };
    const std::vector<Part> parts = {
        {{0.0, 0.0, 0.0}, {0.4, 0.05, 0.4}},      // seat
        {{0.0, 0.39, -0.35}, {0.4, 0.35, 0.05}},  // back
        {{0.33, -0.39, 0.33}, {0.05, 0.36, 0.05}},
        {{-0.33, -0.39, 0.33}, {0.05, 0.36, 0.05}},
        {{0.33, -0.39, -0.33}, {0.05, 0.36, 0.05}},
        {{-0.33, -0.39, -0.33}, {0.05, 0.36, 0.05}},
    };
    OccupancyGrid uni(p.voxel_resolution);
    for (const auto& part : parts) {
        const auto occ = voxelize(grid_box(part.center, part.half, 1), p.voxel_resolution);
        auto dst = uni.values();
        const auto src = occ.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
    }
    return extract_mesh(uni, 0.5);
}

}  // namespace

ShapeKind parse_shape_kind(std::string_view name) {
    for (auto k : {ShapeKind::sphere, ShapeKind::box, ShapeKind::cylinder, ShapeKind::torus, ShapeKind::box_plus_bump,
                   ShapeKind::chair_proxy})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown shape kind '" + std::string(name) + "'");
}

std::string_view to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::sphere: return "sphere";
        case ShapeKind::box: return "box";
        case ShapeKind::cylinder: return "cylinder";
        case ShapeKind::torus: return "torus";
        case ShapeKind::box_plus_bump: return "box_plus_bump";
        case ShapeKind::chair_proxy: return "chair_proxy";
    }
    return "unknown";
}

Vec3 procedural_color(const Vec3& p) {
    // Mirror-symmetric about x = 0 like the shapes themselves.
    return Vec3(0.25 + 0.75 * std::abs(p.x()), 0.5 + 0.5 * p.y(), 0.5 + 0.5 * p.z()).cwiseMax(0.0).cwiseMin(1.0);
}

TexturedMesh make_shape(ShapeKind kind, const ShapeParams& p) {
    TexturedMesh mesh;
    switch (kind) {
        case ShapeKind::sphere:
            require(p.radius > 0.0, "sphere radius must be positive");
            require(p.subdivisions >= 0 && p.subdivisions <= 7, "sphere subdivisions must lie in [0, 7]");
            mesh = icosphere(p.radius, p.subdivisions);
            break;
        case ShapeKind::box:
            require((p.half_extent.array() > 0.0).all(), "box half extents must be positive");
            require(p.subdivisions >= 0 && p.subdivisions <= 7, "box subdivisions must lie in [0, 7]");
            mesh = grid_box(Vec3::Zero(), p.half_extent, 1 << p.subdivisions);
            break;
        case ShapeKind::cylinder:
            require(p.radius > 0.0 && p.half_height > 0.0, "cylinder radius and half_height must be positive");
            require(p.segments >= 3, "cylinder needs at least 3 segments");
            mesh = cylinder(p.radius, p.half_height, p.segments);
            break;
        case ShapeKind::torus:
            require(p.minor_radius > 0.0 && p.major_radius > p.minor_radius,
                    "torus needs 0 < minor_radius < major_radius");
            require(p.segments >= 3, "torus needs at least 3 segments");
            mesh = torus(p.major_radius, p.minor_radius, p.segments);
            break;
        case ShapeKind::box_plus_bump:
            require((p.half_extent.array() > 0.0).all(), "box half extents must be positive");
            require(p.subdivisions >= 0 && p.subdivisions <= 6, "box_plus_bump subdivisions must lie in [0, 6]");
            mesh = box_plus_bump(p);
            break;
        case ShapeKind::chair_proxy:
            mesh = chair_proxy(p);
            break;
    }
    check_bounds(mesh, to_string(kind));
    paint(mesh);
    return mesh;
}

std::vector<ViewSample> render_dataset(const TexturedMesh& mesh, int views, ViewRange azimuth, ViewRange elevation,
                                       std::uint64_t seed, const Camera& base) {
    if (views < 1) throw InvalidArgument("render_dataset needs at least one view");
    if (azimuth.max < azimuth.min || elevation.max < elevation.min)
        throw InvalidArgument("view ranges must satisfy min <= max");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SoftRasterConfig raster;
    raster.sigma = kNearHardSigma;
    const double two_pi = 2.0 * std::numbers::pi;

    std::vector<ViewSample> out;
    out.reserve(views);
    for (int v = 0; v < views; ++v) {
        Camera cam = base;
        const double ua = unit(rng), ue = unit(rng);
        cam.azimuth = std::fmod(azimuth.min + ua * (azimuth.max - azimuth.min), two_pi);
        if (cam.azimuth < 0.0) cam.azimuth += two_pi;
        if (cam.azimuth >= two_pi) cam.azimuth = 0.0;
        cam.elevation = elevation.min + ue * (elevation.max - elevation.min);
        auto target = rasterize(mesh, cam, raster);
        out.push_back({std::move(target.image), std::move(target.mask), cam});
    }
    return out;
}

}  // namespace semimesh
