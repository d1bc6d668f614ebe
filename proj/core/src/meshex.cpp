// SPDX-License-Identifier: Apache-2.0
#include "semimesh/meshex.hpp"

#include <cmath>
#include <string>
#include <unordered_map>

#include "mc_tables.hpp"
#include "semimesh/errors.hpp"
#include "semimesh/point_index.hpp"
#include "semimesh/zbuffer.hpp"

namespace semimesh {

TexturedMesh extract_mesh(const OccupancyGrid& occupancy, double iso) {
    if (!(iso > 0.0 && iso < 1.0)) throw InvalidArgument("iso level must lie in (0,1), got " + std::to_string(iso));
    const int r = occupancy.resolution();
    const int n = r + 2;  // lattice points per axis, including the zero padding
    auto value = [&](int x, int y, int z) {
        if (x < 0 || y < 0 || z < 0 || x >= r || y >= r || z >= r) return 0.0;
        return occupancy.at(x, y, z);
    };
    auto lattice_id = [&](int x, int y, int z) {
        return ((static_cast<std::int64_t>(z) + 1) * n + (y + 1)) * n + (x + 1);
    };

    TexturedMesh mesh;
    std::unordered_map<std::int64_t, int> edge_vertex;
    std::array<double, 8> corner_value{};
    std::array<int, 12> local{};

    for (int z = -1; z < r; ++z) {
        for (int y = -1; y < r; ++y) {
            for (int x = -1; x < r; ++x) {
                int config = 0;
                for (int k = 0; k < 8; ++k) {
                    const auto& o = detail::kMcCorner[k];
                    corner_value[k] = value(x + o[0], y + o[1], z + o[2]);
                    if (corner_value[k] < iso) config |= 1 << k;
                }
                const int edges = detail::kMcEdgeTable[config];
                if (edges == 0) continue;
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    int c0 = detail::kMcEdge[e][0], c1 = detail::kMcEdge[e][1];
                    const auto& o0 = detail::kMcCorner[c0];
                    const auto& o1 = detail::kMcCorner[c1];
                    int axis = 0;
                    while (o0[axis] == o1[axis]) ++axis;
                    if (o0[axis] > o1[axis]) std::swap(c0, c1);
                    const auto& lo = detail::kMcCorner[c0];
                    const auto& hi = detail::kMcCorner[c1];
                    const std::int64_t key = lattice_id(x + lo[0], y + lo[1], z + lo[2]) * 3 + axis;
                    auto [it, inserted] = edge_vertex.emplace(key, static_cast<int>(mesh.vertices.size()));
                    if (inserted) {
                        const double v0 = corner_value[c0], v1 = corner_value[c1];
                        const double t = (iso - v0) / (v1 - v0);
                        const Vec3 p0 = occupancy.cell_center(x + lo[0], y + lo[1], z + lo[2]);
                        const Vec3 p1 = occupancy.cell_center(x + hi[0], y + hi[1], z + hi[2]);
                        mesh.vertices.push_back(p0 + t * (p1 - p0));
                    }
                    local[e] = it->second;
                }
                for (int t = 0; detail::kMcTriTable[config][t] != -1; t += 3) {
                    // The table winds triangles clockwise seen from outside; store them outward.
                    mesh.faces.push_back({local[detail::kMcTriTable[config][t]],
                                          local[detail::kMcTriTable[config][t + 2]],
                                          local[detail::kMcTriTable[config][t + 1]]});
                }
            }
        }
    }
    if (mesh.faces.empty())
        throw EmptyMeshError("no cell crosses iso level " + std::to_string(iso) + "; extracted mesh is empty");
    mesh.colors.assign(mesh.vertices.size(), Vec3::Constant(kFallbackGray));
    return mesh;
}

std::vector<std::uint8_t> vertex_visibility(const TexturedMesh& mesh, const Camera& camera) {
    if (mesh.empty()) throw EmptyMeshError("vertex visibility needs a non-empty mesh");
    camera.validate();
    const auto zbuf = rasterize_depth(mesh, camera);
    const double tolerance = visibility_tolerance(camera);
    std::vector<std::uint8_t> visible(mesh.vertices.size(), 0);
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto p = project(camera, mesh.vertices[i]);
        if (!p.valid) continue;
        if (p.pixel.x() < 0.0 || p.pixel.y() < 0.0 || p.pixel.x() >= camera.width || p.pixel.y() >= camera.height)
            continue;
        const int px = static_cast<int>(p.pixel.x()), py = static_cast<int>(p.pixel.y());
        const int front = zbuf.face_at(px, py);
        if (front < 0) {
            visible[i] = 1;
            continue;
        }
        // Compare against the front face's depth at the vertex's own image position.
        const double surface = face_depth_at(mesh, camera, front, p.pixel);
        visible[i] = p.depth <= surface + tolerance ? 1 : 0;
    }
    return visible;
}

std::vector<int> symmetric_partners(const TexturedMesh& mesh) {
    if (mesh.vertices.empty()) return {};
    const double cell = std::max(bounding_box_diagonal(mesh) / 32.0, 1e-6);
    const PointIndex index(mesh.vertices, cell);
    std::vector<int> partner(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        partner[i] = index.nearest(Vec3(-v.x(), v.y(), v.z()));
    }
    return partner;
}

std::vector<Vec3> sample_textures(const TexturedMesh& mesh, const Image& image, const Camera& camera,
                                  std::span<const std::uint8_t> visibility) {
    if (visibility.size() != mesh.vertices.size())
        throw DimensionMismatch("visibility has " + std::to_string(visibility.size()) + " flags for " +
                                std::to_string(mesh.vertices.size()) + " vertices");
    if (image.width() != camera.width || image.height() != camera.height)
        throw DimensionMismatch("image size does not match the camera");

    std::vector<Vec3> sampled(mesh.vertices.size(), Vec3::Zero());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        if (!visibility[i]) continue;
        sampled[i] = image.sample_bilinear(project(camera, mesh.vertices[i]).pixel);
    }
    const auto partner = symmetric_partners(mesh);
    std::vector<Vec3> colors(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const double wi = visibility[i] ? 1.0 : 0.0;
        const double ws = visibility[partner[i]] ? 1.0 : 0.0;
        if (wi == 0.0 && ws == 0.0) {
            colors[i] = Vec3::Constant(kFallbackGray);
            continue;
        }
        colors[i] = (wi * sampled[i] + ws * sampled[partner[i]]) / (wi + ws + kTextureFusionEpsilon);
    }
    return colors;
}

TexturedMesh texture_from_view(TexturedMesh mesh, const Image& image, const Camera& camera) {
    mesh.visibility = vertex_visibility(mesh, camera);
    mesh.colors = sample_textures(mesh, image, camera, mesh.visibility);
    return mesh;
}

}  // namespace semimesh
