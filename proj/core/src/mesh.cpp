// SPDX-License-Identifier: Apache-2.0
#include "semimesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "semimesh/errors.hpp"

namespace semimesh {

namespace {

std::vector<Edge> directed_face_edges(const TexturedMesh& mesh) {
    std::vector<Edge> edges;
    edges.reserve(mesh.faces.size() * 3);
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k) {
            const int a = f[k], b = f[(k + 1) % 3];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

}  // namespace

void TexturedMesh::validate() const {
    const int n = static_cast<int>(vertices.size());
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const auto& f = faces[i];
        for (int v : f)
            if (v < 0 || v >= n)
                throw InvalidArgument("face " + std::to_string(i) + " references vertex " + std::to_string(v) +
                                      " of " + std::to_string(n));
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw InvalidArgument("face " + std::to_string(i) + " is degenerate (repeated vertex index)");
    }
    if (!colors.empty() && colors.size() != vertices.size())
        throw InvalidArgument("mesh has " + std::to_string(colors.size()) + " colors for " + std::to_string(n) +
                              " vertices");
    if (!visibility.empty() && visibility.size() != vertices.size())
        throw InvalidArgument("mesh visibility size does not match vertex count");
}

std::vector<Edge> mesh_edges(const TexturedMesh& mesh) {
    auto edges = directed_face_edges(mesh);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

std::vector<std::vector<int>> vertex_neighbors(const TexturedMesh& mesh) {
    std::vector<std::vector<int>> nbrs(mesh.vertices.size());
    for (const auto& e : mesh_edges(mesh)) {
        nbrs[e[0]].push_back(e[1]);
        nbrs[e[1]].push_back(e[0]);
    }
    for (auto& n : nbrs) std::sort(n.begin(), n.end());
    return nbrs;
}

bool is_watertight(const TexturedMesh& mesh) {
    if (mesh.faces.empty()) return false;
    const auto edges = directed_face_edges(mesh);
    for (std::size_t i = 0; i < edges.size();) {
        std::size_t j = i;
        while (j < edges.size() && edges[j] == edges[i]) ++j;
        if (j - i != 2) return false;
        i = j;
    }
    return true;
}

int euler_characteristic(const TexturedMesh& mesh) {
    std::vector<char> used(mesh.vertices.size(), 0);
    for (const auto& f : mesh.faces)
        for (int v : f) used[v] = 1;
    const auto v = std::count(used.begin(), used.end(), 1);
    return static_cast<int>(v) - static_cast<int>(mesh_edges(mesh).size()) + static_cast<int>(mesh.faces.size());
}

double signed_volume(const TexturedMesh& mesh) {
    double six_v = 0.0;
    for (const auto& f : mesh.faces)
        six_v += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
    return six_v / 6.0;
}

double face_area(const TexturedMesh& mesh, std::size_t face) {
    const auto& f = mesh.faces[face];
    return 0.5 * (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]).norm();
}

double surface_area(const TexturedMesh& mesh) {
    double a = 0.0;
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) a += face_area(mesh, i);
    return a;
}

double bounding_box_diagonal(const TexturedMesh& mesh) {
    if (mesh.vertices.empty()) return 0.0;
    Vec3 lo = mesh.vertices.front(), hi = lo;
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

TexturedMesh weld_vertices(const TexturedMesh& mesh, double tolerance) {
    std::map<std::array<long long, 3>, int> lookup;
    std::vector<int> remap(mesh.vertices.size());
    TexturedMesh out;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& p = mesh.vertices[i];
        const std::array<long long, 3> key{std::llround(p.x() / tolerance), std::llround(p.y() / tolerance),
                                           std::llround(p.z() / tolerance)};
        auto [it, inserted] = lookup.emplace(key, static_cast<int>(out.vertices.size()));
        if (inserted) {
            out.vertices.push_back(p);
            if (!mesh.colors.empty()) out.colors.push_back(mesh.colors[i]);
        }
        remap[i] = it->second;
    }
    for (const auto& f : mesh.faces) {
        const Face g{remap[f[0]], remap[f[1]], remap[f[2]]};
        if (g[0] != g[1] && g[1] != g[2] && g[0] != g[2]) out.faces.push_back(g);
    }
    return out;
}

}  // namespace semimesh
