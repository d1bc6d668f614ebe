// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "semimesh/grid.hpp"

namespace semimesh {

using Face = std::array<int, 3>;
using Edge = std::array<int, 2>;

/// Triangle mesh with per-vertex RGB colors and an optional per-vertex visibility flag.
struct TexturedMesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> colors;
    std::vector<std::uint8_t> visibility;

    std::size_t vertex_count() const { return vertices.size(); }
    std::size_t face_count() const { return faces.size(); }
    bool empty() const { return faces.empty(); }

    /// Checks index ranges, degenerate faces and attribute sizes; throws InvalidArgument.
    void validate() const;
};

/// Undirected edges (smaller index first), sorted and unique.
std::vector<Edge> mesh_edges(const TexturedMesh& mesh);

/// Sorted neighbor lists of the edge graph.
std::vector<std::vector<int>> vertex_neighbors(const TexturedMesh& mesh);

/// True when every undirected edge is shared by exactly two faces.
bool is_watertight(const TexturedMesh& mesh);

/// V - E + F counted over referenced vertices.
int euler_characteristic(const TexturedMesh& mesh);

/// Signed enclosed volume (positive for outward-oriented closed meshes).
double signed_volume(const TexturedMesh& mesh);

double surface_area(const TexturedMesh& mesh);
double face_area(const TexturedMesh& mesh, std::size_t face);

/// Length of the axis-aligned bounding-box diagonal.
double bounding_box_diagonal(const TexturedMesh& mesh);

/// Merges vertices whose positions agree after quantization to `tolerance`.
TexturedMesh weld_vertices(const TexturedMesh& mesh, double tolerance = 1e-9);

}  // namespace semimesh
