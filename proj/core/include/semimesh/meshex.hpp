// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "semimesh/camera.hpp"
#include "semimesh/grid.hpp"
#include "semimesh/image.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh {

inline constexpr double kFallbackGray = 0.5;
inline constexpr double kTextureFusionEpsilon = 1e-4;

/// Marching cubes over the zero-padded occupancy field at level `iso` in (0,1).
///
/// Vertices are placed by linear interpolation along lattice edges between cell centers
/// and shared between neighboring cells, so the result is closed and outward oriented.
/// Colors start at 0.5 gray. Throws EmptyMeshError when nothing crosses `iso`.
TexturedMesh extract_mesh(const OccupancyGrid& occupancy, double iso = 0.5);

/// Visibility depth tolerance for a camera: 1e-3 of its distance.
inline double visibility_tolerance(const Camera& camera) { return 1e-3 * camera.distance; }

/// 1 where the vertex projects inside the image and is not behind the front-most surface
/// at its pixel by more than `visibility_tolerance`.
std::vector<std::uint8_t> vertex_visibility(const TexturedMesh& mesh, const Camera& camera);

/// For every vertex, the nearest vertex to its mirror image across x = 0.
std::vector<int> symmetric_partners(const TexturedMesh& mesh);

/// Per-vertex colors fused from the vertex and its mirror partner:
/// t_i = (w_i c_i + w_s c_s) / (w_i + w_s + eps), gray where neither is visible.
std::vector<Vec3> sample_textures(const TexturedMesh& mesh, const Image& image, const Camera& camera,
                                  std::span<const std::uint8_t> visibility);

/// Visibility followed by texture fusion; returns the mesh with `colors` and `visibility` set.
TexturedMesh texture_from_view(TexturedMesh mesh, const Image& image, const Camera& camera);

}  // namespace semimesh
