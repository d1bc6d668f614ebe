// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <vector>

#include "semimesh/camera.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh {

/// Hard z-buffer: front-most face per pixel center, sampled at pixel centers.
struct DepthBuffer {
    int width = 0;
    int height = 0;
    /// Depth along the optical axis, +inf where no face covers the pixel center.
    std::vector<double> depth;
    /// Index of the front-most face, -1 where empty.
    std::vector<int> face;

    double depth_at(int x, int y) const { return depth[static_cast<std::size_t>(y) * width + x]; }
    int face_at(int x, int y) const { return face[static_cast<std::size_t>(y) * width + x]; }
};

/// Rasterizes without culling; faces with any vertex behind the camera plane are skipped.
DepthBuffer rasterize_depth(const TexturedMesh& mesh, const Camera& camera);

/// Depth of the plane of `face` at continuous pixel `position`, interpolating inverse depth
/// with unclamped screen-space barycentrics. +inf for degenerate projections.
double face_depth_at(const TexturedMesh& mesh, const Camera& camera, int face, const Vec2& position);

}  // namespace semimesh
