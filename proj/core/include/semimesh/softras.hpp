// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "semimesh/camera.hpp"
#include "semimesh/image.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh {

/// Soft rasterizer constants. Distances are measured in normalized image coordinates,
/// where the longer image side spans [-1, 1].
struct SoftRasterConfig {
    /// Sharpness of the coverage sigmoid (squared normalized units).
    double sigma = 1e-4;
    /// Temperature of the inverse-depth softmax.
    double gamma = 1e-4;
    Vec3 background = Vec3::Zero();

    void validate() const;
};

struct Triangle2 {
    Vec2 a, b, c;
};

/// sigmoid(sign * d^2 / sigma) where d is the distance to the triangle boundary and sign is
/// +1 inside, -1 outside. Degenerate triangles have no interior.
double face_coverage(const Triangle2& triangle, const Vec2& point, double sigma);

/// Maps a continuous pixel position to normalized image coordinates.
Vec2 to_normalized(const Camera& camera, const Vec2& pixel);

/// Renders mask = 1 - prod_j (1 - D_j) and a coverage-weighted inverse-depth softmax of
/// barycentric vertex colors, composited over the background by the mask.
RenderTarget rasterize(const TexturedMesh& mesh, const Camera& camera, const SoftRasterConfig& config);

struct MeshGradient {
    std::vector<Vec3> d_vertices;
    std::vector<Vec3> d_colors;
    double d_azimuth = 0.0;
    double d_elevation = 0.0;
};

/// Gradient of <d_image, image> + <d_mask, mask> with respect to vertex positions,
/// vertex colors and the camera pose.
MeshGradient rasterize_backward(const TexturedMesh& mesh, const Camera& camera, const SoftRasterConfig& config,
                                const Image& d_image, const Mask& d_mask);

}  // namespace semimesh
