// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "semimesh/image.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh {

/// Guards the empty-union case. At 1e-8 the bias eps / U already reaches 1e-9 on tiny masks.
inline constexpr double kMaskLossEpsilon = 1e-10;

struct ImageLoss {
    double value = 0.0;
    Image gradient;
};

struct MaskLoss {
    double value = 0.0;
    Mask gradient;
};

struct VertexLoss {
    double value = 0.0;
    std::vector<Vec3> gradient;
};

/// Mean absolute difference over all pixels and channels.
ImageLoss l_rgb(const Image& rendered, const Image& target);

/// Mean absolute difference restricted to `region`, weighting each pixel by the region mask.
ImageLoss l_rgb(const Image& rendered, const Image& target, const Mask& region);

/// 1 - sum(a*b) / (sum(a + b - a*b) + eps); equals 1 - IoU for binary masks.
MaskLoss l_mask(const Mask& rendered, const Mask& target);

/// Mean squared displacement norm.
VertexLoss l_disp(std::span<const Vec3> displacement);

/// Mean squared uniform-Laplacian norm, Delta_i = x_i - mean of neighbors.
/// Throws InvalidArgument when a vertex has no neighbor.
VertexLoss l_laplacian(std::span<const Vec3> vertices, const std::vector<std::vector<int>>& neighbors);
VertexLoss l_laplacian(std::span<const Vec3> vertices, std::span<const Edge> edges);

}  // namespace semimesh
