// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "semimesh/camera.hpp"
#include "semimesh/grid.hpp"
#include "semimesh/image.hpp"

namespace semimesh {

/// Depths of the samples taken along each ray. Samples sit at the midpoints of D equal
/// intervals of [near, far].
struct RaySampleSpec {
    int samples = 64;
    double near = 0.0;
    double far = 0.0;

    /// Brackets the canonical cube: [distance - sqrt(3), distance + sqrt(3)].
    static RaySampleSpec for_camera(const Camera& camera, int samples = 64);

    double depth(int d) const { return near + (d + 0.5) * (far - near) / samples; }
    void validate() const;
};

/// Ray stopping probabilities w_d = o_d * prod_{h<d} (1 - o_h).
std::vector<double> ray_weights(std::span<const double> occupancies);

struct PixelSample {
    Eigen::VectorXd feature;
    double mask = 0.0;
};

/// Composites the occupancy-weighted feature along the ray through the center of pixel (px, py).
PixelSample render_pixel(const SemiImplicitVolume& volume, const Camera& camera, int px, int py,
                         const RaySampleSpec& spec);

/// Renders every pixel; the feature grid must have three channels.
RenderTarget render_view(const SemiImplicitVolume& volume, const Camera& camera, const RaySampleSpec& spec);

struct VolumeGradient {
    VoxelGrid d_occupancy;
    VoxelGrid d_feature;
};

/// Gradient of <d_image, image> + <d_mask, mask> with respect to every occupancy and
/// feature cell. Accumulation order is fixed, so results are bitwise reproducible.
VolumeGradient render_view_backward(const SemiImplicitVolume& volume, const Camera& camera,
                                    const RaySampleSpec& spec, const Image& d_image, const Mask& d_mask);

}  // namespace semimesh
