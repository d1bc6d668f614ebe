// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "semimesh/camera.hpp"
#include "semimesh/image.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh {

enum class ShapeKind { sphere, box, cylinder, torus, box_plus_bump, chair_proxy };

ShapeKind parse_shape_kind(std::string_view name);
std::string_view to_string(ShapeKind kind);

/// Parameters of the procedural shapes. Each shape reads only the fields it needs and every
/// shape must fit inside [-0.9, 0.9]^3.
struct ShapeParams {
    double radius = 0.6;          ///< sphere, cylinder
    int subdivisions = 3;         ///< sphere (icosphere levels), box face grid level
    Vec3 half_extent{0.5, 0.5, 0.5};  ///< box, box_plus_bump
    double half_height = 0.5;     ///< cylinder
    int segments = 32;            ///< cylinder, torus (around the tube axis)
    double major_radius = 0.5;    ///< torus
    double minor_radius = 0.2;    ///< torus
    double bump_height = 0.25;    ///< box_plus_bump
    double bump_radius = 0.3;     ///< box_plus_bump
    int voxel_resolution = 64;    ///< chair_proxy union resolution
};

/// Watertight mesh with position-derived colors. Throws InvalidArgument on bad params.
TexturedMesh make_shape(ShapeKind kind, const ShapeParams& params = {});

/// Color of the procedural texture at a point.
Vec3 procedural_color(const Vec3& position);

struct ViewSample {
    Image image;
    Mask mask;
    Camera camera;
};

struct ViewRange {
    double min = 0.0;
    double max = 0.0;
};

/// Near-hard soft-raster renders from cameras with uniformly drawn azimuth and elevation.
/// `base` supplies distance, field of view and image size. Azimuths are wrapped to [0, 2 pi).
std::vector<ViewSample> render_dataset(const TexturedMesh& mesh, int views, ViewRange azimuth, ViewRange elevation,
                                       std::uint64_t seed, const Camera& base = {});

/// Camera ranges of the synthetic benchmark protocol: azimuth [0, 360), elevation [-60, 60] degrees.
inline constexpr ViewRange kProtocolAzimuth{0.0, 2.0 * std::numbers::pi};
inline constexpr ViewRange kProtocolElevation{-std::numbers::pi / 3.0, std::numbers::pi / 3.0};
inline constexpr int kProtocolViews = 20;
inline constexpr double kNearHardSigma = 1e-6;

}  // namespace semimesh
