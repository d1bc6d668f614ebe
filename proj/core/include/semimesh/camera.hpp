// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numbers>

#include "semimesh/grid.hpp"

namespace semimesh {

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Orthonormal camera frame. `forward` points from the camera center to the origin,
/// `right` and `up` span the image plane (image x to the right, image y downward).
struct CameraBasis {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};

/// Upright pinhole camera on a sphere of radius `distance`, looking at the origin.
///
/// Pixel coordinates are continuous: pixel (i, j) covers [i, i+1) x [j, j+1) and its
/// center is (i + 0.5, j + 0.5). The principal point is (width / 2, height / 2) and
/// `fov` is the vertical field of view.
struct Camera {
    double azimuth = 0.0;
    double elevation = 0.0;
    double distance = 2.5;
    double fov = deg_to_rad(30.0);
    int width = 64;
    int height = 64;

    /// C = distance * (cos(el) cos(az), sin(el), cos(el) sin(az)).
    Vec3 center() const;
    CameraBasis basis() const;
    /// Focal length in pixels.
    double focal() const;

    void validate() const;
};

struct Ray {
    Vec3 origin;
    Vec3 direction;
};

/// Ray from the camera center through continuous pixel position (px, py).
Ray camera_ray(const Camera& camera, double px, double py);

struct Projection {
    Vec2 pixel;
    /// Distance along the optical axis.
    double depth = 0.0;
    bool valid = false;
};

/// Perspective projection; `valid` is false for points at or behind the camera plane.
Projection project(const Camera& camera, const Vec3& point);

}  // namespace semimesh
