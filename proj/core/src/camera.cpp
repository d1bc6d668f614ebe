// SPDX-License-Identifier: Apache-2.0
#include "semimesh/camera.hpp"

#include <cmath>
#include <string>

#include "semimesh/errors.hpp"

namespace semimesh {

Vec3 Camera::center() const {
    const double ce = std::cos(elevation);
    return distance * Vec3(ce * std::cos(azimuth), std::sin(elevation), ce * std::sin(azimuth));
}

// Closed form of look-at-origin with world up +y.
CameraBasis Camera::basis() const {
    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    const double ce = std::cos(elevation), se = std::sin(elevation);
    return {Vec3(-ce * ca, -se, -ce * sa), Vec3(sa, 0.0, -ca), Vec3(-ca * se, ce, -sa * se)};
}

double Camera::focal() const { return 0.5 * height / std::tan(0.5 * fov); }

void Camera::validate() const {
    if (!(std::abs(elevation) < 0.5 * std::numbers::pi))
        throw InvalidArgument("camera elevation must lie in (-pi/2, pi/2), got " + std::to_string(elevation));
    if (!(distance > std::sqrt(3.0)))
        throw InvalidArgument("camera distance must exceed sqrt(3), got " + std::to_string(distance));
    if (!(fov > 0.0 && fov < std::numbers::pi))
        throw InvalidArgument("camera field of view must lie in (0, pi), got " + std::to_string(fov));
    if (width < 1 || height < 1)
        throw InvalidArgument("image size must be at least 1x1, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    if (!std::isfinite(azimuth)) throw InvalidArgument("camera azimuth must be finite");
}

Ray camera_ray(const Camera& camera, double px, double py) {
    const auto b = camera.basis();
    const double f = camera.focal();
    const double x = (px - 0.5 * camera.width) / f;
    const double y = (py - 0.5 * camera.height) / f;
    return {camera.center(), (b.forward + x * b.right - y * b.up).normalized()};
}

Projection project(const Camera& camera, const Vec3& point) {
    const auto b = camera.basis();
    const Vec3 d = point - camera.center();
    Projection p;
    p.depth = d.dot(b.forward);
    if (!(p.depth > 1e-12)) return p;
    const double f = camera.focal();
    p.pixel = Vec2(0.5 * camera.width + f * d.dot(b.right) / p.depth, 0.5 * camera.height - f * d.dot(b.up) / p.depth);
    p.valid = true;
    return p;
}

}  // namespace semimesh
