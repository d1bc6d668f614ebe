// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include <unsupported/Eigen/AutoDiff>

#include "semimesh/camera.hpp"

namespace semimesh::detail {

/// Per-face derivatives: (x, y, inverse depth) of each of the three projected vertices.
using FaceJet = Eigen::AutoDiffScalar<Eigen::Matrix<double, 9, 1>>;
/// Per-vertex projection derivatives: position (3), azimuth, elevation.
using ProjectionJet = Eigen::AutoDiffScalar<Eigen::Matrix<double, 5, 1>>;

inline double value_of(double x) { return x; }
template <class D>
double value_of(const Eigen::AutoDiffScalar<D>& x) {
    return x.value();
}

template <class T>
struct Point2 {
    T x, y;
};

template <class T>
T cross(const Point2<T>& a, const Point2<T>& b) {
    return a.x * b.y - a.y * b.x;
}

template <class T>
Point2<T> operator-(const Point2<T>& a, const Point2<T>& b) {
    return {a.x - b.x, a.y - b.y};
}

template <class T>
T segment_distance2(const Point2<T>& p, const Point2<T>& a, const Point2<T>& b) {
    const Point2<T> ab = b - a;
    const Point2<T> ap = p - a;
    const T len2 = ab.x * ab.x + ab.y * ab.y;
    T t = T(0.0);
    if (value_of(len2) > 0.0) {
        t = (ap.x * ab.x + ap.y * ab.y) / len2;
        if (value_of(t) < 0.0) t = T(0.0);
        if (value_of(t) > 1.0) t = T(1.0);
    }
    const T dx = ap.x - t * ab.x;
    const T dy = ap.y - t * ab.y;
    return dx * dx + dy * dy;
}

template <class T>
T stable_sigmoid(const T& x) {
    using std::exp;
    if (value_of(x) >= 0.0) return T(1.0) / (T(1.0) + exp(-x));
    const T e = exp(x);
    return e / (T(1.0) + e);
}

template <class T>
struct FaceSample {
    T coverage;
    T inv_depth;
    std::array<T, 3> bary;  // clamped to the triangle and renormalized
    bool inside = false;
};

/// Projected triangle below this signed area (squared normalized units) has no interior.
inline constexpr double kDegenerateArea = 1e-14;

template <class T>
FaceSample<T> face_kernel(const std::array<Point2<T>, 3>& p, const std::array<T, 3>& inv_depth, const Vec2& point,
                          double sigma) {
    const Point2<T> q{T(point.x()), T(point.y())};
    FaceSample<T> out;
    const T area = cross(p[1] - p[0], p[2] - p[0]);
    const bool degenerate = std::abs(value_of(area)) < kDegenerateArea;

    std::array<T, 3> b;
    if (degenerate) {
        b = {T(1.0 / 3.0), T(1.0 / 3.0), T(1.0 / 3.0)};
    } else {
        b[0] = cross(p[1] - q, p[2] - q) / area;
        b[1] = cross(p[2] - q, p[0] - q) / area;
        b[2] = T(1.0) - b[0] - b[1];
    }
    out.inside = !degenerate && value_of(b[0]) >= 0.0 && value_of(b[1]) >= 0.0 && value_of(b[2]) >= 0.0;

    T d2 = segment_distance2(q, p[0], p[1]);
    for (int k = 1; k < 3; ++k) {
        T e = segment_distance2(q, p[k], p[(k + 1) % 3]);
        if (value_of(e) < value_of(d2)) d2 = e;
    }
    const T signed_d2 = out.inside ? T(d2 / sigma) : T(-d2 / sigma);
    out.coverage = stable_sigmoid(signed_d2);

    T total = T(0.0);
    for (int k = 0; k < 3; ++k) {
        if (value_of(b[k]) < 0.0) b[k] = T(0.0);
        total += b[k];
    }
    for (int k = 0; k < 3; ++k) out.bary[k] = b[k] / total;
    out.inv_depth = out.bary[0] * inv_depth[0] + out.bary[1] * inv_depth[1] + out.bary[2] * inv_depth[2];
    return out;
}

/// Projection to normalized image coordinates (longer side spans [-1, 1], y down) and
/// inverse depth.
template <class T>
std::array<T, 3> project_normalized(const std::array<T, 3>& x, const T& azimuth, const T& elevation,
                                    const Camera& camera) {
    using std::cos;
    using std::sin;
    const T ca = cos(azimuth), sa = sin(azimuth), ce = cos(elevation), se = sin(elevation);
    const double rho = camera.distance;
    const T dx = x[0] - rho * ce * ca, dy = x[1] - rho * se, dz = x[2] - rho * ce * sa;
    const T depth = -(dx * ce * ca + dy * se + dz * ce * sa);
    const T right = dx * sa - dz * ca;
    const T up = -dx * ca * se + dy * ce - dz * sa * se;
    const double scale = 2.0 * camera.focal() / std::max(camera.width, camera.height);
    return {scale * right / depth, -scale * up / depth, T(1.0) / depth};
}

}  // namespace semimesh::detail
