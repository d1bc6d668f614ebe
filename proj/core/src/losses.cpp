// SPDX-License-Identifier: Apache-2.0
#include "semimesh/losses.hpp"

#include <cmath>
#include <string>

#include "semimesh/errors.hpp"

namespace semimesh {

namespace {

template <class A, class B>
void check_same_size(const A& a, const B& b, const char* what) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch(std::string(what) + ": size " + std::to_string(a.width()) + "x" +
                                std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()));
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

ImageLoss l_rgb(const Image& rendered, const Image& target) {
    check_same_size(rendered, target, "l_rgb");
    ImageLoss out{0.0, Image(rendered.width(), rendered.height())};
    const auto a = rendered.values();
    const auto b = target.values();
    auto g = out.gradient.values();
    const double inv_n = 1.0 / static_cast<double>(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        out.value += std::abs(d);
        g[i] = sign(d) * inv_n;
    }
    out.value *= inv_n;
    return out;
}

ImageLoss l_rgb(const Image& rendered, const Image& target, const Mask& region) {
    check_same_size(rendered, target, "l_rgb");
    check_same_size(rendered, region, "l_rgb region");
    ImageLoss out{0.0, Image(rendered.width(), rendered.height())};
    double weight = 0.0;
    for (double r : region.values()) weight += 3.0 * r;
    if (weight <= 0.0) return out;
    for (int y = 0; y < rendered.height(); ++y)
        for (int x = 0; x < rendered.width(); ++x)
            for (int c = 0; c < 3; ++c) {
                const double d = rendered.at(x, y, c) - target.at(x, y, c);
                out.value += region.at(x, y) * std::abs(d);
                out.gradient.at(x, y, c) = region.at(x, y) * sign(d) / weight;
            }
    out.value /= weight;
    return out;
}

MaskLoss l_mask(const Mask& rendered, const Mask& target) {
    check_same_size(rendered, target, "l_mask");
    const auto a = rendered.values();
    const auto b = target.values();
    double inter = 0.0, uni = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += a[i] * b[i];
        uni += a[i] + b[i] - a[i] * b[i];
    }
    uni += kMaskLossEpsilon;
    MaskLoss out{1.0 - inter / uni, Mask(rendered.width(), rendered.height())};
    auto g = out.gradient.values();
    // d/da_i of -I/U = -(b_i U - I (1 - b_i)) / U^2
    for (std::size_t i = 0; i < a.size(); ++i) g[i] = -(b[i] * uni - inter * (1.0 - b[i])) / (uni * uni);
    return out;
}

VertexLoss l_disp(std::span<const Vec3> displacement) {
    VertexLoss out{0.0, std::vector<Vec3>(displacement.size(), Vec3::Zero())};
    if (displacement.empty()) return out;
    const double inv_n = 1.0 / static_cast<double>(displacement.size());
    for (std::size_t i = 0; i < displacement.size(); ++i) {
        out.value += displacement[i].squaredNorm();
        out.gradient[i] = 2.0 * inv_n * displacement[i];
    }
    out.value *= inv_n;
    return out;
}

VertexLoss l_laplacian(std::span<const Vec3> vertices, const std::vector<std::vector<int>>& neighbors) {
    if (neighbors.size() != vertices.size())
        throw DimensionMismatch("neighbor lists do not match the vertex count");
    const std::size_t n = vertices.size();
    VertexLoss out{0.0, std::vector<Vec3>(n, Vec3::Zero())};
    if (n == 0) return out;
    std::vector<Vec3> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (neighbors[i].empty())
            throw InvalidArgument("vertex " + std::to_string(i) + " is isolated; the Laplacian is undefined");
        Vec3 mean = Vec3::Zero();
        for (int j : neighbors[i]) mean += vertices[j];
        delta[i] = vertices[i] - mean / static_cast<double>(neighbors[i].size());
        out.value += delta[i].squaredNorm();
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    out.value *= inv_n;
    for (std::size_t i = 0; i < n; ++i) {
        out.gradient[i] += 2.0 * inv_n * delta[i];
        const double share = 2.0 * inv_n / static_cast<double>(neighbors[i].size());
        for (int j : neighbors[i]) out.gradient[j] -= share * delta[i];
    }
    return out;
}

VertexLoss l_laplacian(std::span<const Vec3> vertices, std::span<const Edge> edges) {
    std::vector<std::vector<int>> neighbors(vertices.size());
    for (const auto& e : edges) {
        if (e[0] < 0 || e[1] < 0 || e[0] >= static_cast<int>(vertices.size()) ||
            e[1] >= static_cast<int>(vertices.size()))
            throw InvalidArgument("edge references a vertex out of range");
        neighbors[e[0]].push_back(e[1]);
        neighbors[e[1]].push_back(e[0]);
    }
    return l_laplacian(vertices, neighbors);
}

}  // namespace semimesh
