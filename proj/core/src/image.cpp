// SPDX-License-Identifier: Apache-2.0
#include "semimesh/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "semimesh/errors.hpp"

namespace semimesh {

namespace {

void check_size(int width, int height) {
    if (width < 1 || height < 1)
        throw InvalidArgument("image size must be at least 1x1, got " + std::to_string(width) + "x" +
                              std::to_string(height));
}

}  // namespace

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
    check_size(width, height);
    data_.assign(pixel_count() * 3, fill);
}

Vec3 Image::sample_bilinear(const Vec2& position) const {
    const double u = std::clamp(position.x() - 0.5, 0.0, static_cast<double>(width_ - 1));
    const double v = std::clamp(position.y() - 0.5, 0.0, static_cast<double>(height_ - 1));
    const int x0 = static_cast<int>(std::floor(u)), y0 = static_cast<int>(std::floor(v));
    const int x1 = std::min(x0 + 1, width_ - 1), y1 = std::min(y0 + 1, height_ - 1);
    const double fx = u - x0, fy = v - y0;
    return (1 - fy) * ((1 - fx) * pixel(x0, y0) + fx * pixel(x1, y0)) +
           fy * ((1 - fx) * pixel(x0, y1) + fx * pixel(x1, y1));
}

Mask::Mask(int width, int height, double fill) : width_(width), height_(height) {
    check_size(width, height);
    data_.assign(pixel_count(), fill);
}

}  // namespace semimesh
