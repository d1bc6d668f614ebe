// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "semimesh/grid.hpp"

namespace semimesh {

/// Row-major H x W x 3 image. Rendered images live in [0,1]; gradient images may not.
class Image {
  public:
    Image() = default;
    Image(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    double& at(int x, int y, int c) { return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c]; }
    double at(int x, int y, int c) const { return data_[(static_cast<std::size_t>(y) * width_ + x) * 3 + c]; }
    Vec3 pixel(int x, int y) const { return {at(x, y, 0), at(x, y, 1), at(x, y, 2)}; }
    void set_pixel(int x, int y, const Vec3& rgb) {
        for (int c = 0; c < 3; ++c) at(x, y, c) = rgb[c];
    }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    /// Bilinear lookup at continuous pixel position (pixel centers at i + 0.5), clamped to the border.
    Vec3 sample_bilinear(const Vec2& position) const;

    friend bool operator==(const Image&, const Image&) = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Row-major H x W soft foreground mask.
class Mask {
  public:
    Mask() = default;
    Mask(int width, int height, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    friend bool operator==(const Mask&, const Mask&) = default;

  private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// An (image, mask) pair produced by either renderer.
struct RenderTarget {
    Image image;
    Mask mask;
};

}  // namespace semimesh
