// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace semimesh {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

/// Dense cubic grid over the canonical cube [-1,1]^3.
///
/// Cell (ix, iy, iz) has its center at 2 * (i + 0.5) / R - 1 along each axis. Storage is
/// channel-major, then z, y, x with x fastest.
class VoxelGrid {
  public:
    VoxelGrid() = default;
    VoxelGrid(int resolution, int channels, double fill = 0.0);
    VoxelGrid(int resolution, int channels, std::vector<double> values);

    int resolution() const { return resolution_; }
    int channels() const { return channels_; }
    std::size_t cell_count() const { return cell_count_; }

    std::size_t cell_index(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(iz) * resolution_ + iy) * resolution_ + ix;
    }
    double& at(int channel, int ix, int iy, int iz) {
        return values_[channel * cell_count_ + cell_index(ix, iy, iz)];
    }
    double at(int channel, int ix, int iy, int iz) const {
        return values_[channel * cell_count_ + cell_index(ix, iy, iz)];
    }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<double> channel(int c) { return std::span<double>(values_).subspan(c * cell_count_, cell_count_); }
    std::span<const double> channel(int c) const {
        return std::span<const double>(values_).subspan(c * cell_count_, cell_count_);
    }

    double cell_width() const { return 2.0 / resolution_; }
    double cell_coordinate(int i) const { return 2.0 * (i + 0.5) / resolution_ - 1.0; }
    Vec3 cell_center(int ix, int iy, int iz) const {
        return {cell_coordinate(ix), cell_coordinate(iy), cell_coordinate(iz)};
    }

    friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

  private:
    int resolution_ = 0;
    int channels_ = 0;
    std::size_t cell_count_ = 0;
    std::vector<double> values_;
};

/// Single-channel grid of occupancy probabilities in [0,1].
class OccupancyGrid : public VoxelGrid {
  public:
    OccupancyGrid() = default;
    explicit OccupancyGrid(int resolution, double fill = 0.0);
    OccupancyGrid(int resolution, std::vector<double> values);
    /// Adopts a one-channel grid, validating the value range.
    explicit OccupancyGrid(VoxelGrid grid);

    double& at(int ix, int iy, int iz) { return VoxelGrid::at(0, ix, iy, iz); }
    double at(int ix, int iy, int iz) const { return VoxelGrid::at(0, ix, iy, iz); }

    /// Throws InvalidArgument naming the first cell outside [0,1].
    void validate() const;
};

/// Multi-channel feature grid; with three channels it carries RGB directly.
class FeatureGrid : public VoxelGrid {
  public:
    FeatureGrid() = default;
    FeatureGrid(int resolution, int channels, double fill = 0.0);
    FeatureGrid(int resolution, int channels, std::vector<double> values);
    explicit FeatureGrid(VoxelGrid grid);
};

struct SemiImplicitVolume {
    OccupancyGrid occupancy;
    FeatureGrid feature;
};

/// Interpolation stencil of a point: the eight enclosing cells and their trilinear weights.
///
/// Cells beyond the grid boundary get index -1 and contribute zero. Points outside the
/// canonical cube yield an all-zero stencil.
struct TrilinearStencil {
    std::array<std::int64_t, 8> cells{};
    std::array<double, 8> weights{};
    /// d weight / d point for each of the eight corners.
    std::array<Vec3, 8> weight_gradients{};
};

TrilinearStencil trilinear_stencil(int resolution, const Vec3& point);

double trilinear_sample(const OccupancyGrid& grid, const Vec3& point);
Eigen::VectorXd trilinear_sample(const FeatureGrid& grid, const Vec3& point);

struct SampleWithGradient {
    Eigen::VectorXd value;
    /// channels x 3 Jacobian with respect to the sample point.
    Eigen::MatrixX3d d_point;
};
SampleWithGradient trilinear_sample_with_gradient(const VoxelGrid& grid, const Vec3& point);

/// Averages every cell with its mirror across x = 0, i.e. (ix, iy, iz) and (R-1-ix, iy, iz).
OccupancyGrid symmetrize(const OccupancyGrid& grid);
FeatureGrid symmetrize(const FeatureGrid& grid);
SemiImplicitVolume symmetrize(const SemiImplicitVolume& volume);

}  // namespace semimesh
