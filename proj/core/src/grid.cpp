// SPDX-License-Identifier: Apache-2.0
#include "semimesh/grid.hpp"

#include <cmath>
#include <string>

#include "semimesh/errors.hpp"

namespace semimesh {

namespace {

std::size_t cube(int r) { return static_cast<std::size_t>(r) * r * r; }

void check_shape(int resolution, int channels) {
    if (resolution < 2) throw InvalidArgument("grid resolution must be >= 2, got " + std::to_string(resolution));
    if (channels < 1) throw InvalidArgument("grid channels must be >= 1, got " + std::to_string(channels));
}

template <class Grid>
Grid symmetrize_grid(const Grid& grid) {
    Grid out = grid;
    const int r = grid.resolution();
    for (int c = 0; c < grid.channels(); ++c)
        for (int iz = 0; iz < r; ++iz)
            for (int iy = 0; iy < r; ++iy)
                for (int ix = 0; ix < r; ++ix)
                    out.VoxelGrid::at(c, ix, iy, iz) =
                        0.5 * (grid.VoxelGrid::at(c, ix, iy, iz) + grid.VoxelGrid::at(c, r - 1 - ix, iy, iz));
    return out;
}

}  // namespace

VoxelGrid::VoxelGrid(int resolution, int channels, double fill)
    : resolution_(resolution), channels_(channels) {
    check_shape(resolution, channels);
    cell_count_ = cube(resolution);
    values_.assign(cell_count_ * channels, fill);
}

VoxelGrid::VoxelGrid(int resolution, int channels, std::vector<double> values)
    : resolution_(resolution), channels_(channels), values_(std::move(values)) {
    check_shape(resolution, channels);
    cell_count_ = cube(resolution);
    if (values_.size() != cell_count_ * channels)
        throw DimensionMismatch("grid payload has " + std::to_string(values_.size()) + " values, expected " +
                                std::to_string(cell_count_ * channels));
}

OccupancyGrid::OccupancyGrid(int resolution, double fill) : VoxelGrid(resolution, 1, fill) { validate(); }

OccupancyGrid::OccupancyGrid(int resolution, std::vector<double> values)
    : VoxelGrid(resolution, 1, std::move(values)) {
    validate();
}

OccupancyGrid::OccupancyGrid(VoxelGrid grid) : VoxelGrid(std::move(grid)) {
    if (channels() != 1)
        throw InvalidArgument("occupancy grid must have one channel, got " + std::to_string(channels()));
    validate();
}

void OccupancyGrid::validate() const {
    const auto v = values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(v[i] >= 0.0 && v[i] <= 1.0)) {
            const int r = resolution();
            const auto ix = i % r, iy = (i / r) % r, iz = i / (static_cast<std::size_t>(r) * r);
            throw InvalidArgument("occupancy value " + std::to_string(v[i]) + " outside [0,1] at cell (" +
                                  std::to_string(ix) + "," + std::to_string(iy) + "," + std::to_string(iz) + ")");
        }
    }
}

FeatureGrid::FeatureGrid(int resolution, int channels, double fill) : VoxelGrid(resolution, channels, fill) {}

FeatureGrid::FeatureGrid(int resolution, int channels, std::vector<double> values)
    : VoxelGrid(resolution, channels, std::move(values)) {}

FeatureGrid::FeatureGrid(VoxelGrid grid) : VoxelGrid(std::move(grid)) {}

TrilinearStencil trilinear_stencil(int resolution, const Vec3& point) {
    TrilinearStencil s;
    s.cells.fill(-1);
    if (std::abs(point.x()) > 1.0 || std::abs(point.y()) > 1.0 || std::abs(point.z()) > 1.0) return s;

    const double half = 0.5 * resolution;
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int k = 0; k < 3; ++k) {
        const double u = (point[k] + 1.0) * half - 0.5;
        const double fl = std::floor(u);
        base[k] = static_cast<int>(fl);
        frac[k] = u - fl;
    }
    for (int corner = 0; corner < 8; ++corner) {
        const int dx = corner & 1, dy = (corner >> 1) & 1, dz = (corner >> 2) & 1;
        const int ix = base[0] + dx, iy = base[1] + dy, iz = base[2] + dz;
        const double wx = dx ? frac[0] : 1.0 - frac[0];
        const double wy = dy ? frac[1] : 1.0 - frac[1];
        const double wz = dz ? frac[2] : 1.0 - frac[2];
        if (ix < 0 || iy < 0 || iz < 0 || ix >= resolution || iy >= resolution || iz >= resolution) continue;
        s.cells[corner] = (static_cast<std::int64_t>(iz) * resolution + iy) * resolution + ix;
        s.weights[corner] = wx * wy * wz;
        s.weight_gradients[corner] = Vec3((dx ? 1.0 : -1.0) * half * wy * wz, (dy ? 1.0 : -1.0) * half * wx * wz,
                                          (dz ? 1.0 : -1.0) * half * wx * wy);
    }
    return s;
}

double trilinear_sample(const OccupancyGrid& grid, const Vec3& point) {
    const auto s = trilinear_stencil(grid.resolution(), point);
    const auto v = grid.values();
    double out = 0.0;
    for (int k = 0; k < 8; ++k)
        if (s.cells[k] >= 0) out += s.weights[k] * v[s.cells[k]];
    return out;
}

Eigen::VectorXd trilinear_sample(const FeatureGrid& grid, const Vec3& point) {
    return trilinear_sample_with_gradient(grid, point).value;
}

SampleWithGradient trilinear_sample_with_gradient(const VoxelGrid& grid, const Vec3& point) {
    const auto s = trilinear_stencil(grid.resolution(), point);
    SampleWithGradient out{Eigen::VectorXd::Zero(grid.channels()), Eigen::MatrixX3d::Zero(grid.channels(), 3)};
    for (int c = 0; c < grid.channels(); ++c) {
        const auto v = grid.channel(c);
        for (int k = 0; k < 8; ++k) {
            if (s.cells[k] < 0) continue;
            out.value[c] += s.weights[k] * v[s.cells[k]];
            out.d_point.row(c) += v[s.cells[k]] * s.weight_gradients[k].transpose();
        }
    }
    return out;
}

OccupancyGrid symmetrize(const OccupancyGrid& grid) { return symmetrize_grid(grid); }

FeatureGrid symmetrize(const FeatureGrid& grid) { return symmetrize_grid(grid); }

SemiImplicitVolume symmetrize(const SemiImplicitVolume& volume) {
    return {symmetrize(volume.occupancy), symmetrize(volume.feature)};
}

}  // namespace semimesh
