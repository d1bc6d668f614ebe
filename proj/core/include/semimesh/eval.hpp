// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "semimesh/grid.hpp"
#include "semimesh/mesh.hpp"

namespace semimesh {

/// Cells with value >= threshold are occupied.
std::vector<std::uint8_t> binarize(const OccupancyGrid& grid, double threshold);

/// |A & B| / |A | B| of the binarized grids; 1 when both are empty.
double iou3d(const OccupancyGrid& a, double threshold_a, const OccupancyGrid& b, double threshold_b);

/// `count` points uniformly distributed over the surface (faces picked by area).
std::vector<Vec3> sample_surface(const TexturedMesh& mesh, std::size_t count, std::uint64_t seed);

struct FScore {
    double precision = 0.0;
    double recall = 0.0;
    double fscore = 0.0;
};

/// Precision / recall at distance `tau` and their harmonic mean.
FScore fscore(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, double tau);

/// Two voxel widths at evaluation resolution R.
inline double default_fscore_tau(int resolution) { return 2.0 * (2.0 / resolution); }
inline constexpr std::size_t kDefaultFscorePoints = 10000;

/// Rotation by `azimuth` about +y followed by `elevation` about +z.
Eigen::Matrix3d canonical_rotation(double azimuth, double elevation);

/// Nearest-cell resampling: out(c) = grid(rotation^T c), zero outside the grid.
OccupancyGrid rotate_grid(const OccupancyGrid& grid, const Eigen::Matrix3d& rotation);

struct Alignment {
    double azimuth = 0.0;
    double elevation = 0.0;
    double threshold = 0.5;
    double iou = 0.0;
};

/// Exhaustive search for the pose (azimuth, elevation) of `pred` relative to `gt` and the
/// binarization threshold of `pred`, maximizing IoU against `gt` binarized at 0.5.
/// Ties go to the smallest rotation angle, then the smallest threshold.
Alignment align_search(const OccupancyGrid& pred, const OccupancyGrid& gt, std::span<const double> azimuths,
                       std::span<const double> elevations, std::span<const double> thresholds);

/// Ray-parity voxelization: 1 where the cell center is inside the mesh.
///
/// Parity is taken along +x; +y and +z parities are computed as a consistency check and
/// NonWatertightError is thrown when they disagree on more than 0.1% of the cells.
OccupancyGrid voxelize(const TexturedMesh& mesh, int resolution);

}  // namespace semimesh
