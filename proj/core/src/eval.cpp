// SPDX-License-Identifier: Apache-2.0
#include "semimesh/eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Geometry>

#include "semimesh/errors.hpp"
#include "semimesh/point_index.hpp"

namespace semimesh {

std::vector<std::uint8_t> binarize(const OccupancyGrid& grid, double threshold) {
    const auto v = grid.values();
    std::vector<std::uint8_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] >= threshold ? 1 : 0;
    return out;
}

namespace {

double iou_of(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        inter += a[i] & b[i];
        uni += a[i] | b[i];
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double rotation_angle(const Eigen::Matrix3d& r) {
    return std::acos(std::clamp(0.5 * (r.trace() - 1.0), -1.0, 1.0));
}

int nearest_cell(double coordinate, int resolution) {
    return static_cast<int>(std::floor((coordinate + 1.0) * 0.5 * resolution));
}

}  // namespace

double iou3d(const OccupancyGrid& a, double threshold_a, const OccupancyGrid& b, double threshold_b) {
    if (a.resolution() != b.resolution())
        throw DimensionMismatch("iou3d needs equal resolutions, got " + std::to_string(a.resolution()) + " and " +
                                std::to_string(b.resolution()));
    return iou_of(binarize(a, threshold_a), binarize(b, threshold_b));
}

std::vector<Vec3> sample_surface(const TexturedMesh& mesh, std::size_t count, std::uint64_t seed) {
    if (mesh.empty()) throw EmptyMeshError("cannot sample the surface of an empty mesh");
    if (count < 1) throw InvalidArgument("surface sample count must be >= 1");
    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        total += face_area(mesh, f);
        cumulative[f] = total;
    }
    if (!(total > 0.0)) throw EmptyMeshError("mesh has zero total surface area");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<Vec3> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double pick = uniform(rng) * total;
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
        const auto f = std::min<std::size_t>(it - cumulative.begin(), mesh.faces.size() - 1);
        const double s = std::sqrt(uniform(rng));
        const double t = uniform(rng);
        const auto& face = mesh.faces[f];
        points.push_back((1.0 - s) * mesh.vertices[face[0]] + s * (1.0 - t) * mesh.vertices[face[1]] +
                         s * t * mesh.vertices[face[2]]);
    }
    return points;
}

FScore fscore(std::span<const Vec3> predicted, std::span<const Vec3> ground_truth, double tau) {
    if (predicted.empty() || ground_truth.empty()) throw InvalidArgument("fscore needs two non-empty point clouds");
    if (!(tau > 0.0)) throw InvalidArgument("fscore threshold must be positive");
    const PointIndex pred_index(predicted, tau);
    const PointIndex gt_index(ground_truth, tau);
    std::size_t matched_pred = 0, matched_gt = 0;
    for (const auto& p : predicted) matched_pred += gt_index.any_within(p, tau) ? 1 : 0;
    for (const auto& g : ground_truth) matched_gt += pred_index.any_within(g, tau) ? 1 : 0;
    FScore out;
    out.precision = static_cast<double>(matched_pred) / static_cast<double>(predicted.size());
    out.recall = static_cast<double>(matched_gt) / static_cast<double>(ground_truth.size());
    const double sum = out.precision + out.recall;
    out.fscore = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
    return out;
}

Eigen::Matrix3d canonical_rotation(double azimuth, double elevation) {
    return (Eigen::AngleAxisd(elevation, Vec3::UnitZ()) * Eigen::AngleAxisd(azimuth, Vec3::UnitY()))
        .toRotationMatrix();
}

OccupancyGrid rotate_grid(const OccupancyGrid& grid, const Eigen::Matrix3d& rotation) {
    const int r = grid.resolution();
    OccupancyGrid out(r);
    const Eigen::Matrix3d inverse = rotation.transpose();
    for (int iz = 0; iz < r; ++iz)
        for (int iy = 0; iy < r; ++iy)
            for (int ix = 0; ix < r; ++ix) {
                const Vec3 src = inverse * grid.cell_center(ix, iy, iz);
                const int sx = nearest_cell(src.x(), r), sy = nearest_cell(src.y(), r), sz = nearest_cell(src.z(), r);
                if (sx < 0 || sy < 0 || sz < 0 || sx >= r || sy >= r || sz >= r) continue;
                out.at(ix, iy, iz) = grid.at(sx, sy, sz);
            }
    return out;
}

Alignment align_search(const OccupancyGrid& pred, const OccupancyGrid& gt, std::span<const double> azimuths,
                       std::span<const double> elevations, std::span<const double> thresholds) {
    if (pred.resolution() != gt.resolution()) throw DimensionMismatch("align_search needs equal resolutions");
    if (azimuths.empty() || elevations.empty() || thresholds.empty())
        throw InvalidArgument("align_search needs non-empty azimuth, elevation and threshold lists");
    const auto gt_bits = binarize(gt, 0.5);
    Alignment best;
    double best_angle = std::numeric_limits<double>::infinity();
    bool have = false;
    for (double el : elevations) {
        for (double az : azimuths) {
            const Eigen::Matrix3d rot = canonical_rotation(az, el);
            // pred ~ gt rotated by rot, so undo it: aligned(c) = pred(rot c).
            const auto aligned = rotate_grid(pred, rot.transpose());
            const double angle = rotation_angle(rot);
            for (double th : thresholds) {
                const double iou = iou_of(binarize(aligned, th), gt_bits);
                bool better = !have || iou > best.iou;
                if (have && iou == best.iou) {
                    if (angle < best_angle - 1e-12)
                        better = true;
                    else if (std::abs(angle - best_angle) <= 1e-12 && th < best.threshold)
                        better = true;
                }
                if (better) {
                    best = {az, el, th, iou};
                    best_angle = angle;
                    have = true;
                }
            }
        }
    }
    return best;
}

namespace {

// Fixed sub-voxel offsets keep axis-parallel rays off mesh edges and vertices that sit on
// round coordinates.
constexpr double kRayJitterB = 1.2345678e-7;
constexpr double kRayJitterC = 2.7182818e-7;

/// Parity occupancy using rays along `axis`; the other two axes index the ray.
std::vector<std::uint8_t> parity_along(const TexturedMesh& mesh, int resolution, int axis) {
    const int ab = (axis + 1) % 3, ac = (axis + 2) % 3;
    const int r = resolution;
    auto coord = [r](int i) { return 2.0 * (i + 0.5) / r - 1.0; };
    std::vector<std::vector<double>> hits(static_cast<std::size_t>(r) * r);

    for (const auto& f : mesh.faces) {
        const Vec3 &p0 = mesh.vertices[f[0]], &p1 = mesh.vertices[f[1]], &p2 = mesh.vertices[f[2]];
        const double bmin = std::min({p0[ab], p1[ab], p2[ab]}), bmax = std::max({p0[ab], p1[ab], p2[ab]});
        const double cmin = std::min({p0[ac], p1[ac], p2[ac]}), cmax = std::max({p0[ac], p1[ac], p2[ac]});
        const int i0 = std::max(0, static_cast<int>(std::ceil((bmin + 1.0) * 0.5 * r - 0.5 - 1e-6)));
        const int i1 = std::min(r - 1, static_cast<int>(std::floor((bmax + 1.0) * 0.5 * r - 0.5 + 1e-6)));
        const int j0 = std::max(0, static_cast<int>(std::ceil((cmin + 1.0) * 0.5 * r - 0.5 - 1e-6)));
        const int j1 = std::min(r - 1, static_cast<int>(std::floor((cmax + 1.0) * 0.5 * r - 0.5 + 1e-6)));
        const double area = (p1[ab] - p0[ab]) * (p2[ac] - p0[ac]) - (p1[ac] - p0[ac]) * (p2[ab] - p0[ab]);
        if (area == 0.0) continue;
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const double qb = coord(i) + kRayJitterB, qc = coord(j) + kRayJitterC;
                const double l0 = ((p1[ab] - qb) * (p2[ac] - qc) - (p1[ac] - qc) * (p2[ab] - qb)) / area;
                const double l1 = ((p2[ab] - qb) * (p0[ac] - qc) - (p2[ac] - qc) * (p0[ab] - qb)) / area;
                const double l2 = 1.0 - l0 - l1;
                if (l0 < 0.0 || l1 < 0.0 || l2 < 0.0) continue;
                hits[static_cast<std::size_t>(j) * r + i].push_back(l0 * p0[axis] + l1 * p1[axis] + l2 * p2[axis]);
            }
        }
    }

    std::vector<std::uint8_t> inside(static_cast<std::size_t>(r) * r * r, 0);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < r; ++i) {
            auto& line = hits[static_cast<std::size_t>(j) * r + i];
            if (line.empty()) continue;
            std::sort(line.begin(), line.end());
            for (int k = 0; k < r; ++k) {
                // Crossings on the positive side of the cell center.
                const auto beyond = line.end() - std::upper_bound(line.begin(), line.end(), coord(k));
                if (beyond % 2 == 0) continue;
                std::array<int, 3> cell{};
                cell[axis] = k;
                cell[ab] = i;
                cell[ac] = j;
                inside[(static_cast<std::size_t>(cell[2]) * r + cell[1]) * r + cell[0]] = 1;
            }
        }
    }
    return inside;
}

}  // namespace

OccupancyGrid voxelize(const TexturedMesh& mesh, int resolution) {
    mesh.validate();
    if (resolution < 2) throw InvalidArgument("voxel resolution must be >= 2");
    const auto x = parity_along(mesh, resolution, 0);
    const auto y = parity_along(mesh, resolution, 1);
    const auto z = parity_along(mesh, resolution, 2);
    std::size_t disagree = 0;
    for (std::size_t i = 0; i < x.size(); ++i) disagree += (x[i] != y[i] || x[i] != z[i]) ? 1 : 0;
    if (static_cast<double>(disagree) > 1e-3 * static_cast<double>(x.size()))
        throw NonWatertightError("ray parity disagrees across axes on " + std::to_string(disagree) + " of " +
                                 std::to_string(x.size()) + " cells; mesh is not watertight");
    OccupancyGrid out(resolution);
    auto v = out.values();
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = x[i];
    return out;
}

}  // namespace semimesh
