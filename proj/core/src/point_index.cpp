// SPDX-License-Identifier: Apache-2.0
#include "semimesh/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "semimesh/errors.hpp"

namespace semimesh {

PointIndex::PointIndex(std::span<const Vec3> points, double cell_size)
    : points_(points.begin(), points.end()), cell_size_(cell_size) {
    if (!(cell_size > 0.0)) throw InvalidArgument("point index cell size must be positive");
    lo_.fill(std::numeric_limits<std::int64_t>::max());
    hi_.fill(std::numeric_limits<std::int64_t>::min());
    for (int i = 0; i < static_cast<int>(points_.size()); ++i) {
        const auto c = cell_of(points_[i]);
        for (int k = 0; k < 3; ++k) {
            lo_[k] = std::min(lo_[k], c[k]);
            hi_[k] = std::max(hi_[k], c[k]);
        }
        cells_[key(c[0], c[1], c[2])].push_back(i);
    }
}

std::array<std::int64_t, 3> PointIndex::cell_of(const Vec3& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_size_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_size_))};
}

PointIndex::Key PointIndex::key(std::int64_t x, std::int64_t y, std::int64_t z) {
    constexpr std::int64_t mask = (std::int64_t{1} << 21) - 1;
    return ((x & mask) << 42) | ((y & mask) << 21) | (z & mask);
}

int PointIndex::nearest(const Vec3& query) const {
    if (points_.empty()) throw InvalidArgument("nearest-neighbor query on an empty point set");
    const auto c = cell_of(query);
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    // Expand shells of cells until no unvisited cell can hold a closer point.
    const std::int64_t max_ring = std::max({hi_[0] - lo_[0], hi_[1] - lo_[1], hi_[2] - lo_[2]}) +
                                  std::max({std::abs(c[0] - lo_[0]), std::abs(c[1] - lo_[1]), std::abs(c[2] - lo_[2]),
                                            std::abs(c[0] - hi_[0]), std::abs(c[1] - hi_[1]), std::abs(c[2] - hi_[2])}) +
                                  1;
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
        if (best >= 0) {
            const double reach = (ring - 1) * cell_size_;
            if (reach > 0.0 && reach * reach > best_d2) break;
        }
        for (std::int64_t dz = -ring; dz <= ring; ++dz)
            for (std::int64_t dy = -ring; dy <= ring; ++dy)
                for (std::int64_t dx = -ring; dx <= ring; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
                    const auto it = cells_.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
                    if (it == cells_.end()) continue;
                    for (int i : it->second) {
                        const double d2 = (points_[i] - query).squaredNorm();
                        if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
                            best_d2 = d2;
                            best = i;
                        }
                    }
                }
    }
    return best;
}

bool PointIndex::any_within(const Vec3& query, double radius) const {
    const double r2 = radius * radius;
    const auto lo = cell_of(query - Vec3::Constant(radius));
    const auto hi = cell_of(query + Vec3::Constant(radius));
    for (auto z = lo[2]; z <= hi[2]; ++z)
        for (auto y = lo[1]; y <= hi[1]; ++y)
            for (auto x = lo[0]; x <= hi[0]; ++x) {
                const auto it = cells_.find(key(x, y, z));
                if (it == cells_.end()) continue;
                for (int i : it->second)
                    if ((points_[i] - query).squaredNorm() <= r2) return true;
            }
    return false;
}

}  // namespace semimesh
