// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "semimesh/grid.hpp"

namespace semimesh {

/// Uniform hash grid over a point set for exact nearest-neighbor and radius queries.
class PointIndex {
  public:
    PointIndex(std::span<const Vec3> points, double cell_size);

    /// Index of the nearest point (smallest index on ties). Requires a non-empty set.
    int nearest(const Vec3& query) const;

    bool any_within(const Vec3& query, double radius) const;

    std::size_t size() const { return points_.size(); }

  private:
    using Key = std::int64_t;
    std::array<std::int64_t, 3> cell_of(const Vec3& p) const;
    static Key key(std::int64_t x, std::int64_t y, std::int64_t z);

    std::vector<Vec3> points_;
    double cell_size_;
    std::array<std::int64_t, 3> lo_{}, hi_{};
    std::unordered_map<Key, std::vector<int>> cells_;
};

}  // namespace semimesh
