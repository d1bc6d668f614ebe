// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace semimesh::detail {

extern const int kMcEdgeTable[256];
extern const int kMcTriTable[256][16];

// Corner offsets (x, y, z) and the corner pair of each of the 12 cube edges.
inline constexpr int kMcCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1},
                                        {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
inline constexpr int kMcEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                       {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

}  // namespace semimesh::detail
