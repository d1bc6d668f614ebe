// SPDX-License-Identifier: Apache-2.0
#include "semimesh/zbuffer.hpp"

#include <algorithm>
#include <cmath>

namespace semimesh {

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct ProjectedFace {
    std::array<Vec2, 3> p;
    std::array<double, 3> inv_depth;
    bool valid = false;
};

ProjectedFace project_face(const TexturedMesh& mesh, const Camera& camera, int face) {
    ProjectedFace out;
    for (int k = 0; k < 3; ++k) {
        const auto proj = project(camera, mesh.vertices[mesh.faces[face][k]]);
        if (!proj.valid) return out;
        out.p[k] = proj.pixel;
        out.inv_depth[k] = 1.0 / proj.depth;
    }
    out.valid = true;
    return out;
}

}  // namespace

DepthBuffer rasterize_depth(const TexturedMesh& mesh, const Camera& camera) {
    DepthBuffer buf{camera.width, camera.height,
                    std::vector<double>(static_cast<std::size_t>(camera.width) * camera.height,
                                        std::numeric_limits<double>::infinity()),
                    std::vector<int>(static_cast<std::size_t>(camera.width) * camera.height, -1)};
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        const auto pf = project_face(mesh, camera, f);
        if (!pf.valid) continue;
        const double area = cross2(pf.p[1] - pf.p[0], pf.p[2] - pf.p[0]);
        if (std::abs(area) < 1e-14) continue;
        const double xmin = std::min({pf.p[0].x(), pf.p[1].x(), pf.p[2].x()});
        const double xmax = std::max({pf.p[0].x(), pf.p[1].x(), pf.p[2].x()});
        const double ymin = std::min({pf.p[0].y(), pf.p[1].y(), pf.p[2].y()});
        const double ymax = std::max({pf.p[0].y(), pf.p[1].y(), pf.p[2].y()});
        const int x0 = std::max(0, static_cast<int>(std::ceil(xmin - 0.5)));
        const int x1 = std::min(camera.width - 1, static_cast<int>(std::floor(xmax - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
        const int y1 = std::min(camera.height - 1, static_cast<int>(std::floor(ymax - 0.5)));
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const Vec2 q(x + 0.5, y + 0.5);
                const double b0 = cross2(pf.p[1] - q, pf.p[2] - q) / area;
                const double b1 = cross2(pf.p[2] - q, pf.p[0] - q) / area;
                const double b2 = 1.0 - b0 - b1;
                if (b0 < 0.0 || b1 < 0.0 || b2 < 0.0) continue;
                const double inv = b0 * pf.inv_depth[0] + b1 * pf.inv_depth[1] + b2 * pf.inv_depth[2];
                const double depth = 1.0 / inv;
                const auto idx = static_cast<std::size_t>(y) * camera.width + x;
                if (depth < buf.depth[idx]) {
                    buf.depth[idx] = depth;
                    buf.face[idx] = f;
                }
            }
        }
    }
    return buf;
}

double face_depth_at(const TexturedMesh& mesh, const Camera& camera, int face, const Vec2& position) {
    const auto pf = project_face(mesh, camera, face);
    const double inf = std::numeric_limits<double>::infinity();
    if (!pf.valid) return inf;
    const double area = cross2(pf.p[1] - pf.p[0], pf.p[2] - pf.p[0]);
    if (std::abs(area) < 1e-14) return inf;
    const double b0 = cross2(pf.p[1] - position, pf.p[2] - position) / area;
    const double b1 = cross2(pf.p[2] - position, pf.p[0] - position) / area;
    const double b2 = 1.0 - b0 - b1;
    const double inv = b0 * pf.inv_depth[0] + b1 * pf.inv_depth[1] + b2 * pf.inv_depth[2];
    return inv > 0.0 ? 1.0 / inv : inf;
}

}  // namespace semimesh
