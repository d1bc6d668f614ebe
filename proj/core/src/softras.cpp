// SPDX-License-Identifier: Apache-2.0
#include "semimesh/softras.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"
#include "semimesh/errors.hpp"
#include "softras_kernel.hpp"

namespace semimesh {

namespace {

using detail::FaceJet;
using detail::Point2;
using detail::ProjectionJet;

// Faces farther than sqrt(kCoverageCutoff * sigma) outside a pixel have coverage below
// sigmoid(-30) ~ 1e-13. They are not binned, and binned faces below that coverage are
// dropped too, so the softmax normalizer stays bounded away from zero.
constexpr double kCoverageCutoff = 30.0;
const double kMinCoverage = 1.0 / (1.0 + std::exp(kCoverageCutoff));
constexpr double kNearPlane = 1e-6;

struct ProjectedVertex {
    double x = 0.0, y = 0.0, inv_depth = 0.0;
    bool valid = false;
};

std::vector<ProjectedVertex> project_vertices(const TexturedMesh& mesh, const Camera& camera) {
    std::vector<ProjectedVertex> out(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& v = mesh.vertices[i];
        const auto p = detail::project_normalized<double>({v.x(), v.y(), v.z()}, camera.azimuth, camera.elevation, camera);
        out[i] = {p[0], p[1], p[2], p[2] > 0.0 && 1.0 / p[2] > kNearPlane};
    }
    return out;
}

double pixel_scale(const Camera& camera) { return 2.0 / std::max(camera.width, camera.height); }

Vec2 pixel_center_normalized(const Camera& camera, int x, int y) {
    return to_normalized(camera, Vec2(x + 0.5, y + 0.5));
}

/// Faces whose cutoff-expanded bounding box contains each pixel center, in face order.
std::vector<std::vector<int>> bin_faces(const TexturedMesh& mesh, const Camera& camera,
                                        const std::vector<ProjectedVertex>& proj, double sigma) {
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(camera.width) * camera.height);
    const double margin = std::sqrt(kCoverageCutoff * sigma);
    const double s = pixel_scale(camera);
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        const auto& face = mesh.faces[f];
        const auto &a = proj[face[0]], &b = proj[face[1]], &c = proj[face[2]];
        if (!a.valid || !b.valid || !c.valid) continue;
        const double xmin = std::min({a.x, b.x, c.x}) - margin, xmax = std::max({a.x, b.x, c.x}) + margin;
        const double ymin = std::min({a.y, b.y, c.y}) - margin, ymax = std::max({a.y, b.y, c.y}) + margin;
        const int x0 = std::max(0, static_cast<int>(std::ceil(xmin / s + 0.5 * camera.width - 0.5)));
        const int x1 = std::min(camera.width - 1, static_cast<int>(std::floor(xmax / s + 0.5 * camera.width - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(ymin / s + 0.5 * camera.height - 0.5)));
        const int y1 = std::min(camera.height - 1, static_cast<int>(std::floor(ymax / s + 0.5 * camera.height - 0.5)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) bins[static_cast<std::size_t>(y) * camera.width + x].push_back(f);
    }
    return bins;
}

template <class T>
std::array<Point2<T>, 3> face_points(const std::array<ProjectedVertex, 3>& v);

template <>
std::array<Point2<double>, 3> face_points(const std::array<ProjectedVertex, 3>& v) {
    return {Point2<double>{v[0].x, v[0].y}, Point2<double>{v[1].x, v[1].y}, Point2<double>{v[2].x, v[2].y}};
}

template <>
std::array<Point2<FaceJet>, 3> face_points(const std::array<ProjectedVertex, 3>& v) {
    std::array<Point2<FaceJet>, 3> out;
    for (int k = 0; k < 3; ++k) out[k] = {FaceJet(v[k].x, 9, 3 * k), FaceJet(v[k].y, 9, 3 * k + 1)};
    return out;
}

std::array<ProjectedVertex, 3> face_vertices(const TexturedMesh& mesh, const std::vector<ProjectedVertex>& proj,
                                             int f) {
    const auto& face = mesh.faces[f];
    return {proj[face[0]], proj[face[1]], proj[face[2]]};
}

/// Per-pixel forward state shared by the forward and backward passes.
struct PixelState {
    std::vector<double> coverage, inv_depth, softmax;  // softmax = exp((z - zmax) / gamma)
    std::vector<Vec3> color;
    std::vector<std::array<double, 3>> bary;
    double mask = 0.0;
    double normalizer = 0.0;  // sum_j D_j softmax_j
    Vec3 blend = Vec3::Zero();  // softmax-weighted face color, background when no face
    Vec3 rgb = Vec3::Zero();
};

void shade_pixel(const TexturedMesh& mesh, const std::vector<ProjectedVertex>& proj, const std::vector<int>& faces,
                 const Vec2& point, const SoftRasterConfig& config, PixelState& st) {
    const std::size_t n = faces.size();
    st.coverage.resize(n);
    st.inv_depth.resize(n);
    st.softmax.resize(n);
    st.color.resize(n);
    st.bary.resize(n);
    double miss = 1.0;
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const auto fv = face_vertices(mesh, proj, faces[j]);
        const auto s = detail::face_kernel<double>(face_points<double>(fv),
                                                    {fv[0].inv_depth, fv[1].inv_depth, fv[2].inv_depth}, point,
                                                    config.sigma);
        st.coverage[j] = s.coverage < kMinCoverage ? 0.0 : s.coverage;
        st.inv_depth[j] = s.inv_depth;
        st.bary[j] = s.bary;
        const auto& face = mesh.faces[faces[j]];
        st.color[j] = s.bary[0] * mesh.colors[face[0]] + s.bary[1] * mesh.colors[face[1]] +
                      s.bary[2] * mesh.colors[face[2]];
        miss *= 1.0 - st.coverage[j];
        if (st.coverage[j] > 0.0) zmax = std::max(zmax, s.inv_depth);
    }
    st.mask = 1.0 - miss;
    st.normalizer = 0.0;
    Vec3 weighted = Vec3::Zero();
    for (std::size_t j = 0; j < n; ++j) {
        st.softmax[j] = st.coverage[j] > 0.0 ? std::exp((st.inv_depth[j] - zmax) / config.gamma) : 0.0;
        const double e = st.coverage[j] * st.softmax[j];
        st.normalizer += e;
        weighted += e * st.color[j];
    }
    st.blend = st.normalizer > 0.0 ? Vec3(weighted / st.normalizer) : config.background;
    st.rgb = st.mask * st.blend + (1.0 - st.mask) * config.background;
}

void check_mesh(const TexturedMesh& mesh) {
    mesh.validate();
    if (mesh.colors.size() != mesh.vertices.size())
        throw InvalidArgument("soft rasterization needs one color per vertex");
}

}  // namespace

void SoftRasterConfig::validate() const {
    if (!(sigma > 0.0)) throw InvalidArgument("soft raster sigma must be positive, got " + std::to_string(sigma));
    if (!(gamma > 0.0)) throw InvalidArgument("soft raster gamma must be positive, got " + std::to_string(gamma));
}

double face_coverage(const Triangle2& triangle, const Vec2& point, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("coverage sigma must be positive");
    const std::array<Point2<double>, 3> p{Point2<double>{triangle.a.x(), triangle.a.y()},
                                          Point2<double>{triangle.b.x(), triangle.b.y()},
                                          Point2<double>{triangle.c.x(), triangle.c.y()}};
    return detail::face_kernel<double>(p, {1.0, 1.0, 1.0}, point, sigma).coverage;
}

Vec2 to_normalized(const Camera& camera, const Vec2& pixel) {
    return (pixel - Vec2(0.5 * camera.width, 0.5 * camera.height)) * pixel_scale(camera);
}

RenderTarget rasterize(const TexturedMesh& mesh, const Camera& camera, const SoftRasterConfig& config) {
    check_mesh(mesh);
    camera.validate();
    config.validate();
    RenderTarget out{Image(camera.width, camera.height), Mask(camera.width, camera.height)};
    const auto proj = project_vertices(mesh, camera);
    const auto bins = bin_faces(mesh, camera, proj, config.sigma);
    const int chunks = std::min(detail::kRowChunks, camera.height);
    detail::for_each_chunk(chunks, [&](int chunk) {
        PixelState st;
        const auto [y0, y1] = detail::chunk_rows(chunk, chunks, camera.height);
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < camera.width; ++x) {
                const auto& faces = bins[static_cast<std::size_t>(y) * camera.width + x];
                shade_pixel(mesh, proj, faces, pixel_center_normalized(camera, x, y), config, st);
                out.image.set_pixel(x, y, st.rgb);
                out.mask.at(x, y) = st.mask;
            }
        }
    });
    return out;
}

MeshGradient rasterize_backward(const TexturedMesh& mesh, const Camera& camera, const SoftRasterConfig& config,
                                const Image& d_image, const Mask& d_mask) {
    check_mesh(mesh);
    camera.validate();
    config.validate();
    if (d_image.width() != camera.width || d_image.height() != camera.height || d_mask.width() != camera.width ||
        d_mask.height() != camera.height)
        throw DimensionMismatch("cotangent size does not match the camera image size");

    const std::size_t nv = mesh.vertices.size();
    const auto proj = project_vertices(mesh, camera);
    const auto bins = bin_faces(mesh, camera, proj, config.sigma);
    const int chunks = std::min(detail::kRowChunks, camera.height);

    struct Partial {
        std::vector<Vec3> d_proj;  // d/d(normalized x, normalized y, inverse depth)
        std::vector<Vec3> d_colors;
    };
    std::vector<Partial> partial(chunks);

    detail::for_each_chunk(chunks, [&](int chunk) {
        Partial acc{std::vector<Vec3>(nv, Vec3::Zero()), std::vector<Vec3>(nv, Vec3::Zero())};
        PixelState st;
        std::vector<double> prefix, suffix;
        const auto [y0, y1] = detail::chunk_rows(chunk, chunks, camera.height);
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < camera.width; ++x) {
                const auto& faces = bins[static_cast<std::size_t>(y) * camera.width + x];
                if (faces.empty()) continue;
                const Vec3 g_rgb = d_image.pixel(x, y);
                const double g_mask_in = d_mask.at(x, y);
                if (g_rgb.isZero(0.0) && g_mask_in == 0.0) continue;
                const Vec2 point = pixel_center_normalized(camera, x, y);
                shade_pixel(mesh, proj, faces, point, config, st);

                const std::size_t n = faces.size();
                // d mask / d D_j = prod_{k != j} (1 - D_k)
                prefix.assign(n + 1, 1.0);
                suffix.assign(n + 1, 1.0);
                for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * (1.0 - st.coverage[j]);
                for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * (1.0 - st.coverage[j]);

                const bool blended = st.normalizer > 0.0;
                const double g_mask = g_mask_in + (blended ? g_rgb.dot(st.blend - config.background) : 0.0);
                const Vec3 g_blend = st.mask * g_rgb;

                for (std::size_t j = 0; j < n; ++j) {
                    if (st.coverage[j] == 0.0) continue;
                    double g_cov = g_mask * prefix[j] * suffix[j + 1];
                    double g_z = 0.0;
                    Vec3 g_color = Vec3::Zero();
                    if (blended && st.softmax[j] > 0.0) {
                        const double w = st.coverage[j] * st.softmax[j] / st.normalizer;
                        const double diff = g_blend.dot(st.color[j] - st.blend);
                        g_cov += st.softmax[j] / st.normalizer * diff;
                        g_z = w * diff / config.gamma;
                        g_color = w * g_blend;
                    }
                    const auto& face = mesh.faces[faces[j]];
                    std::array<double, 3> g_bary{};
                    for (int k = 0; k < 3; ++k) {
                        acc.d_colors[face[k]] += st.bary[j][k] * g_color;
                        g_bary[k] = g_color.dot(mesh.colors[face[k]]);
                    }
                    if (g_cov == 0.0 && g_z == 0.0 && g_bary == std::array<double, 3>{}) continue;

                    const auto fv = face_vertices(mesh, proj, faces[j]);
                    const std::array<FaceJet, 3> inv{FaceJet(fv[0].inv_depth, 9, 2), FaceJet(fv[1].inv_depth, 9, 5),
                                                     FaceJet(fv[2].inv_depth, 9, 8)};
                    const auto s = detail::face_kernel<FaceJet>(face_points<FaceJet>(fv), inv, point, config.sigma);
                    Eigen::Matrix<double, 9, 1> g = g_cov * s.coverage.derivatives() + g_z * s.inv_depth.derivatives();
                    for (int k = 0; k < 3; ++k) g += g_bary[k] * s.bary[k].derivatives();
                    for (int k = 0; k < 3; ++k) acc.d_proj[face[k]] += g.segment<3>(3 * k);
                }
            }
        }
        partial[chunk] = std::move(acc);
    });

    std::vector<Vec3> d_proj(nv, Vec3::Zero());
    MeshGradient out{std::vector<Vec3>(nv, Vec3::Zero()), std::vector<Vec3>(nv, Vec3::Zero()), 0.0, 0.0};
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < nv; ++i) {
            d_proj[i] += p.d_proj[i];
            out.d_colors[i] += p.d_colors[i];
        }
    }
    // Chain through the projection.
    const ProjectionJet az(camera.azimuth, 5, 3), el(camera.elevation, 5, 4);
    for (std::size_t i = 0; i < nv; ++i) {
        if (d_proj[i].isZero(0.0)) continue;
        const auto& v = mesh.vertices[i];
        const auto p = detail::project_normalized<ProjectionJet>(
            {ProjectionJet(v.x(), 5, 0), ProjectionJet(v.y(), 5, 1), ProjectionJet(v.z(), 5, 2)}, az, el, camera);
        const Eigen::Matrix<double, 5, 1> g =
            d_proj[i][0] * p[0].derivatives() + d_proj[i][1] * p[1].derivatives() + d_proj[i][2] * p[2].derivatives();
        out.d_vertices[i] = g.head<3>();
        out.d_azimuth += g[3];
        out.d_elevation += g[4];
    }
    return out;
}

}  // namespace semimesh
