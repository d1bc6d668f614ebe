// SPDX-License-Identifier: Apache-2.0
#include "semimesh/volren.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"
#include "semimesh/errors.hpp"

namespace semimesh {

namespace {

struct RaySamples {
    std::vector<TrilinearStencil> occupancy_stencils;
    std::vector<TrilinearStencil> feature_stencils;
    std::vector<double> occupancy;
    Eigen::MatrixXd features;  // channels x samples
};

void check_volume(const SemiImplicitVolume& volume) {
    if (volume.occupancy.resolution() < 2 || volume.feature.resolution() < 2)
        throw InvalidArgument("volume grids are empty");
}

void sample_ray(const SemiImplicitVolume& volume, const Ray& ray, const RaySampleSpec& spec, RaySamples& out) {
    const int n = spec.samples;
    const int channels = volume.feature.channels();
    const bool shared = volume.occupancy.resolution() == volume.feature.resolution();
    out.occupancy_stencils.resize(n);
    out.feature_stencils.resize(shared ? 0 : n);
    out.occupancy.assign(n, 0.0);
    out.features.setZero(channels, n);
    const auto occ = volume.occupancy.values();
    for (int d = 0; d < n; ++d) {
        const Vec3 p = ray.origin + spec.depth(d) * ray.direction;
        auto& so = out.occupancy_stencils[d];
        so = trilinear_stencil(volume.occupancy.resolution(), p);
        const TrilinearStencil* sf = &so;
        if (!shared) {
            out.feature_stencils[d] = trilinear_stencil(volume.feature.resolution(), p);
            sf = &out.feature_stencils[d];
        }
        double o = 0.0;
        for (int k = 0; k < 8; ++k)
            if (so.cells[k] >= 0) o += so.weights[k] * occ[so.cells[k]];
        out.occupancy[d] = o;
        for (int c = 0; c < channels; ++c) {
            const auto f = volume.feature.channel(c);
            double v = 0.0;
            for (int k = 0; k < 8; ++k)
                if (sf->cells[k] >= 0) v += sf->weights[k] * f[sf->cells[k]];
            out.features(c, d) = v;
        }
    }
}

const TrilinearStencil& feature_stencil(const RaySamples& s, int d) {
    return s.feature_stencils.empty() ? s.occupancy_stencils[d] : s.feature_stencils[d];
}

}  // namespace

RaySampleSpec RaySampleSpec::for_camera(const Camera& camera, int samples) {
    const double r = std::sqrt(3.0);
    return {samples, camera.distance - r, camera.distance + r};
}

void RaySampleSpec::validate() const {
    if (samples < 1) throw InvalidArgument("ray sample count must be >= 1, got " + std::to_string(samples));
    if (!(near < far)) throw InvalidArgument("ray sample range requires near < far");
}

std::vector<double> ray_weights(std::span<const double> occupancies) {
    std::vector<double> w(occupancies.size());
    double transmittance = 1.0;
    for (std::size_t d = 0; d < occupancies.size(); ++d) {
        w[d] = occupancies[d] * transmittance;
        transmittance *= 1.0 - occupancies[d];
    }
    return w;
}

PixelSample render_pixel(const SemiImplicitVolume& volume, const Camera& camera, int px, int py,
                         const RaySampleSpec& spec) {
    check_volume(volume);
    spec.validate();
    if (px < 0 || py < 0 || px >= camera.width || py >= camera.height)
        throw InvalidArgument("pixel (" + std::to_string(px) + "," + std::to_string(py) + ") outside image");
    RaySamples s;
    sample_ray(volume, camera_ray(camera, px + 0.5, py + 0.5), spec, s);
    const auto w = ray_weights(s.occupancy);
    PixelSample out{Eigen::VectorXd::Zero(volume.feature.channels()), 0.0};
    for (int d = 0; d < spec.samples; ++d) {
        out.feature += w[d] * s.features.col(d);
        out.mask += w[d];
    }
    return out;
}

RenderTarget render_view(const SemiImplicitVolume& volume, const Camera& camera, const RaySampleSpec& spec) {
    check_volume(volume);
    camera.validate();
    spec.validate();
    if (volume.feature.channels() != 3)
        throw InvalidArgument("render_view needs a 3-channel feature grid, got " +
                              std::to_string(volume.feature.channels()));
    RenderTarget out{Image(camera.width, camera.height), Mask(camera.width, camera.height)};
    const int chunks = std::min(detail::kRowChunks, camera.height);
    detail::for_each_chunk(chunks, [&](int chunk) {
        RaySamples s;
        const auto [y0, y1] = detail::chunk_rows(chunk, chunks, camera.height);
        for (int py = y0; py < y1; ++py) {
            for (int px = 0; px < camera.width; ++px) {
                sample_ray(volume, camera_ray(camera, px + 0.5, py + 0.5), spec, s);
                const auto w = ray_weights(s.occupancy);
                Vec3 color = Vec3::Zero();
                double mask = 0.0;
                for (int d = 0; d < spec.samples; ++d) {
                    color += w[d] * s.features.col(d);
                    mask += w[d];
                }
                out.image.set_pixel(px, py, color);
                out.mask.at(px, py) = mask;
            }
        }
    });
    return out;
}

VolumeGradient render_view_backward(const SemiImplicitVolume& volume, const Camera& camera,
                                    const RaySampleSpec& spec, const Image& d_image, const Mask& d_mask) {
    check_volume(volume);
    camera.validate();
    spec.validate();
    if (volume.feature.channels() != 3)
        throw InvalidArgument("render_view_backward needs a 3-channel feature grid");
    if (d_image.width() != camera.width || d_image.height() != camera.height || d_mask.width() != camera.width ||
        d_mask.height() != camera.height)
        throw DimensionMismatch("cotangent size does not match the camera image size");

    const int channels = volume.feature.channels();
    const int chunks = std::min(detail::kRowChunks, camera.height);
    std::vector<VolumeGradient> partial(chunks);

    detail::for_each_chunk(chunks, [&](int chunk) {
        VoxelGrid d_occ(volume.occupancy.resolution(), 1);
        VoxelGrid d_feat(volume.feature.resolution(), channels);
        auto g_occ = d_occ.values();
        RaySamples s;
        const int n = spec.samples;
        std::vector<double> transmittance(n), weights(n), adjoint(n);
        const auto [y0, y1] = detail::chunk_rows(chunk, chunks, camera.height);
        for (int py = y0; py < y1; ++py) {
            for (int px = 0; px < camera.width; ++px) {
                const Vec3 g_rgb = d_image.pixel(px, py);
                const double g_mask = d_mask.at(px, py);
                if (g_rgb.isZero(0.0) && g_mask == 0.0) continue;
                sample_ray(volume, camera_ray(camera, px + 0.5, py + 0.5), spec, s);

                double t = 1.0;
                for (int d = 0; d < n; ++d) {
                    transmittance[d] = t;
                    weights[d] = s.occupancy[d] * t;
                    t *= 1.0 - s.occupancy[d];
                    // dL/dw_d
                    adjoint[d] = g_mask + g_rgb.dot(s.features.col(d));
                }
                // dL/do_d = T_d (a_d - R_d) with R_d = a_{d+1} o_{d+1} + (1 - o_{d+1}) R_{d+1}.
                double behind = 0.0;
                for (int d = n - 1; d >= 0; --d) {
                    const double g_o = transmittance[d] * (adjoint[d] - behind);
                    behind = adjoint[d] * s.occupancy[d] + (1.0 - s.occupancy[d]) * behind;
                    const auto& so = s.occupancy_stencils[d];
                    for (int k = 0; k < 8; ++k)
                        if (so.cells[k] >= 0) g_occ[so.cells[k]] += so.weights[k] * g_o;
                    if (weights[d] == 0.0) continue;
                    const auto& sf = feature_stencil(s, d);
                    for (int c = 0; c < channels; ++c) {
                        const double g_f = weights[d] * g_rgb[c];
                        auto gf = d_feat.channel(c);
                        for (int k = 0; k < 8; ++k)
                            if (sf.cells[k] >= 0) gf[sf.cells[k]] += sf.weights[k] * g_f;
                    }
                }
            }
        }
        partial[chunk] = {std::move(d_occ), std::move(d_feat)};
    });

    VolumeGradient out{VoxelGrid(volume.occupancy.resolution(), 1), VoxelGrid(volume.feature.resolution(), channels)};
    for (const auto& p : partial) {
        auto o = out.d_occupancy.values();
        auto f = out.d_feature.values();
        const auto po = p.d_occupancy.values();
        const auto pf = p.d_feature.values();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += po[i];
        for (std::size_t i = 0; i < f.size(); ++i) f[i] += pf[i];
    }
    return out;
}

}  // namespace semimesh
