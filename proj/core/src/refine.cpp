// SPDX-License-Identifier: Apache-2.0
#include "semimesh/refine.hpp"

#include <cmath>
#include <string>

#include "semimesh/errors.hpp"
#include "semimesh/losses.hpp"
#include "semimesh/meshex.hpp"

namespace semimesh {

namespace {

constexpr double kElevationLimit = 0.5 * std::numbers::pi - 1e-3;

std::size_t parameter_count(const TexturedMesh& mesh, const RefineConfig& config) {
    return 3 * mesh.vertices.size() + (config.optimize_pose ? 2 : 0);
}

}  // namespace

void RefineConfig::validate() const {
    if (outer_iterations < 1)
        throw InvalidArgument("outer iteration count must be >= 1, got " + std::to_string(outer_iterations));
    if (inner_steps < 0) throw InvalidArgument("inner step count must be >= 0, got " + std::to_string(inner_steps));
    if (!(step_size > 0.0)) throw InvalidArgument("step size must be positive");
    for (double w : {lambda_rgb, lambda_mask, lambda_disp, lambda_lap})
        if (!(w >= 0.0)) throw InvalidArgument("loss weights must be non-negative");
    raster.validate();
}

AdamOptimizer::AdamOptimizer(std::size_t size, double step_size, double beta1, double beta2, double epsilon)
    : step_size_(step_size), beta1_(beta1), beta2_(beta2), epsilon_(epsilon), first_(size, 0.0), second_(size, 0.0) {
    if (!(step_size > 0.0)) throw InvalidArgument("step size must be positive");
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> gradients) {
    if (params.size() != first_.size() || gradients.size() != first_.size())
        throw DimensionMismatch("optimizer expects " + std::to_string(first_.size()) + " parameters");
    for (std::size_t i = 0; i < gradients.size(); ++i)
        if (!std::isfinite(gradients[i]))
            throw NonFiniteError("non-finite gradient at parameter " + std::to_string(i));
    ++iterations_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(iterations_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(iterations_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        first_[i] = beta1_ * first_[i] + (1.0 - beta1_) * gradients[i];
        second_[i] = beta2_ * second_[i] + (1.0 - beta2_) * gradients[i] * gradients[i];
        params[i] -= step_size_ * (first_[i] / c1) / (std::sqrt(second_[i] / c2) + epsilon_);
    }
}

Refiner::Refiner(TexturedMesh initial, Camera camera, Image target_image, Mask target_mask, RefineConfig config)
    : initial_(std::move(initial)),
      camera_(camera),
      target_image_(std::move(target_image)),
      target_mask_(std::move(target_mask)),
      config_(config),
      optimizer_(parameter_count(initial_, config), config.step_size) {
    config_.validate();
    camera_.validate();
    initial_.validate();
    if (initial_.empty()) throw EmptyMeshError("refinement needs a non-empty initial mesh");
    if (target_image_.width() != camera_.width || target_image_.height() != camera_.height ||
        target_mask_.width() != camera_.width || target_mask_.height() != camera_.height)
        throw DimensionMismatch("target image and mask must match the camera image size");
    colors_ = initial_.colors.empty() ? std::vector<Vec3>(initial_.vertices.size(), Vec3::Constant(kFallbackGray))
                                      : initial_.colors;
    displacement_.assign(initial_.vertices.size(), Vec3::Zero());
    neighbors_ = vertex_neighbors(initial_);
}

TexturedMesh Refiner::current_mesh() const {
    TexturedMesh mesh;
    mesh.faces = initial_.faces;
    mesh.vertices.resize(initial_.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) mesh.vertices[i] = initial_.vertices[i] + displacement_[i];
    mesh.colors = colors_;
    return mesh;
}

Refiner::Evaluation Refiner::evaluate_with_gradient(bool need_gradient) const {
    const TexturedMesh mesh = current_mesh();
    const auto render = rasterize(mesh, camera_, config_.raster);
    const auto rgb = config_.rgb_foreground_only ? l_rgb(render.image, target_image_, target_mask_)
                                                 : l_rgb(render.image, target_image_);
    const auto mask = l_mask(render.mask, target_mask_);
    const auto disp = l_disp(displacement_);
    const auto lap = l_laplacian(mesh.vertices, neighbors_);

    Evaluation ev;
    ev.record = {steps_taken_, rgb.value, mask.value, disp.value, lap.value,
                 config_.lambda_rgb * rgb.value + config_.lambda_mask * mask.value +
                     config_.lambda_disp * disp.value + config_.lambda_lap * lap.value};
    if (!std::isfinite(ev.record.total))
        throw NonFiniteError("refinement objective is not finite at step " + std::to_string(steps_taken_) +
                             " (rgb " + std::to_string(rgb.value) + ", mask " + std::to_string(mask.value) +
                             ", disp " + std::to_string(disp.value) + ", lap " + std::to_string(lap.value) + ")");
    if (!need_gradient) return ev;

    Image d_image = rgb.gradient;
    for (double& v : d_image.values()) v *= config_.lambda_rgb;
    Mask d_mask = mask.gradient;
    for (double& v : d_mask.values()) v *= config_.lambda_mask;
    const auto grad = rasterize_backward(mesh, camera_, config_.raster, d_image, d_mask);

    ev.d_vertices.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        ev.d_vertices[i] =
            grad.d_vertices[i] + config_.lambda_disp * disp.gradient[i] + config_.lambda_lap * lap.gradient[i];
    ev.d_azimuth = grad.d_azimuth;
    ev.d_elevation = grad.d_elevation;
    return ev;
}

LossRecord Refiner::evaluate() const { return evaluate_with_gradient(false).record; }

LossRecord Refiner::step() {
    const auto ev = evaluate_with_gradient(true);
    const std::size_t nv = displacement_.size();
    std::vector<double> params(optimizer_.size()), grads(optimizer_.size());
    for (std::size_t i = 0; i < nv; ++i)
        for (int k = 0; k < 3; ++k) {
            params[3 * i + k] = displacement_[i][k];
            grads[3 * i + k] = ev.d_vertices[i][k];
        }
    // Pose is optimized as arc length rho * angle so one shared step size moves the camera
    // center and the vertices by comparable canonical distances.
    const double rho = camera_.distance;
    if (config_.optimize_pose) {
        params[3 * nv] = rho * camera_.azimuth;
        params[3 * nv + 1] = rho * camera_.elevation;
        grads[3 * nv] = ev.d_azimuth / rho;
        grads[3 * nv + 1] = ev.d_elevation / rho;
    }
    optimizer_.step(params, grads);
    for (std::size_t i = 0; i < nv; ++i)
        for (int k = 0; k < 3; ++k) displacement_[i][k] = params[3 * i + k];
    if (config_.optimize_pose) {
        camera_.azimuth = params[3 * nv] / rho;
        camera_.elevation = std::clamp(params[3 * nv + 1] / rho, -kElevationLimit, kElevationLimit);
    }
    ++steps_taken_;
    return ev.record;
}

void Refiner::resample_textures() {
    const TexturedMesh mesh = current_mesh();
    const auto visibility = vertex_visibility(mesh, camera_);
    colors_ = sample_textures(mesh, target_image_, camera_, visibility);
}

RefineResult refine(const TexturedMesh& init_mesh, const Camera& camera, const Image& target_image,
                    const Mask& target_mask, const RefineConfig& config) {
    Refiner refiner(init_mesh, camera, target_image, target_mask, config);
    RefineResult result;
    result.trace.steps.reserve(static_cast<std::size_t>(config.outer_iterations) * config.inner_steps);
    for (int outer = 0; outer < config.outer_iterations; ++outer) {
        for (int inner = 0; inner < config.inner_steps; ++inner) {
            result.trace.steps.push_back(refiner.step());
            if (config.resample_every_step) refiner.resample_textures();
        }
        refiner.resample_textures();
    }
    result.mesh = refiner.current_mesh();
    result.mesh.visibility = vertex_visibility(result.mesh, refiner.camera());
    result.camera = refiner.camera();
    return result;
}

}  // namespace semimesh
