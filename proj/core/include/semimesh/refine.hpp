// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "semimesh/camera.hpp"
#include "semimesh/image.hpp"
#include "semimesh/mesh.hpp"
#include "semimesh/softras.hpp"

namespace semimesh {

struct RefineConfig {
    int outer_iterations = 5;
    int inner_steps = 50;
    double step_size = 5e-3;
    double lambda_rgb = 1.0;
    double lambda_mask = 1.0;
    double lambda_disp = 0.1;
    double lambda_lap = 0.1;
    bool optimize_pose = true;
    /// Restrict the color loss to the target foreground instead of the full frame.
    bool rgb_foreground_only = false;
    /// Resample vertex colors after every inner step rather than once per outer iteration.
    bool resample_every_step = false;
    SoftRasterConfig raster;

    void validate() const;
};

struct LossRecord {
    int iteration = 0;
    double rgb = 0.0;
    double mask = 0.0;
    double disp = 0.0;
    double lap = 0.0;
    double total = 0.0;
};

struct RefineTrace {
    std::vector<LossRecord> steps;
};

struct RefineResult {
    TexturedMesh mesh;
    Camera camera;
    RefineTrace trace;
};

/// Bias-corrected first/second-moment optimizer over a flat parameter vector.
class AdamOptimizer {
  public:
    explicit AdamOptimizer(std::size_t size, double step_size = 5e-3, double beta1 = 0.9, double beta2 = 0.999,
                           double epsilon = 1e-8);

    /// Throws NonFiniteError without touching state if any gradient is not finite.
    void step(std::span<double> params, std::span<const double> gradients);

    std::size_t size() const { return first_.size(); }
    long iterations() const { return iterations_; }

  private:
    double step_size_, beta1_, beta2_, epsilon_;
    long iterations_ = 0;
    std::vector<double> first_;
    std::vector<double> second_;
};

/// Optimization state of one refinement: displacements from the initial vertices,
/// the current pose and the optimizer moments.
class Refiner {
  public:
    Refiner(TexturedMesh initial, Camera camera, Image target_image, Mask target_mask, RefineConfig config);

    /// Evaluates the weighted objective at the current state and applies one optimizer
    /// update. The returned record describes the state before the update.
    LossRecord step();

    /// Re-runs visibility and texture fusion with the current geometry and pose.
    void resample_textures();

    /// Objective at the current state without updating anything.
    LossRecord evaluate() const;

    TexturedMesh current_mesh() const;
    const Camera& camera() const { return camera_; }
    std::span<const Vec3> displacement() const { return displacement_; }
    const RefineConfig& config() const { return config_; }

  private:
    struct Evaluation {
        LossRecord record;
        std::vector<Vec3> d_vertices;
        double d_azimuth = 0.0;
        double d_elevation = 0.0;
    };
    Evaluation evaluate_with_gradient(bool need_gradient) const;

    TexturedMesh initial_;
    std::vector<Vec3> colors_;
    std::vector<Vec3> displacement_;
    std::vector<std::vector<int>> neighbors_;
    Camera camera_;
    Image target_image_;
    Mask target_mask_;
    RefineConfig config_;
    AdamOptimizer optimizer_;
    int steps_taken_ = 0;
};

/// K outer iterations of (inner gradient steps, then texture resampling). Faces never change.
RefineResult refine(const TexturedMesh& init_mesh, const Camera& camera, const Image& target_image,
                    const Mask& target_mask, const RefineConfig& config = {});

}  // namespace semimesh
