// SPDX-License-Identifier: Apache-2.0
// semimesh: command-line front end for synthesis, rendering, extraction, refinement and
// evaluation. Exit codes: 0 success, 1 data error, 2 usage error.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "semimesh/semimesh.hpp"

namespace {

using namespace semimesh;
using nlohmann::json;

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct CameraFlags {
    double az = 0.0;
    double el = 0.0;
    double dist = 2.5;
    double fov = 30.0;
    std::string size = "64x64";

    void add(CLI::App* app) {
        app->add_option("--az", az, "Camera azimuth in degrees")->capture_default_str();
        app->add_option("--el", el, "Camera elevation in degrees")->capture_default_str();
        app->add_option("--dist", dist, "Camera distance from the origin")->capture_default_str();
        app->add_option("--fov", fov, "Vertical field of view in degrees")->capture_default_str();
        app->add_option("--size", size, "Image size as WxH")->capture_default_str();
    }

    Camera camera() const {
        Camera c;
        c.azimuth = to_rad(az);
        c.elevation = to_rad(el);
        c.distance = dist;
        c.fov = to_rad(fov);
        int w = 0, h = 0;
        char x = 0, tail = 0;
        if (std::sscanf(size.c_str(), "%d%c%d%c", &w, &x, &h, &tail) != 3 || (x != 'x' && x != 'X') || w < 1 || h < 1)
            throw UsageError("--size must look like WxH with positive integers, got '" + size + "'");
        c.width = w;
        c.height = h;
        try {
            c.validate();
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
        return c;
    }
};

/// JSON run configuration. Unknown keys are rejected so typos do not pass silently.
struct RunConfig {
    int D = 64;
    double iso = 0.5;
    RefineConfig refine;
    std::uint64_t seed = 0;
};

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    if (path.empty()) return cfg;
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("config '" + path + "': " + e.what());
    }
    if (!j.is_object()) throw UsageError("config '" + path + "' must be a JSON object");
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "D") cfg.D = value.get<int>();
            else if (key == "iso") cfg.iso = value.get<double>();
            else if (key == "K") cfg.refine.outer_iterations = value.get<int>();
            else if (key == "inner_steps") cfg.refine.inner_steps = value.get<int>();
            else if (key == "step_size") cfg.refine.step_size = value.get<double>();
            else if (key == "lambda_rgb") cfg.refine.lambda_rgb = value.get<double>();
            else if (key == "lambda_mask") cfg.refine.lambda_mask = value.get<double>();
            else if (key == "lambda_disp") cfg.refine.lambda_disp = value.get<double>();
            else if (key == "lambda_lap") cfg.refine.lambda_lap = value.get<double>();
            else if (key == "sigma") cfg.refine.raster.sigma = value.get<double>();
            else if (key == "gamma") cfg.refine.raster.gamma = value.get<double>();
            else if (key == "optimize_pose") cfg.refine.optimize_pose = value.get<bool>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else throw UsageError("config '" + path + "': unknown key '" + key + "'");
        }
    } catch (const json::type_error& e) {
        throw UsageError("config '" + path + "': " + e.what());
    }
    return cfg;
}

void check_iso(double iso) {
    if (!(iso > 0.0 && iso < 1.0)) throw UsageError("--iso must be in (0,1), got " + std::to_string(iso));
}

bool has_extension(const std::string& path, const char* ext) {
    return std::filesystem::path(path).extension() == ext;
}

/// Meshes come from .obj files or from .vox occupancy grids extracted at 0.5.
TexturedMesh load_mesh(const std::string& path) {
    if (has_extension(path, ".vox")) return extract_mesh(io::read_occupancy(path), 0.5);
    return io::read_obj(path);
}

/// Grids come from .vox files or from watertight .obj meshes voxelized at `resolution`.
OccupancyGrid load_grid(const std::string& path, int resolution) {
    if (has_extension(path, ".obj")) return voxelize(io::read_obj(path), resolution);
    return io::read_occupancy(path);
}

void print(const json& j) { std::cout << j.dump() << '\n'; }

void write_trace(const std::string& path, const RefineTrace& trace) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    out.precision(17);
    out << "iteration,l_rgb,l_mask,l_disp,l_lap,total\n";
    for (const auto& s : trace.steps)
        out << s.iteration << ',' << s.rgb << ',' << s.mask << ',' << s.disp << ',' << s.lap << ',' << s.total << '\n';
    if (!out) throw FormatError("failed writing '" + path + "'");
}

struct SynthArgs {
    std::string shape = "box_plus_bump";
    int resolution = 32;
    std::string mesh_out, occupancy_out, feature_out;
    ShapeParams params;
};

void run_synth(const SynthArgs& a) {
    if (a.resolution < 2) throw UsageError("--resolution must be at least 2");
    ShapeKind kind;
    try {
        kind = parse_shape_kind(a.shape);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    TexturedMesh mesh;
    try {
        mesh = make_shape(kind, a.params);
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    if (!a.mesh_out.empty()) io::write_obj(a.mesh_out, mesh);
    if (a.occupancy_out.empty() && a.feature_out.empty()) return;
    const auto occ = voxelize(mesh, a.resolution);
    if (!a.occupancy_out.empty()) io::write_vox(a.occupancy_out, occ);
    if (!a.feature_out.empty()) {
        FeatureGrid feat(a.resolution, 3);
        for (int z = 0; z < a.resolution; ++z)
            for (int y = 0; y < a.resolution; ++y)
                for (int x = 0; x < a.resolution; ++x) {
                    const Vec3 c = procedural_color(feat.cell_center(x, y, z));
                    for (int k = 0; k < 3; ++k) feat.at(k, x, y, z) = c[k];
                }
        io::write_vox(a.feature_out, feat);
    }
}

struct RenderArgs {
    std::string occupancy, feature, image_out, mask_out, config;
    std::optional<int> samples;
    CameraFlags cam;
};

void run_render(const RenderArgs& a) {
    const auto cfg = load_config(a.config);
    const int samples = a.samples.value_or(cfg.D);
    if (samples < 1) throw UsageError("--samples must be positive");
    const Camera cam = a.cam.camera();
    SemiImplicitVolume vol;
    vol.occupancy = io::read_occupancy(a.occupancy);
    if (a.feature.empty()) {
        vol.feature = FeatureGrid(vol.occupancy.resolution(), 3, 0.5);
    } else {
        vol.feature = FeatureGrid(io::read_vox(a.feature));
        if (vol.feature.channels() != 3) throw FormatError("'" + a.feature + "' must have 3 channels");
    }
    const auto out = render_view(vol, cam, RaySampleSpec::for_camera(cam, samples));
    if (!a.image_out.empty()) io::write_image(a.image_out, out.image);
    if (!a.mask_out.empty()) io::write_mask(a.mask_out, out.mask);
}

struct ExtractArgs {
    std::string occupancy, mesh_out, texture, config;
    std::optional<double> iso;
    CameraFlags cam;
};

void run_extract(const ExtractArgs& a) {
    const auto cfg = load_config(a.config);
    const double iso = a.iso.value_or(cfg.iso);
    check_iso(iso);
    const Camera cam = a.cam.camera();
    auto mesh = extract_mesh(io::read_occupancy(a.occupancy), iso);
    if (!a.texture.empty()) mesh = texture_from_view(std::move(mesh), io::read_image(a.texture), cam);
    io::write_obj(a.mesh_out, mesh);
    print({{"vertices", mesh.vertices.size()}, {"faces", mesh.faces.size()}});
}

struct RefineArgs {
    std::string mesh, image, mask, config, mesh_out, trace_out;
    CameraFlags cam;
};

void run_refine(const RefineArgs& a) {
    const auto cfg = load_config(a.config);
    try {
        cfg.refine.validate();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
    const Camera cam = a.cam.camera();
    const auto init = io::read_obj(a.mesh);
    const auto result = refine(init, cam, io::read_image(a.image), io::read_mask(a.mask), cfg.refine);
    io::write_obj(a.mesh_out, result.mesh);
    if (!a.trace_out.empty()) write_trace(a.trace_out, result.trace);
    json j{{"azimuth", to_deg(result.camera.azimuth)}, {"elevation", to_deg(result.camera.elevation)}};
    if (!result.trace.steps.empty()) {
        j["initial_total"] = result.trace.steps.front().total;
        j["final_total"] = result.trace.steps.back().total;
    }
    print(j);
}

struct IouArgs {
    std::string a, b;
    double threshold_a = 0.5, threshold_b = 0.5;
    int resolution = 32;
};

void run_iou(const IouArgs& a) {
    if (a.resolution < 2) throw UsageError("--resolution must be at least 2");
    print({{"iou", iou3d(load_grid(a.a, a.resolution), a.threshold_a, load_grid(a.b, a.resolution), a.threshold_b)}});
}

struct FscoreArgs {
    std::string pred, gt, config;
    std::optional<double> tau;
    int resolution = 32;
    std::size_t points = kDefaultFscorePoints;
    std::optional<std::uint64_t> seed;
};

void run_fscore(const FscoreArgs& a) {
    const auto cfg = load_config(a.config);
    if (a.resolution < 2) throw UsageError("--resolution must be at least 2");
    if (a.points < 1) throw UsageError("--points must be positive");
    const double tau = a.tau.value_or(default_fscore_tau(a.resolution));
    if (!(tau > 0.0)) throw UsageError("--tau must be positive");
    const std::uint64_t seed = a.seed.value_or(cfg.seed);
    const auto p = sample_surface(load_mesh(a.pred), a.points, seed);
    const auto g = sample_surface(load_mesh(a.gt), a.points, seed + 1);
    const auto f = fscore(p, g, tau);
    print({{"precision", f.precision}, {"recall", f.recall}, {"fscore", f.fscore}, {"tau", tau}});
}

struct AlignArgs {
    std::string pred, gt;
    double az_step = 10.0, el_step = 10.0, el_max = 0.0;
    std::vector<double> thresholds{0.5};
    int resolution = 32;
};

std::vector<double> angle_grid(double step_deg, double lo_deg, double hi_deg, bool half_open) {
    std::vector<double> out;
    for (int i = 0;; ++i) {
        const double a = lo_deg + i * step_deg;
        if (half_open ? a >= hi_deg - 1e-9 : a > hi_deg + 1e-9) break;
        out.push_back(to_rad(a));
    }
    return out;
}

void run_align(const AlignArgs& a) {
    if (!(a.az_step > 0.0) || !(a.el_step > 0.0) || a.el_max < 0.0)
        throw UsageError("--az-step and --el-step must be positive and --el-max non-negative");
    if (a.thresholds.empty()) throw UsageError("--thresholds needs at least one value");
    const auto pred = load_grid(a.pred, a.resolution), gt = load_grid(a.gt, a.resolution);
    const auto azs = angle_grid(a.az_step, 0.0, 360.0, true);
    const auto els = angle_grid(a.el_step, -a.el_max, a.el_max, false);
    const auto best = align_search(pred, gt, azs, els, a.thresholds);
    print({{"azimuth", to_deg(best.azimuth)},
           {"elevation", to_deg(best.elevation)},
           {"threshold", best.threshold},
           {"iou", best.iou}});
}

int run(int argc, char** argv) {
    CLI::App app{"Semi-implicit volume to textured mesh pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "semimesh 0.1.0");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Procedural shape to mesh and voxel files");
    s->add_option("--shape", synth.shape, "sphere|box|cylinder|torus|box_plus_bump|chair_proxy")->capture_default_str();
    s->add_option("--resolution", synth.resolution, "Voxel resolution R")->capture_default_str();
    s->add_option("--mesh", synth.mesh_out, "Output .obj");
    s->add_option("--occupancy", synth.occupancy_out, "Output occupancy .vox");
    s->add_option("--features", synth.feature_out, "Output RGB feature .vox (procedural colors)");
    s->add_option("--radius", synth.params.radius, "Sphere and cylinder radius")->capture_default_str();
    s->add_option("--subdivisions", synth.params.subdivisions, "Sphere subdivision levels")->capture_default_str();
    s->add_option("--half-height", synth.params.half_height, "Cylinder half height")->capture_default_str();
    s->add_option("--major-radius", synth.params.major_radius, "Torus major radius")->capture_default_str();
    s->add_option("--minor-radius", synth.params.minor_radius, "Torus minor radius")->capture_default_str();
    s->add_option("--bump-height", synth.params.bump_height, "Bump height")->capture_default_str();
    s->add_option("--bump-radius", synth.params.bump_radius, "Bump radius")->capture_default_str();

    RenderArgs render;
    auto* r = app.add_subcommand("render-volume", "Render an occupancy (+feature) volume to ppm/pgm");
    r->add_option("occupancy", render.occupancy, "Occupancy .vox")->required();
    r->add_option("--features", render.feature, "RGB feature .vox (default: 0.5 gray)");
    r->add_option("--samples", render.samples, "Ray samples D (default 64 or config D)");
    r->add_option("--image", render.image_out, "Output .ppm");
    r->add_option("--mask", render.mask_out, "Output .pgm");
    r->add_option("--config", render.config, "JSON config");
    render.cam.add(r);

    ExtractArgs extract;
    auto* e = app.add_subcommand("extract", "Extract a mesh from an occupancy .vox");
    e->add_option("occupancy", extract.occupancy, "Occupancy .vox")->required();
    e->add_option("-o,--output", extract.mesh_out, "Output .obj")->required();
    e->add_option("--iso", extract.iso, "Iso level in (0,1) (default 0.5 or config iso)");
    e->add_option("--texture", extract.texture, "Texture source .ppm seen from the camera flags");
    e->add_option("--config", extract.config, "JSON config");
    extract.cam.add(e);

    RefineArgs ref;
    auto* f = app.add_subcommand("refine", "Refine a mesh against a target image and mask");
    f->add_option("--mesh", ref.mesh, "Initial .obj")->required();
    f->add_option("--image", ref.image, "Target .ppm")->required();
    f->add_option("--mask", ref.mask, "Target .pgm")->required();
    f->add_option("-o,--output", ref.mesh_out, "Output .obj")->required();
    f->add_option("--trace", ref.trace_out, "Loss trace .csv");
    f->add_option("--config", ref.config, "JSON config (K, inner_steps, step_size, lambda_*, sigma, gamma, optimize_pose)");
    ref.cam.add(f);

    IouArgs iou;
    auto* i = app.add_subcommand("eval-iou", "Voxel IoU of two grids (.vox, or .obj voxelized)");
    i->add_option("a", iou.a)->required();
    i->add_option("b", iou.b)->required();
    i->add_option("--threshold-a", iou.threshold_a)->capture_default_str();
    i->add_option("--threshold-b", iou.threshold_b)->capture_default_str();
    i->add_option("--resolution", iou.resolution, "Voxelization resolution for .obj inputs")->capture_default_str();

    FscoreArgs fs;
    auto* g = app.add_subcommand("eval-fscore", "Surface F-score of two meshes (.obj, or .vox extracted at 0.5)");
    g->add_option("pred", fs.pred)->required();
    g->add_option("gt", fs.gt)->required();
    g->add_option("--tau", fs.tau, "Distance threshold (default 4/R)");
    g->add_option("--resolution", fs.resolution, "R for the default tau")->capture_default_str();
    g->add_option("--points", fs.points, "Samples per surface")->capture_default_str();
    g->add_option("--seed", fs.seed, "Sampling seed (default 0 or config seed)");
    g->add_option("--config", fs.config, "JSON config");

    AlignArgs al;
    auto* l = app.add_subcommand("align", "Search pose and threshold maximizing IoU of pred against gt");
    l->add_option("pred", al.pred)->required();
    l->add_option("gt", al.gt)->required();
    l->add_option("--az-step", al.az_step, "Azimuth step in degrees over [0,360)")->capture_default_str();
    l->add_option("--el-step", al.el_step, "Elevation step in degrees")->capture_default_str();
    l->add_option("--el-max", al.el_max, "Elevation search range +-degrees")->capture_default_str();
    l->add_option("--thresholds", al.thresholds, "Binarization thresholds for pred")->delimiter(',')->capture_default_str();
    l->add_option("--resolution", al.resolution, "Voxelization resolution for .obj inputs")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*s) run_synth(synth);
        else if (*r) run_render(render);
        else if (*e) run_extract(extract);
        else if (*f) run_refine(ref);
        else if (*i) run_iou(iou);
        else if (*g) run_fscore(fs);
        else if (*l) run_align(al);
    } catch (const UsageError& err) {
        std::cerr << "usage error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitData;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
