// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include <semimesh/semimesh.hpp>

namespace {

using namespace semimesh;

SemiImplicitVolume ball_volume(int r) {
    SemiImplicitVolume v{voxelize(make_shape(ShapeKind::sphere), r), FeatureGrid(r, 3, 0.5)};
    return v;
}

void BM_RenderView(benchmark::State& state) {
    const auto vol = ball_volume(32);
    Camera cam;
    cam.width = cam.height = static_cast<int>(state.range(0));
    const auto spec = RaySampleSpec::for_camera(cam, 64);
    for (auto _ : state) benchmark::DoNotOptimize(render_view(vol, cam, spec));
    state.SetItemsProcessed(state.iterations() * cam.width * cam.height);
}
BENCHMARK(BM_RenderView)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_RenderViewBackward(benchmark::State& state) {
    const auto vol = ball_volume(32);
    Camera cam;
    cam.width = cam.height = 32;
    const auto spec = RaySampleSpec::for_camera(cam, 64);
    const Image d_image(32, 32, 1.0);
    const Mask d_mask(32, 32, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(render_view_backward(vol, cam, spec, d_image, d_mask));
}
BENCHMARK(BM_RenderViewBackward)->Unit(benchmark::kMillisecond);

void BM_Rasterize(benchmark::State& state) {
    ShapeParams p;
    p.subdivisions = static_cast<int>(state.range(0));
    const auto mesh = make_shape(ShapeKind::sphere, p);
    Camera cam;
    for (auto _ : state) benchmark::DoNotOptimize(rasterize(mesh, cam, SoftRasterConfig{}));
    state.counters["faces"] = static_cast<double>(mesh.faces.size());
}
BENCHMARK(BM_Rasterize)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_RasterizeBackward(benchmark::State& state) {
    const auto mesh = make_shape(ShapeKind::sphere);
    Camera cam;
    const Image d_image(64, 64, 1.0);
    const Mask d_mask(64, 64, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(rasterize_backward(mesh, cam, SoftRasterConfig{}, d_image, d_mask));
}
BENCHMARK(BM_RasterizeBackward)->Unit(benchmark::kMillisecond);

void BM_ExtractMesh(benchmark::State& state) {
    const auto grid = voxelize(make_shape(ShapeKind::torus), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(extract_mesh(grid, 0.5));
}
BENCHMARK(BM_ExtractMesh)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FScore(benchmark::State& state) {
    const auto mesh = make_shape(ShapeKind::chair_proxy);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = sample_surface(mesh, n, 1), b = sample_surface(mesh, n, 2);
    for (auto _ : state) benchmark::DoNotOptimize(fscore(a, b, default_fscore_tau(32)));
}
BENCHMARK(BM_FScore)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
