// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "test_support.hpp"

namespace semimesh {
namespace {

using testing::run_cli;
using testing::scratch_dir;

const std::string kCli = SEMIMESH_CLI_PATH;

std::string quoted(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

TEST(Cli, IouOfGridWithItselfIsOne) {
    const auto dir = scratch_dir("cli_iou");
    io::write_vox(dir / "a.vox", testing::random_occupancy(8, 1));
    const auto r = run_cli(kCli, "eval-iou " + quoted(dir / "a.vox") + " " + quoted(dir / "a.vox"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.out, "{\"iou\":1.0}\n");
}

TEST(Cli, IsoOutsideUnitIntervalIsUsageError) {
    const auto dir = scratch_dir("cli_iso");
    io::write_vox(dir / "a.vox", testing::ball_occupancy(8, 0.5));
    EXPECT_EQ(run_cli(kCli, "extract " + quoted(dir / "a.vox") + " -o " + quoted(dir / "m.obj") + " --iso 1.5").exit_code, 2);
    EXPECT_FALSE(std::filesystem::exists(dir / "m.obj"));
    EXPECT_EQ(run_cli(kCli, "extract " + quoted(dir / "a.vox") + " -o " + quoted(dir / "m.obj") + " --iso 0.5").exit_code, 0);
}

TEST(Cli, UnknownFlagAndMissingSubcommandAreUsageErrors) {
    EXPECT_EQ(run_cli(kCli, "eval-iou a.vox b.vox --bogus").exit_code, 2);
    EXPECT_EQ(run_cli(kCli, "").exit_code, 2);
    EXPECT_EQ(run_cli(kCli, "frobnicate").exit_code, 2);
    EXPECT_EQ(run_cli(kCli, "render-volume x.vox --size 64by64").exit_code, 2);
}

TEST(Cli, DataErrorsExitOne) {
    const auto dir = scratch_dir("cli_data");
    testing::write_bytes(dir / "bad.vox", "XOVL 2 1\n");
    EXPECT_EQ(run_cli(kCli, "eval-iou " + quoted(dir / "bad.vox") + " " + quoted(dir / "bad.vox")).exit_code, 1);
    EXPECT_EQ(run_cli(kCli, "eval-iou " + quoted(dir / "missing.vox") + " " + quoted(dir / "missing.vox")).exit_code, 1);
}

TEST(Cli, ConfigRejectsUnknownKeys) {
    const auto dir = scratch_dir("cli_config");
    io::write_vox(dir / "a.vox", testing::ball_occupancy(8, 0.5));
    testing::write_bytes(dir / "cfg.json", R"({"isolevel": 0.4})");
    EXPECT_EQ(run_cli(kCli, "extract " + quoted(dir / "a.vox") + " -o " + quoted(dir / "m.obj") + " --config " +
                                quoted(dir / "cfg.json"))
                  .exit_code,
              2);
    testing::write_bytes(dir / "cfg.json", R"({"iso": 0.4})");
    EXPECT_EQ(run_cli(kCli, "extract " + quoted(dir / "a.vox") + " -o " + quoted(dir / "m.obj") + " --config " +
                                quoted(dir / "cfg.json"))
                  .exit_code,
              0);
}

TEST(Cli, ExtractMatchesLibrary) {
    const auto dir = scratch_dir("cli_extract");
    const auto occ = testing::ball_occupancy(12, 0.6);
    io::write_vox(dir / "a.vox", occ);
    ASSERT_EQ(run_cli(kCli, "extract " + quoted(dir / "a.vox") + " -o " + quoted(dir / "m.obj")).exit_code, 0);
    const auto cli_mesh = io::read_obj(dir / "m.obj");
    const auto lib_mesh = extract_mesh(OccupancyGrid(io::read_vox(dir / "a.vox")), 0.5);
    EXPECT_EQ(cli_mesh.faces, lib_mesh.faces);
    ASSERT_EQ(cli_mesh.vertices.size(), lib_mesh.vertices.size());
    for (std::size_t i = 0; i < lib_mesh.vertices.size(); ++i)
        EXPECT_LE((cli_mesh.vertices[i] - lib_mesh.vertices[i]).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Cli, AlignRecoversQuarterTurn) {
    const auto dir = scratch_dir("cli_align");
    const auto gt = voxelize(make_shape(ShapeKind::chair_proxy), 24);
    io::write_vox(dir / "gt.vox", gt);
    io::write_vox(dir / "pred.vox", rotate_grid(gt, canonical_rotation(std::numbers::pi / 2, 0.0)));
    const auto r = run_cli(kCli, "align " + quoted(dir / "pred.vox") + " " + quoted(dir / "gt.vox") + " --az-step 90");
    ASSERT_EQ(r.exit_code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["azimuth"].get<double>(), 90.0, 1e-9);
    EXPECT_GE(j["iou"].get<double>(), 0.99);
}

TEST(Cli, PipelineSmokeRun) {
    const auto dir = scratch_dir("cli_pipeline");
    std::string fscore;
    EXPECT_EQ(testing::cli_pipeline(kCli, dir, &fscore), "");
    const auto trace = testing::read_bytes(dir / "trace.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "iteration,l_rgb,l_mask,l_disp,l_lap,total");
    EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 11);
    const auto j = nlohmann::json::parse(fscore);
    EXPECT_GT(j["fscore"].get<double>(), 0.5);
    // Deterministic given the seed.
    std::string again;
    EXPECT_EQ(testing::cli_pipeline(kCli, scratch_dir("cli_pipeline_again"), &again), "");
    EXPECT_EQ(fscore, again);
}

}  // namespace
}  // namespace semimesh
