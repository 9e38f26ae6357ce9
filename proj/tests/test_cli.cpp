#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "slimenet/commands.hpp"
#include "test_support.hpp"

using namespace slimenet;
using namespace testing_support;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SLIMENET_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Scenario toy(const fs::path& dir, int runs, int steps) { return load_scenario_file(write_toy_scenario(dir, runs, steps)); }

}  // namespace

TEST(Simulate, SingleToyRunWritesEverything) {
  const auto dir = scratch_dir("sim_single");
  const auto sc = toy(dir, 1, 10);
  const auto m = cmd_simulate(sc, dir / "out");
  ASSERT_EQ(m.runs.size(), 1u);
  EXPECT_TRUE(m.complete());
  const auto& r = m.runs[0];
  EXPECT_EQ(r.steps, 10);
  EXPECT_EQ(r.snapshots.size(), 2u);
  for (const auto& s : r.snapshots) {
    EXPECT_TRUE(fs::exists(dir / "out" / s.occupancy)) << s.occupancy;
    EXPECT_TRUE(fs::exists(dir / "out" / s.chemo)) << s.chemo;
  }
  EXPECT_TRUE(fs::exists(dir / "out" / r.edges));
  EXPECT_TRUE(fs::exists(dir / "out" / r.metadata));
  const auto back = load_manifest(dir / "out" / "manifest.json");
  EXPECT_EQ(back.runs.size(), 1u);
  EXPECT_EQ(back.runs[0].digest, r.digest);
  EXPECT_EQ(back.tool_version, kToolVersion);
  // The canonical dump reloads to the same scenario.
  const auto again = load_scenario(read_json(dir / "out" / "scenario.json"), dir / "out");
  EXPECT_EQ(dump_scenario(again), dump_scenario(sc));
}

TEST(Simulate, RerunAndParallelAreByteIdentical) {
  const auto dir = scratch_dir("sim_parallel");
  const auto sc = toy(dir, 3, 40);
  SimulateOptions one{1, false}, two{2, false};
  const auto a = cmd_simulate(sc, dir / "a", one);
  const auto b = cmd_simulate(sc, dir / "b", one);
  const auto c = cmd_simulate(sc, dir / "c", two);
  ASSERT_EQ(a.runs.size(), 3u);
  ASSERT_EQ(c.runs.size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a.runs[i].digest, b.runs[i].digest);
    EXPECT_EQ(a.runs[i].digest, c.runs[i].digest);
    EXPECT_EQ(c.runs[i].run_index, i);
    EXPECT_EQ(slurp(dir / "a" / a.runs[i].edges), slurp(dir / "c" / c.runs[i].edges));
  }
  EXPECT_NE(a.runs[0].digest, a.runs[1].digest);
}

TEST(Simulate, OverridesApply) {
  const auto dir = scratch_dir("sim_override");
  Overrides o;
  o.runs = 2;
  o.steps = 3;
  o.seed = 99;
  const auto sc = apply(toy(dir, 1, 10), o);
  EXPECT_EQ(sc.runs, 2);
  EXPECT_EQ(sc.steps, 3);
  EXPECT_EQ(sc.base_seed, 99u);
  for (int s : sc.snapshot_steps) EXPECT_LE(s, 3);
}

TEST(Analyze, ExportsThresholdGraphs) {
  const auto dir = scratch_dir("analyze");
  const auto sc = toy(dir, 2, 30);
  cmd_simulate(sc, dir / "camp", {1, false});
  AnalyzeOptions ao;
  ao.thetas = {Ratio(1, 2), Ratio(2, 2)};
  const auto res = cmd_analyze(dir / "camp", dir / "rep", ao);
  EXPECT_EQ(res.simulated.k, 2);
  for (const auto* name : {"weighted.json", "weights.csv", "weighted.dot", "threshold_1_2.json", "threshold_1_2.dot",
                           "threshold_2_2.json", "findings.json", "findings.txt"})
    EXPECT_TRUE(fs::exists(dir / "rep" / name)) << name;
  const auto t = read_json(dir / "rep" / "threshold_1_2.json");
  EXPECT_EQ(t["theta"], "1/2");
  EXPECT_EQ(graph_from_json(t, sc.cities.names()), threshold(res.simulated, Ratio(1, 2)));
  // No road graph in the toy scenario.
  EXPECT_EQ(res.report.find("H ⊆ V(raw)")->verdict, Verdict::Skipped);
  EXPECT_FALSE(res.report.partial);
}

TEST(Analyze, PartialManifestNeedsFlag) {
  const auto dir = scratch_dir("analyze_partial");
  const auto sc = toy(dir, 2, 10);
  cmd_simulate(sc, dir / "camp", {1, false});
  auto m = read_json(dir / "camp" / "manifest.json");
  m["runs_expected"] = 5;
  write_json(dir / "camp" / "manifest.json", m);
  EXPECT_THROW(cmd_analyze(dir / "camp", dir / "rep"), ValidationError);
  AnalyzeOptions ao;
  ao.allow_partial = true;
  const auto res = cmd_analyze(dir / "camp", dir / "rep", ao);
  EXPECT_TRUE(res.report.partial);
  EXPECT_EQ(read_json(dir / "rep" / "findings.json")["partial"], true);
}

TEST(Analyze, MissingRoadGraphFileIsSkippedNotFatal) {
  const auto dir = scratch_dir("analyze_noroad");
  const auto sc = toy(dir, 1, 10);
  cmd_simulate(sc, dir / "camp", {1, false});
  AnalyzeOptions ao;
  ao.road_graph = dir / "nowhere.json";
  const auto res = cmd_analyze(dir / "camp", dir / "rep", ao);
  EXPECT_EQ(res.report.find("V(strong) ⊆ H")->verdict, Verdict::Skipped);
}

TEST(Proximity, ItalyFixture) {
  const auto dir = scratch_dir("proximity");
  const auto r = cmd_proximity(italy(), dir);
  EXPECT_EQ(r.mst, r.rng);
  EXPECT_TRUE(r.planarity.planar);
  EXPECT_EQ(r.growth.root, "Roma");
  EXPECT_EQ(r.growth.stages.size(), 10u);
  EXPECT_EQ(r.growth.tree(italy().cities.names()), r.mst);
  for (const auto* name : {"gabriel.json", "rng.json", "mst.json", "mst.dot", "growth.json", "proximity.txt"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  EXPECT_THROW(cmd_proximity(italy(), dir, "Mediolanum"), ValidationError);
}

TEST(Proximity, TwoCities) {
  const auto dir = scratch_dir("proximity2");
  write_pnm(dir / "open.pgm", Image(20, 20, 1, 255));
  nlohmann::json doc{{"map", {{"image", "open.pgm"}}},
                     {"cities", {{"list", {{{"name", "A"}, {"x", 2}, {"y", 2}}, {{"name", "B"}, {"x", 17}, {"y", 17}}}}}}};
  const auto r = cmd_proximity(load_scenario(doc, dir), dir / "out");
  EXPECT_EQ(r.mst.edge_count(), 1u);
  EXPECT_EQ(r.gg, r.mst);
  EXPECT_EQ(r.growth.stages.size(), 1u);
}

TEST(Render, CampaignAndGraphs) {
  const auto dir = scratch_dir("render");
  const auto sc = toy(dir, 1, 10);
  cmd_simulate(sc, dir / "camp");
  const auto a = cmd_render_campaign(dir / "camp", dir / "img");
  ASSERT_EQ(a.size(), 1u);
  const auto img = read_image(a[0]);
  EXPECT_EQ(img.width, 80);
  EXPECT_EQ(img.height, 60);
  const auto b = cmd_render_graphs(sc, {}, dir / "img", {3, false});
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(read_image(b[0]).width, 120);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("cli");
  const auto scen = write_toy_scenario(dir, 1, 5);
  EXPECT_EQ(run_cli("--version"), 0);
  EXPECT_EQ(run_cli("simulate --scenario " + scen.string() + " --out " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
  EXPECT_EQ(run_cli("analyze --campaign " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "analysis" / "findings.txt"));
  EXPECT_EQ(run_cli("dump-config --scenario " + scen.string()), 0);
  EXPECT_EQ(run_cli("proximity --scenario " + scen.string() + " --out " + (dir / "p").string() + " --root C"), 0);
  // Validation and usage errors.
  EXPECT_EQ(run_cli("simulate --scenario " + scen.string() + " --out " + (dir / "x").string() + " --runs 0"), 1);
  EXPECT_EQ(run_cli("analyze --campaign " + (dir / "out").string() + " --theta 1/0"), 1);
  EXPECT_EQ(run_cli("frobnicate"), 1);
  EXPECT_EQ(run_cli("simulate --out " + (dir / "y").string()), 1);
  // Missing files.
  EXPECT_EQ(run_cli("simulate --scenario " + (dir / "absent.json").string() + " --out " + (dir / "z").string()), 2);
  EXPECT_EQ(run_cli("analyze --campaign " + (dir / "absent").string()), 2);
}
