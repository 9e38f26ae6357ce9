#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "slimenet/commands.hpp"

namespace fs = std::filesystem;
using namespace slimenet;

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("slimenet");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* lvl = std::getenv("PHYSARUM_LOG")) spdlog::cfg::helpers::load_levels(lvl);
}

std::vector<Edge> parse_edges(const std::vector<std::string>& specs) {
  std::vector<Edge> out;
  for (const auto& s : specs) {
    const auto dash = s.find('-');
    if (dash == std::string::npos) throw ValidationError("expected A-B, got '" + s + "'", "exempt");
    out.push_back(Edge::make(s.substr(0, dash), s.substr(dash + 1)));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Virtual plasmodium simulator and city-graph analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string scenario_path, out_dir, campaign_dir, root, road_graph, lab_graph, mst_floor;
  std::vector<std::string> thetas, graphs, exempt;
  Overrides ov;
  int parallel = 1, scale = 2;
  bool allow_partial = false, no_snapshots = false, no_labels = false;

  auto add_overrides = [&](CLI::App* c) {
    c->add_option("--seed", ov.seed, "base seed");
    c->add_option("--runs", ov.runs, "number of runs");
    c->add_option("--steps", ov.steps, "scheduler steps per run");
    c->add_option("--dilation", ov.dilation, "occupancy dilation for edge extraction (cells)");
    c->add_option("--root", ov.root, "growth root city");
  };

  auto* sim = app.add_subcommand("simulate", "run a campaign and write snapshots, edge lists and a manifest");
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--parallel", parallel, "worker threads")->check(CLI::PositiveNumber);
  sim->add_flag("--no-snapshots", no_snapshots, "skip snapshot images");
  add_overrides(sim);

  auto* ana = app.add_subcommand("analyze", "aggregate a campaign and evaluate the graph relations");
  ana->add_option("--campaign", campaign_dir, "directory written by simulate")->required();
  ana->add_option("--out", out_dir, "report directory (default: <campaign>/analysis)");
  ana->add_option("--theta", thetas, "threshold(s) as c/k; default every i/k");
  ana->add_option("--road-graph", road_graph, "reference road graph (default: the scenario's)");
  ana->add_option("--lab-graph", lab_graph, "laboratory weighted graph JSON");
  ana->add_option("--mst-floor", mst_floor, "minimum weight required of every MST edge, c/k");
  ana->add_option("--exempt", exempt, "MST edge A-B exempt from --mst-floor");
  ana->add_flag("--allow-partial", allow_partial, "analyse an incomplete campaign");

  auto* prox = app.add_subcommand("proximity", "write Gabriel, RNG, MST and the rooted growth sequence");
  prox->add_option("--scenario", scenario_path, "scenario JSON")->required();
  prox->add_option("--out", out_dir, "output directory")->required();
  add_overrides(prox);

  auto* ren = app.add_subcommand("render", "draw snapshots and graphs over the map");
  ren->add_option("--campaign", campaign_dir, "render every run's final snapshot and graph");
  ren->add_option("--scenario", scenario_path, "scenario for --graph renderings");
  ren->add_option("--graph", graphs, "graph JSON to draw");
  ren->add_option("--out", out_dir, "output directory")->required();
  ren->add_option("--scale", scale, "pixels per cell")->check(CLI::PositiveNumber);
  ren->add_flag("--no-labels", no_labels, "omit city names");

  auto* dump = app.add_subcommand("dump-config", "print the canonical, fully defaulted scenario");
  dump->add_option("--scenario", scenario_path, "scenario JSON")->required();
  add_overrides(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*sim) {
      const auto sc = apply(load_scenario_file(scenario_path), ov);
      SimulateOptions so;
      so.parallel = parallel;
      so.write_snapshots = !no_snapshots;
      const auto m = cmd_simulate(sc, out_dir, so, scenario_path);
      spdlog::info("{} runs written to {}", m.runs.size(), out_dir);
    } else if (*ana) {
      AnalyzeOptions ao;
      for (const auto& t : thetas) ao.thetas.push_back(parse_ratio(t));
      if (!road_graph.empty()) ao.road_graph = fs::path(road_graph);
      if (!lab_graph.empty()) ao.lab_graph = fs::path(lab_graph);
      if (!mst_floor.empty()) ao.mst_floor = parse_ratio(mst_floor);
      ao.mst_floor_exempt = parse_edges(exempt);
      ao.allow_partial = allow_partial;
      const auto res = cmd_analyze(campaign_dir, out_dir.empty() ? fs::path(campaign_dir) / "analysis" : fs::path(out_dir), ao);
      std::cout << to_text(res.report);
    } else if (*prox) {
      const auto sc = apply(load_scenario_file(scenario_path), ov);
      const auto r = cmd_proximity(sc, out_dir);
      std::cout << "MST = RNG: " << (r.mst == r.rng ? "yes" : "no") << "\n";
    } else if (*ren) {
      RenderOptions ro{scale, !no_labels};
      std::vector<fs::path> written;
      if (!campaign_dir.empty()) written = cmd_render_campaign(campaign_dir, out_dir, ro);
      if (!scenario_path.empty() || !graphs.empty()) {
        if (scenario_path.empty()) throw ValidationError("--graph needs --scenario", "scenario");
        const auto more = cmd_render_graphs(load_scenario_file(scenario_path), {graphs.begin(), graphs.end()}, out_dir, ro);
        written.insert(written.end(), more.begin(), more.end());
      }
      if (written.empty()) throw ValidationError("nothing to render: give --campaign or --scenario", "render");
      for (const auto& p : written) std::cout << p.string() << "\n";
    } else if (*dump) {
      std::cout << dump_scenario(apply(load_scenario_file(scenario_path), ov)).dump(2) << "\n";
    }
  } catch (const ValidationError& e) {
    spdlog::error("{}{}", e.field().empty() ? "" : e.field() + ": ", e.what());
    return 1;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
