#pragma once

// Campaign orchestration behind the command-line subcommands. Each cmd_*
// function is callable directly; the executable only parses arguments and
// maps exceptions to exit codes.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "slimenet/error.hpp"
#include "slimenet/geometry.hpp"
#include "slimenet/graphlab.hpp"
#include "slimenet/render.hpp"
#include "slimenet/rng.hpp"
#include "slimenet/run.hpp"
#include "slimenet/scenario.hpp"

namespace slimenet {

inline constexpr const char* kToolVersion = "slimenet 0.1.0";

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// File helpers

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("short write to " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

inline void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

inline nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), path.filename().string());
  }
}

inline void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

// ---------------------------------------------------------------------------
// Scenario overrides from the command line

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> steps;
  std::optional<int> dilation;
  std::optional<std::string> root;
};

inline Scenario apply(Scenario sc, const Overrides& o) {
  if (o.seed) sc.base_seed = *o.seed;
  if (o.runs) sc.runs = *o.runs;
  if (o.steps) {
    sc.steps = *o.steps;
    std::erase_if(sc.snapshot_steps, [&](int s) { return s > sc.steps; });
  }
  if (o.dilation) sc.dilation = *o.dilation;
  if (o.root) sc.root = *o.root;
  sc.validate();
  return sc;
}

// ---------------------------------------------------------------------------
// Manifest

struct SnapshotRecord {
  std::int64_t step = 0;
  std::string occupancy;  ///< paths relative to the output directory
  std::string chemo;
};

struct RunRecord {
  int run_index = 0;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  std::size_t particles = 0;
  std::string digest;
  std::string edges;
  std::string metadata;
  std::vector<SnapshotRecord> snapshots;
};

struct Manifest {
  std::string tool_version = kToolVersion;
  std::string rng = kRngAlgorithm;
  std::string scenario;  ///< canonical scenario dump, relative to the output directory
  std::string source_scenario;
  int runs_expected = 0;
  std::vector<RunRecord> runs;  ///< ordered by run_index

  bool complete() const {
    if (static_cast<int>(runs.size()) != runs_expected) return false;
    for (int i = 0; i < runs_expected; ++i)
      if (runs[i].run_index != i) return false;
    return true;
  }
};

inline nlohmann::json to_json(const Manifest& m) {
  auto runs = nlohmann::json::array();
  for (const auto& r : m.runs) {
    auto snaps = nlohmann::json::array();
    for (const auto& s : r.snapshots) snaps.push_back({{"step", s.step}, {"occupancy", s.occupancy}, {"chemo", s.chemo}});
    runs.push_back({{"run_index", r.run_index},
                    {"seed", r.seed},
                    {"steps", r.steps},
                    {"particles", r.particles},
                    {"digest", r.digest},
                    {"edges", r.edges},
                    {"metadata", r.metadata},
                    {"snapshots", snaps}});
  }
  return {{"tool_version", m.tool_version}, {"rng", m.rng},         {"scenario", m.scenario},
          {"source_scenario", m.source_scenario}, {"runs_expected", m.runs_expected},
          {"complete", m.complete()},       {"runs", runs}};
}

inline Manifest manifest_from_json(const nlohmann::json& doc) {
  Manifest m;
  try {
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.rng = doc.value("rng", std::string{});
    m.scenario = doc.at("scenario").get<std::string>();
    m.source_scenario = doc.value("source_scenario", std::string{});
    m.runs_expected = doc.at("runs_expected").get<int>();
    for (const auto& r : doc.at("runs")) {
      RunRecord rec;
      rec.run_index = r.at("run_index").get<int>();
      rec.seed = r.at("seed").get<std::uint64_t>();
      rec.steps = r.at("steps").get<std::int64_t>();
      rec.particles = r.at("particles").get<std::size_t>();
      rec.digest = r.at("digest").get<std::string>();
      rec.edges = r.at("edges").get<std::string>();
      rec.metadata = r.value("metadata", std::string{});
      for (const auto& s : r.at("snapshots"))
        rec.snapshots.push_back({s.at("step").get<std::int64_t>(), s.at("occupancy").get<std::string>(),
                                 s.at("chemo").get<std::string>()});
      m.runs.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(e.what(), "manifest");
  }
  std::sort(m.runs.begin(), m.runs.end(), [](const auto& a, const auto& b) { return a.run_index < b.run_index; });
  return m;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  int parallel = 1;
  bool write_snapshots = true;
};

namespace detail {

inline std::string run_dir_name(int i) {
  std::ostringstream os;
  os << "run_" << std::setw(3) << std::setfill('0') << i;
  return os.str();
}

inline std::string step_name(std::int64_t step) {
  std::ostringstream os;
  os << "step_" << std::setw(5) << std::setfill('0') << step;
  return os.str();
}

inline nlohmann::json run_metadata(const Scenario& sc, const RunResult& r) {
  return {{"tool_version", kToolVersion},
          {"rng", kRngAlgorithm},
          {"run_index", r.run_index},
          {"base_seed", sc.base_seed},
          {"seed", r.seed},
          {"steps", r.steps},
          {"particles", r.final_state.particles.size()},
          {"digest", r.digest},
          {"nutrient", to_string(sc.nutrient)},
          {"dilation", sc.dilation},
          {"params", to_json(sc.params)}};
}

}  // namespace detail

/// Runs every run of the scenario on up to `parallel` worker threads. Files
/// for a run are written before its manifest record; the manifest is
/// rewritten (serialised) after each run completes.
inline Manifest cmd_simulate(const Scenario& sc, const fs::path& out_dir, const SimulateOptions& opt = {},
                             const fs::path& source_scenario = {}) {
  if (opt.parallel < 1) throw ValidationError("must be >= 1", "parallel");
  make_dir(out_dir);
  Manifest m;
  m.scenario = "scenario.json";
  m.source_scenario = source_scenario.empty() ? "" : fs::absolute(source_scenario).string();
  m.runs_expected = sc.runs;
  write_json(out_dir / m.scenario, dump_scenario(sc));
  const auto manifest_path = out_dir / "manifest.json";
  write_json(manifest_path, to_json(m));

  std::mutex mu;
  std::atomic<int> next{0};
  std::exception_ptr failure;

  auto work = [&] {
    for (;;) {
      {
        std::lock_guard lock(mu);
        if (failure) return;
      }
      const int i = next.fetch_add(1);
      if (i >= sc.runs) return;
      try {
        spdlog::info("run {} started (seed {})", i, run_seed(sc.base_seed, static_cast<std::uint64_t>(i)));
        const RunResult r = run(sc, i);
        const auto rel = fs::path(detail::run_dir_name(i));
        make_dir(out_dir / rel);
        RunRecord rec{i, r.seed, r.steps, r.final_state.particles.size(), r.digest, {}, {}, {}};
        if (opt.write_snapshots) {
          const std::string ext = "." + sc.snapshot_format;
          for (const auto& s : r.snapshots) {
            const auto base = rel / detail::step_name(s.step);
            SnapshotRecord sr{s.step, (base.string() + "_occupancy" + ext), (base.string() + "_chemo" + ext)};
            write_image(out_dir / sr.occupancy, s.occupancy);
            write_image(out_dir / sr.chemo, s.chemo);
            rec.snapshots.push_back(std::move(sr));
          }
        }
        rec.edges = (rel / "edges.json").string();
        rec.metadata = (rel / "metadata.json").string();
        write_json(out_dir / rec.edges, edge_list_json(r));
        write_json(out_dir / rec.metadata, detail::run_metadata(sc, r));
        spdlog::info("run {} done: {} particles, {} edges, digest {}", i, rec.particles, r.edges.edge_count(), r.digest);

        std::lock_guard lock(mu);
        auto pos = std::lower_bound(m.runs.begin(), m.runs.end(), i,
                                    [](const RunRecord& a, int idx) { return a.run_index < idx; });
        m.runs.insert(pos, std::move(rec));
        write_json(manifest_path, to_json(m));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const int workers = std::min(opt.parallel, sc.runs);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return m;
}

inline Manifest load_manifest(const fs::path& path) { return manifest_from_json(read_json(path)); }

/// Per-run edge sets named by the manifest, over the scenario's cities.
inline std::vector<CityGraph> load_edge_sets(const Manifest& m, const fs::path& out_dir, const CitySet& cities) {
  std::vector<CityGraph> out;
  for (const auto& r : m.runs) {
    auto g = graph_from_json(read_json(out_dir / r.edges), cities.names());
    if (!same_nodes(g, CityGraph(cities.names())))
      throw ValidationError("edge list " + r.edges + " is not over the scenario's cities", "manifest");
    out.push_back(std::move(g));
  }
  return out;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::vector<Ratio> thetas;  ///< threshold graphs to export; empty = 1/k ... k/k
  std::optional<fs::path> road_graph;
  std::optional<fs::path> lab_graph;
  std::optional<Ratio> mst_floor;
  std::vector<Edge> mst_floor_exempt;
  bool allow_partial = false;
};

struct AnalyzeResult {
  WeightedCityGraph simulated;
  FindingsReport report;
  std::vector<fs::path> exports;
};

inline std::string theta_file_tag(const Ratio& t) { return std::to_string(t.num) + "_" + std::to_string(t.den); }

/// Aggregates the campaign in `campaign_dir`, sweeps thresholds and writes
/// the findings report plus DOT/JSON/CSV exports to `out_dir`.
inline AnalyzeResult cmd_analyze(const fs::path& campaign_dir, const fs::path& out_dir, const AnalyzeOptions& opt = {}) {
  const auto m = load_manifest(campaign_dir / "manifest.json");
  if (!m.complete()) {
    if (!opt.allow_partial)
      throw ValidationError("manifest lists " + std::to_string(m.runs.size()) + " of " + std::to_string(m.runs_expected) +
                                " runs; pass --allow-partial to analyse anyway",
                            "manifest");
    spdlog::warn("analysing a partial campaign ({} of {} runs)", m.runs.size(), m.runs_expected);
  }
  if (m.runs.empty()) throw ValidationError("manifest lists no runs", "manifest");
  const auto sc = load_scenario(read_json(campaign_dir / m.scenario), campaign_dir);
  const auto pts = sc.cities.points();

  AnalyzeResult res;
  res.simulated = aggregate(load_edge_sets(m, campaign_dir, sc.cities));

  std::optional<CityGraph> h;
  const auto road = opt.road_graph ? opt.road_graph : sc.road_graph;
  if (road) {
    if (fs::exists(*road)) h = load_road_graph(*road, sc.cities);
    else spdlog::warn("road graph {} not found; relations involving it are skipped", road->string());
  }
  std::optional<WeightedCityGraph> lab;
  if (opt.lab_graph) lab = weighted_from_json(read_json(*opt.lab_graph));

  FindingsOptions fo;
  fo.mst_floor = opt.mst_floor;
  fo.mst_floor_exempt = opt.mst_floor_exempt;
  fo.partial = !m.complete();
  res.report = findings_report(lab ? &*lab : nullptr, &res.simulated, h ? &*h : nullptr, pts, fo);

  make_dir(out_dir);
  auto emit = [&](const fs::path& name, const std::string& text) {
    write_text(out_dir / name, text);
    res.exports.push_back(out_dir / name);
  };
  const auto pos = pts.positions();
  emit("weighted.json", to_json(res.simulated).dump(2) + "\n");
  emit("weights.csv", to_csv(res.simulated));
  std::map<Edge, std::string> labels;
  for (const auto& [e, c] : res.simulated.counts) labels[e] = Ratio(c, res.simulated.k).str();
  emit("weighted.dot", to_dot(res.simulated.support(), "V", pos, labels));

  const auto thetas = opt.thetas.empty() ? theta_sweep(res.simulated.k) : opt.thetas;
  for (const auto& t : thetas) {
    const auto g = threshold(res.simulated, t);
    const auto tag = "threshold_" + theta_file_tag(t);
    nlohmann::json doc = to_json(g);
    doc["theta"] = t.str();
    doc["theta_decimal"] = t.value();
    emit(tag + ".json", doc.dump(2) + "\n");
    emit(tag + ".dot", to_dot(g, "V(" + t.str() + ")", pos));
  }
  if (h) emit("road_graph.dot", to_dot(*h, "H", pos));
  emit("findings.json", to_json(res.report).dump(2) + "\n");
  emit("findings.txt", to_text(res.report));
  return res;
}

// ---------------------------------------------------------------------------
// proximity

struct ProximityResult {
  CityGraph gg, rng, mst;
  GrowthSequence growth;
  PlanarityReport planarity;
};

inline nlohmann::json to_json(const GrowthSequence& g) {
  auto stages = nlohmann::json::array();
  for (std::size_t i = 0; i < g.stages.size(); ++i)
    stages.push_back({{"stage", i + 1}, {"node", g.stages[i].node}, {"edge", {g.stages[i].edge.a, g.stages[i].edge.b}}});
  return {{"root", g.root}, {"stages", stages}};
}

inline ProximityResult cmd_proximity(const Scenario& sc, const fs::path& out_dir, const std::string& root = {}) {
  const auto pts = sc.cities.points();
  ProximityResult r{gabriel_graph(pts), rng_graph(pts), emst(pts), prim_growth(pts, root.empty() ? sc.root : root), {}};
  r.planarity = straightline_planar(r.mst, pts);

  make_dir(out_dir);
  const auto pos = pts.positions();
  for (const auto& [name, g] : {std::pair<const char*, const CityGraph*>{"gabriel", &r.gg}, {"rng", &r.rng}, {"mst", &r.mst}}) {
    nlohmann::json doc = to_json(*g);
    doc["total_length"] = total_length(*g, pts);
    write_json(out_dir / (std::string(name) + ".json"), doc);
    write_text(out_dir / (std::string(name) + ".dot"), to_dot(*g, name, pos));
  }
  write_json(out_dir / "growth.json", to_json(r.growth));
  std::ostringstream os;
  os << "GG edges: " << r.gg.edge_count() << "\nRNG edges: " << r.rng.edge_count() << "\nMST edges: " << r.mst.edge_count()
     << " (length " << total_length(r.mst, pts) << ")\nMST = RNG: " << (r.mst == r.rng ? "yes" : "no")
     << "\nMST ⊆ RNG: " << (is_subgraph(r.mst, r.rng).holds ? "yes" : "no")
     << "\nRNG ⊆ GG: " << (is_subgraph(r.rng, r.gg).holds ? "yes" : "no") << "\ngrowth from " << r.growth.root << ":\n";
  for (std::size_t i = 0; i < r.growth.stages.size(); ++i)
    os << "  " << i + 1 << ". " << r.growth.stages[i].node << " via " << to_string(r.growth.stages[i].edge) << '\n';
  write_text(out_dir / "proximity.txt", os.str());
  return r;
}

// ---------------------------------------------------------------------------
// render

struct RenderOptions {
  int scale = 2;
  bool labels = true;
};

/// Map, optional occupancy mask, optional graph, city markers.
inline Image render_overlay(const Scenario& sc, const Image* occupancy, const CityGraph* graph, const RenderOptions& opt = {}) {
  auto cv = map_canvas(sc.habitat, opt.scale);
  if (occupancy) {
    if (occupancy->width != sc.habitat.width() || occupancy->height != sc.habitat.height())
      throw ValidationError("snapshot size differs from the map", "render");
    overlay_mask(cv, *occupancy, palette::kParticle);
  }
  if (graph) draw_graph(cv, *graph, sc.cities, palette::kEdge, std::max(1, opt.scale));
  draw_cities(cv, sc.cities, opt.labels);
  return cv.image();
}

/// Renders the final snapshot of every run in a campaign, overlaid with that
/// run's extracted graph. Returns the written paths.
inline std::vector<fs::path> cmd_render_campaign(const fs::path& campaign_dir, const fs::path& out_dir,
                                                 const RenderOptions& opt = {}) {
  const auto m = load_manifest(campaign_dir / "manifest.json");
  const auto sc = load_scenario(read_json(campaign_dir / m.scenario), campaign_dir);
  make_dir(out_dir);
  std::vector<fs::path> out;
  for (const auto& r : m.runs) {
    const auto g = graph_from_json(read_json(campaign_dir / r.edges), sc.cities.names());
    std::optional<Image> occ;
    if (!r.snapshots.empty()) occ = read_image(campaign_dir / r.snapshots.back().occupancy);
    const auto p = out_dir / (detail::run_dir_name(r.run_index) + "_final.png");
    write_png(p, render_overlay(sc, occ ? &*occ : nullptr, &g, opt));
    out.push_back(p);
  }
  return out;
}

/// Renders graph documents (plain or threshold exports) over the scenario map.
inline std::vector<fs::path> cmd_render_graphs(const Scenario& sc, const std::vector<fs::path>& graphs,
                                               const fs::path& out_dir, const RenderOptions& opt = {}) {
  make_dir(out_dir);
  std::vector<fs::path> out;
  if (graphs.empty()) {
    const auto p = out_dir / "cities.png";
    write_png(p, render_overlay(sc, nullptr, nullptr, opt));
    out.push_back(p);
  }
  for (const auto& gp : graphs) {
    const auto g = graph_from_json(read_json(gp), sc.cities.names());
    const auto p = out_dir / (gp.stem().string() + ".png");
    write_png(p, render_overlay(sc, nullptr, &g, opt));
    out.push_back(p);
  }
  return out;
}

}  // namespace slimenet
