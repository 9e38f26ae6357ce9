#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slimenet/netextract.hpp"
#include "slimenet/plasmodium.hpp"
#include "slimenet/raster.hpp"
#include "slimenet/scenario.hpp"

namespace slimenet {

/// Binary occupancy image: 255 where a particle sits.
inline Image occupancy_image(const SimState& s) {
  Image img(s.width, s.height, 1, 0);
  for (const auto& p : s.particles) img.at(p.cell.x, p.cell.y) = 255;
  return img;
}

/// Chemo normalised to the lattice maximum.
inline Image chemo_image(const SimState& s) {
  Image img(s.width, s.height, 1, 0);
  const double peak = s.chemo.empty() ? 0.0 : *std::max_element(s.chemo.begin(), s.chemo.end());
  if (peak <= 0) return img;
  for (std::size_t i = 0; i < s.chemo.size(); ++i)
    img.data[i] = static_cast<std::uint8_t>(std::lround(255.0 * s.chemo[i] / peak));
  return img;
}

struct Snapshot {
  std::int64_t step = 0;
  std::size_t particles = 0;
  std::string digest;
  Image occupancy;
  Image chemo;
};

struct RunResult {
  int run_index = 0;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  std::string digest;
  SimState final_state;
  std::vector<Snapshot> snapshots;
  CityGraph edges;
};

/// Called after each step with the state; return false to abort.
using StepObserver = std::function<bool(const SimState&)>;

/// Seeds with base_seed ^ run_index, runs `sc.steps` steps, snapshots at the
/// scheduled steps (0 = initial state) and extracts the city graph from the
/// final particle positions.
inline RunResult run(const Scenario& sc, int run_index, const StepObserver& observe = {}) {
  if (run_index < 0 || run_index >= sc.runs)
    throw ValidationError("run index " + std::to_string(run_index) + " outside [0, runs)", "run_index");
  RunResult r;
  r.run_index = run_index;
  r.seed = run_seed(sc.base_seed, static_cast<std::uint64_t>(run_index));

  SimState s = init_population(sc, r.seed);
  auto snap = [&] {
    if (std::binary_search(sc.snapshot_steps.begin(), sc.snapshot_steps.end(), static_cast<int>(s.step)))
      r.snapshots.push_back({s.step, s.particles.size(), state_digest(s), occupancy_image(s), chemo_image(s)});
  };
  snap();
  StepScratch scratch;
  for (int i = 0; i < sc.steps; ++i) {
    step(s, sc, scratch);
    snap();
    if (observe && !observe(s)) break;
  }
  r.steps = s.step;
  r.digest = state_digest(s);
  r.edges = extract_with_dilation(s, sc.cities, sc.habitat, sc.dilation);
  r.final_state = std::move(s);
  return r;
}

/// Per-run edge list document: {run_index, seed, edges: [[name, name], ...]}.
inline nlohmann::json edge_list_json(const RunResult& r) {
  return {{"run_index", r.run_index}, {"seed", r.seed}, {"nodes", r.edges.nodes()}, {"edges", edges_to_json(r.edges.edges())}};
}

}  // namespace slimenet
