// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "slimenet/commands.hpp"

namespace fs = std::filesystem;
using namespace slimenet;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and sizes.
constexpr int kHierarchySets = 200;
constexpr int kHierarchyMinN = 3, kHierarchyMaxN = 12;
constexpr double kHierarchySeconds = 10.0;
constexpr int kDeterminismRuns = 3, kDeterminismSteps = 500;
constexpr double kDeterminismSeconds = 120.0;
constexpr double kSpikeTolerance = 1e-9;
constexpr int kCampaignRuns = 20, kCampaignSteps = 6192;
constexpr double kConnectedFraction = 0.70;
constexpr std::size_t kConnectedCities = 9;
const Ratio kMstFloor(10, 20);

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// --- brute-force proximity oracles ------------------------------------------------

CityGraph oracle_gabriel(const PointSet& p) {
  CityGraph g(p.ids());
  const auto n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2 a = p[i].at, b = p[j].at;
      const Vec2 m{(a.x + b.x) / 2, (a.y + b.y) / 2};
      const double r2 = dist2(a, b) / 4;
      bool empty = true;
      for (std::size_t k = 0; k < n && empty; ++k)
        if (k != i && k != j && dist2(p[k].at, m) < r2) empty = false;
      if (empty) g.add_edge(p[i].id, p[j].id);
    }
  return g;
}

CityGraph oracle_rng(const PointSet& p) {
  CityGraph g(p.ids());
  const auto n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist2(p[i].at, p[j].at);
      bool empty = true;
      for (std::size_t k = 0; k < n && empty; ++k)
        if (k != i && k != j && std::max(dist2(p[i].at, p[k].at), dist2(p[j].at, p[k].at)) < d) empty = false;
      if (empty) g.add_edge(p[i].id, p[j].id);
    }
  return g;
}

// Cycle property with distinct lengths: ij is in the MST iff i and j are not
// joined by a path of strictly shorter edges.
CityGraph oracle_mst(const PointSet& p) {
  CityGraph g(p.ids());
  const auto n = p.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = dist2(p[i].at, p[j].at);
      std::vector<char> seen(n, 0);
      std::vector<std::size_t> stack{i};
      seen[i] = 1;
      while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (std::size_t v = 0; v < n; ++v)
          if (!seen[v] && dist2(p[u].at, p[v].at) < d) {
            seen[v] = 1;
            stack.push_back(v);
          }
      }
      if (!seen[j]) g.add_edge(p[i].id, p[j].id);
    }
  return g;
}

bool distinct_lengths(const PointSet& p) {
  std::vector<double> d;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) d.push_back(dist2(p[i].at, p[j].at));
  std::sort(d.begin(), d.end());
  return std::adjacent_find(d.begin(), d.end()) == d.end();
}

Outcome c1_hierarchy() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20260101);
  std::uniform_int_distribution<int> size(kHierarchyMinN, kHierarchyMaxN);
  std::uniform_real_distribution<double> coord(0.0, 1000.0);
  int violations = 0, sets = 0;
  while (sets < kHierarchySets) {
    const int n = size(gen);
    std::vector<Site> sites;
    for (int i = 0; i < n; ++i) sites.push_back({"p" + std::to_string(i), {coord(gen), coord(gen)}});
    PointSet p(std::move(sites));
    if (!distinct_lengths(p)) continue;
    ++sets;
    const auto gg = gabriel_graph(p), rg = rng_graph(p), mst = emst(p);
    if (!(gg == oracle_gabriel(p)) || !(rg == oracle_rng(p)) || !(mst == oracle_mst(p))) ++violations;
    if (!is_subgraph(mst, rg).holds || !is_subgraph(rg, gg).holds) ++violations;
    if (mst.edge_count() != static_cast<std::size_t>(n - 1)) ++violations;
  }
  const double s = seconds_since(t0);
  std::ostringstream os;
  os << sets << " sets, " << violations << " violations, " << s << " s";
  return {violations == 0 && s < kHierarchySeconds, os.str()};
}

Outcome c2_mst_equals_rng(const Scenario& italy) {
  const auto p = italy.cities.points();
  const auto mst = emst(p), rg = rng_graph(p);
  std::ostringstream os;
  os << "MST " << mst.edge_count() << " edges, RNG " << rg.edge_count() << " edges";
  return {mst == rg, os.str()};
}

Outcome c3_threshold_algebra() {
  std::mt19937_64 gen(33);
  int trials = 0, violations = 0;
  for (; trials < 300; ++trials) {
    const int k = 1 + static_cast<int>(gen() % 30);
    const int n = 3 + static_cast<int>(gen() % 10);
    std::vector<std::string> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back("c" + std::to_string(i));
    std::bernoulli_distribution keep(0.1 + 0.05 * static_cast<double>(gen() % 10));
    std::vector<CityGraph> sets;
    CityGraph uni(nodes);
    for (int r = 0; r < k; ++r) {
      CityGraph g(nodes);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (keep(gen)) g.add_edge(nodes[i], nodes[j]), uni.add_edge(nodes[i], nodes[j]);
      sets.push_back(std::move(g));
    }
    const auto w = aggregate(sets, k);
    if (!(threshold(w, Ratio(1, k)) == uni)) ++violations;
    std::size_t prev = threshold(w, Ratio(0, 1)).edge_count();
    for (int c = 1; c <= k + 1; ++c) {
      const auto e = threshold(w, Ratio(c, k)).edge_count();
      if (e > prev) ++violations;
      prev = e;
    }
    if (prev != 0) ++violations;
  }
  return {violations == 0, std::to_string(trials) + " weighted graphs, " + std::to_string(violations) + " violations"};
}

Outcome c4_twelve_of_28() {
  std::vector<CityGraph> sets;
  for (int i = 0; i < 28; ++i) {
    CityGraph g({"a", "b"});
    if (i < 12) g.add_edge("a", "b");
    sets.push_back(std::move(g));
  }
  const auto w = aggregate(sets, 28).weight("a", "b");
  return {w.identical(Ratio(12, 28)) && w.str() == "12/28", "weight " + w.str()};
}

Outcome c5_determinism(const Scenario& italy, const fs::path& work) {
  const auto t0 = Clock::now();
  Overrides o;
  o.runs = kDeterminismRuns;
  o.steps = kDeterminismSteps;
  const auto sc = apply(italy, o);
  const auto a = cmd_simulate(sc, work / "determinism_p1", {1, false});
  const auto b = cmd_simulate(sc, work / "determinism_p2", {2, false});
  bool same = a.runs.size() == static_cast<std::size_t>(kDeterminismRuns) && b.runs.size() == a.runs.size();
  for (std::size_t i = 0; same && i < a.runs.size(); ++i) {
    same = a.runs[i].digest == b.runs[i].digest &&
           slurp(work / "determinism_p1" / a.runs[i].edges) == slurp(work / "determinism_p2" / b.runs[i].edges);
  }
  const double s = seconds_since(t0);
  std::ostringstream os;
  os << "digests";
  for (const auto& r : a.runs) os << " " << r.digest;
  os << ", " << s << " s";
  return {same && s < kDeterminismSeconds, os.str()};
}

Outcome c6_diffusion() {
  const auto h = HabitatMap::open(9, 9);
  auto s = empty_state(h, 1);
  s.chemo[s.index(4, 4)] = 255.0;
  diffuse(s, h, 0.9);
  double worst = 0;
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 9; ++x) {
      const bool near = std::abs(x - 4) <= 1 && std::abs(y - 4) <= 1;
      worst = std::max(worst, std::abs(s.chemo[s.index(x, y)] - (near ? 25.5 : 0.0)));
    }
  bool exact = true;
  for (double v : {1.0, 100.0, 255.0}) {
    auto u = empty_state(h, 1);
    std::fill(u.chemo.begin(), u.chemo.end(), v);
    diffuse(u, h, 0.9);
    for (int y = 1; y < 8; ++y)
      for (int x = 1; x < 8; ++x) exact = exact && u.chemo[u.index(x, y)] == 0.9 * v;
  }
  std::ostringstream os;
  os << "max spike error " << worst << ", uniform interior factor " << (exact ? "exactly 0.9" : "not 0.9");
  return {worst <= kSpikeTolerance && exact, os.str()};
}

Outcome c9_planarity(const Scenario& italy) {
  const auto p = italy.cities.points();
  const auto mst = emst(p);
  auto with_chord = mst;
  with_chord.add_edge("Bononia", "Roma");
  const auto alone = straightline_planar(mst, p);
  const auto chord = straightline_planar(with_chord, p);
  bool flagged = false;
  for (const auto& [e1, e2] : chord.crossings)
    flagged = flagged || e1 == Edge::make("Bononia", "Roma") || e2 == Edge::make("Bononia", "Roma");
  std::ostringstream os;
  os << "MST planar: " << (alone.planar ? "yes" : "no") << ", with Bononia-Roma: " << chord.crossings.size() << " crossing(s)";
  return {alone.planar && !chord.planar && flagged, os.str()};
}

Outcome c10_vicinity_rule() {
  const auto h = HabitatMap::open(40, 40);
  CitySet cs{{{"west", 4, 20}, {"east", 35, 20}, {"middle", 20, 20}}, 3};
  OccupancyField f(40, 40);
  for (int x = 4; x <= 35; ++x) f.set(x, 20);
  const auto g = extract_edges(f, cs, h);
  const bool ok = g.has_edge("west", "middle") && g.has_edge("east", "middle") && !g.has_edge("west", "east") &&
                  g.edge_count() == 2;
  std::string edges;
  for (const auto& e : g.edges()) edges += " " + to_string(e);
  return {ok, "edges:" + edges};
}

struct CampaignOutcome {
  Outcome formation, mst_floor;
};

CampaignOutcome c7_c8_campaign(const Scenario& italy, const fs::path& work) {
  Overrides o;
  o.runs = kCampaignRuns;
  o.steps = kCampaignSteps;
  const auto sc = apply(italy, o);
  const auto dir = work / "campaign";
  const auto t0 = Clock::now();
  const auto m = cmd_simulate(sc, dir, {static_cast<int>(std::max(1u, std::thread::hardware_concurrency())), false});
  const double sim_s = seconds_since(t0);

  int connected = 0;
  std::ostringstream sizes;
  for (const auto& g : load_edge_sets(m, dir, sc.cities)) {
    const auto big = largest_component(g);
    connected += big >= kConnectedCities;
    sizes << " " << big;
  }
  const double frac = static_cast<double>(connected) / kCampaignRuns;
  std::ostringstream f;
  f << connected << "/" << kCampaignRuns << " runs with a component of >= " << kConnectedCities
    << " cities (largest per run:" << sizes.str() << "), " << sim_s << " s";

  AnalyzeOptions ao;
  ao.mst_floor = kMstFloor;
  ao.mst_floor_exempt = {Edge::make("Placentia", "Bononia"), Edge::make("Genua", "Florenzia")};
  const auto res = cmd_analyze(dir, dir / "analysis", ao);
  const auto* rel = res.report.find("MST edges reach " + kMstFloor.str() + " in V");
  std::ostringstream w;
  w << "MST weights:";
  const auto mst = emst(sc.cities.points());
  for (const auto& e : mst.edges()) w << " " << to_string(e) << "=" << res.simulated.weight(e).str();
  w << "; report " << (dir / "analysis" / "findings.txt").string();
  return {{frac >= kConnectedFraction, f.str()}, {rel && rel->verdict == Verdict::Holds, w.str()}};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "slimenet_acceptance";
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--work-dir") work = argv[i + 1];
  fs::create_directories(work);
  spdlog::set_level(spdlog::level::warn);

  const auto italy = load_scenario_file(fs::path(SLIMENET_DATA_DIR) / "italy" / "italy_scenario.json");

  int failures = 0;
  auto report = [&](int n, const char* name, const Outcome& o) {
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", n, name, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  };
  auto guarded = [&](const std::function<Outcome()>& f) {
    try {
      return f();
    } catch (const std::exception& e) {
      return Outcome{false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "proximity hierarchy", guarded(c1_hierarchy));
  report(2, "MST equals RNG on the fixture", guarded([&] { return c2_mst_equals_rng(italy); }));
  report(3, "threshold algebra", guarded(c3_threshold_algebra));
  report(4, "rational weights", guarded(c4_twelve_of_28));
  report(5, "simulation determinism", guarded([&] { return c5_determinism(italy, work); }));
  report(6, "diffusion kernel", guarded(c6_diffusion));
  CampaignOutcome camp;
  try {
    camp = c7_c8_campaign(italy, work);
  } catch (const std::exception& e) {
    camp.formation = camp.mst_floor = {false, std::string("exception: ") + e.what()};
  }
  report(7, "network formation", camp.formation);
  report(8, "MST edge weights", camp.mst_floor);
  report(9, "planarity", guarded([&] { return c9_planarity(italy); }));
  report(10, "vicinity edge rule", guarded(c10_vicinity_rule));
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
