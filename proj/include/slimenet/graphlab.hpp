#pragma once

// Weighted city graphs from repeated runs, threshold graphs, the reference
// road graph, and the relation checks reported over them.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slimenet/error.hpp"
#include "slimenet/geometry.hpp"
#include "slimenet/graph.hpp"
#include "slimenet/habitat.hpp"
#include "slimenet/rational.hpp"

namespace slimenet {

/// Edge occurrence counts over k experiments; weight = count/k.
struct WeightedCityGraph {
  std::vector<std::string> nodes;
  std::map<Edge, std::int64_t> counts;  ///< only edges with count >= 1
  std::int64_t k = 1;

  Ratio weight(const Edge& e) const {
    auto it = counts.find(e);
    return Ratio(it == counts.end() ? 0 : it->second, k);
  }
  Ratio weight(const std::string& a, const std::string& b) const { return weight(Edge::make(a, b)); }

  CityGraph support() const {
    CityGraph g(nodes);
    for (const auto& [e, c] : counts) g.add_edge(e);
    return g;
  }
};

inline WeightedCityGraph aggregate(const std::vector<CityGraph>& edge_sets, std::int64_t k) {
  if (k < 1) throw ValidationError("k must be >= 1", "k");
  if (static_cast<std::int64_t>(edge_sets.size()) != k)
    throw ValidationError("expected " + std::to_string(k) + " edge sets, got " + std::to_string(edge_sets.size()), "k");
  WeightedCityGraph w;
  w.k = k;
  w.nodes = edge_sets.front().nodes();
  for (const auto& g : edge_sets) {
    require_same_nodes(edge_sets.front(), g);
    for (const auto& e : g.edges()) ++w.counts[e];
  }
  return w;
}

inline WeightedCityGraph aggregate(const std::vector<CityGraph>& edge_sets) {
  if (edge_sets.empty()) throw ValidationError("no edge sets to aggregate", "k");
  return aggregate(edge_sets, static_cast<std::int64_t>(edge_sets.size()));
}

/// Keeps edges with weight >= theta. Every node is kept.
inline CityGraph threshold(const WeightedCityGraph& p, const Ratio& theta) {
  if (theta.num < 0) throw ValidationError("threshold must be non-negative", "theta");
  CityGraph g(p.nodes);
  for (const auto& [e, c] : p.counts)
    if (Ratio(c, p.k) >= theta) g.add_edge(e);
  return g;
}

/// Lowest threshold that keeps every observed edge.
inline Ratio raw_theta(const WeightedCityGraph& p) { return Ratio(1, p.k); }

/// About one third of the runs: floor(k/3)/k, at least 1/k.
inline Ratio strong_theta(const WeightedCityGraph& p) { return Ratio(std::max<std::int64_t>(1, p.k / 3), p.k); }

/// 1/k, 2/k, ..., k/k.
inline std::vector<Ratio> theta_sweep(std::int64_t k) {
  std::vector<Ratio> out;
  for (std::int64_t i = 1; i <= k; ++i) out.emplace_back(i, k);
  return out;
}

inline nlohmann::json to_json(const WeightedCityGraph& p) {
  auto edges = nlohmann::json::array();
  for (const auto& [e, c] : p.counts) {
    const Ratio w(c, p.k);
    edges.push_back({{"a", e.a}, {"b", e.b}, {"count", c}, {"weight", w.str()}, {"weight_decimal", w.value()}});
  }
  return {{"nodes", p.nodes}, {"k", p.k}, {"edges", edges}};
}

/// Reads the to_json form. Edges may give "count" or a "weight" string "c/k".
inline WeightedCityGraph weighted_from_json(const nlohmann::json& doc) {
  WeightedCityGraph p;
  try {
    p.k = doc.at("k").get<std::int64_t>();
    if (p.k < 1) throw ValidationError("k must be >= 1", "k");
    CityGraph probe(doc.at("nodes").get<std::vector<std::string>>());
    p.nodes = probe.nodes();
    for (const auto& e : doc.at("edges")) {
      const auto a = e.at("a").get<std::string>(), b = e.at("b").get<std::string>();
      probe.add_edge(a, b);
      std::int64_t c = 0;
      if (e.contains("count")) {
        c = e.at("count").get<std::int64_t>();
      } else {
        const Ratio w = parse_ratio(e.at("weight").get<std::string>());
        if (w.den != p.k) throw ValidationError("weight denominator differs from k", "edges");
        c = w.num;
      }
      if (c < 1 || c > p.k) throw ValidationError("count outside [1, k] for " + a + "-" + b, "edges");
      p.counts[Edge::make(a, b)] = c;
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(ex.what(), "weighted graph");
  }
  return p;
}

// ---------------------------------------------------------------------------
// Reference road graph

/// Edge list over the scenario's cities. Nodes are always the full city set;
/// a document without edges (or an empty file) is the edgeless graph.
inline CityGraph load_road_graph(const nlohmann::json& doc, const CitySet& cities) {
  CityGraph h(cities.names());
  if (doc.is_null()) return h;
  if (!doc.is_object()) throw ValidationError("road graph must be an object", "road_graph");
  if (!doc.contains("edges")) return h;
  try {
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw ValidationError("edge must be a [name, name] pair", "road_graph.edges");
      for (const auto& n : e)
        if (!h.has_node(n.get<std::string>()))
          throw ValidationError("unknown city '" + n.get<std::string>() + "'", "road_graph.edges");
      h.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(ex.what(), "road_graph");
  }
  return h;
}

inline CityGraph load_road_graph(const std::filesystem::path& path, const CitySet& cities) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open road graph " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const auto text = buf.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return CityGraph(cities.names());
  try {
    return load_road_graph(nlohmann::json::parse(text), cities);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what(), "road_graph");
  }
}

// ---------------------------------------------------------------------------
// Set algebra and components

inline CityGraph intersect(const CityGraph& g1, const CityGraph& g2) {
  require_same_nodes(g1, g2);
  CityGraph out(g1.nodes());
  for (const auto& e : g1.edges())
    if (g2.has_edge(e)) out.add_edge(e);
  return out;
}

struct Inclusion {
  bool holds = true;
  std::vector<Edge> missing;  ///< edges of the left graph absent from the right
};

inline Inclusion is_subgraph(const CityGraph& g1, const CityGraph& g2) {
  require_same_nodes(g1, g2);
  Inclusion r;
  for (const auto& e : g1.edges())
    if (!g2.has_edge(e)) r.missing.push_back(e);
  r.holds = r.missing.empty();
  return r;
}

/// Connected components, each sorted by name; components ordered by their
/// first member.
inline std::vector<std::vector<std::string>> components(const CityGraph& g) {
  std::map<std::string, std::string> parent;
  for (const auto& n : g.nodes()) parent[n] = n;
  std::function<std::string(const std::string&)> root = [&](const std::string& x) -> std::string {
    if (parent[x] == x) return x;
    return parent[x] = root(parent[x]);
  };
  for (const auto& e : g.edges()) parent[root(e.a)] = root(e.b);
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& [n, _] : parent) groups[root(n)].push_back(n);
  std::vector<std::vector<std::string>> out;
  for (auto& [_, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::string> isolated(const CityGraph& g) {
  std::vector<std::string> out;
  for (const auto& c : components(g))
    if (c.size() == 1) out.push_back(c.front());
  return out;
}

inline std::size_t largest_component(const CityGraph& g) {
  std::size_t best = 0;
  for (const auto& c : components(g)) best = std::max(best, c.size());
  return best;
}

// ---------------------------------------------------------------------------
// Findings

enum class Verdict { Holds, Fails, Skipped };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Skipped: return "skipped";
  }
  return "?";
}

struct Relation {
  std::string name;
  Verdict verdict = Verdict::Skipped;
  std::vector<Edge> witnesses;  ///< offending edges when the relation fails
  bool fixture_dependent = false;
  std::string note;
};

struct SweepRow {
  Ratio theta;
  std::size_t edges = 0;
  bool planar = true;
  std::vector<std::pair<Edge, Edge>> crossings;
  std::vector<std::vector<std::string>> components;
  std::vector<std::string> isolated;
  bool connected = false;
  bool contains_mst = false;
  std::vector<Edge> mst_missing;
};

struct GraphSweep {
  std::string label;
  std::int64_t k = 1;
  std::vector<SweepRow> rows;
  std::optional<Ratio> last_connected;  ///< largest theta whose graph is connected
  std::vector<std::string> events;      ///< component splits and new isolated cities
};

struct FindingsReport {
  bool partial = false;
  std::vector<Relation> relations;
  std::vector<GraphSweep> sweeps;

  const Relation* find(const std::string& name) const {
    for (const auto& r : relations)
      if (r.name == name) return &r;
    return nullptr;
  }
};

struct FindingsOptions {
  std::optional<Ratio> lab_theta;   ///< left side of lab(θ) ⊆ sim(θ'); default 1/2
  std::optional<Ratio> sim_theta;   ///< right side; default 1
  /// MST edges of the simulated graph must reach this weight unless exempt.
  std::optional<Ratio> mst_floor;
  std::vector<Edge> mst_floor_exempt;
  bool partial = false;
};

namespace detail {

inline Relation inclusion(std::string name, const CityGraph& a, const CityGraph& b, bool fixture_dependent = false) {
  const auto r = is_subgraph(a, b);
  return {std::move(name), r.holds ? Verdict::Holds : Verdict::Fails, r.missing, fixture_dependent, {}};
}

inline Relation skipped(std::string name, std::string why, bool fixture_dependent = true) {
  return {std::move(name), Verdict::Skipped, {}, fixture_dependent, std::move(why)};
}

inline GraphSweep sweep(const std::string& label, const WeightedCityGraph& w, const PointSet& pts, const CityGraph& mst) {
  GraphSweep s{label, w.k, {}, std::nullopt, {}};
  std::optional<SweepRow> prev;
  for (const auto& theta : theta_sweep(w.k)) {
    const auto g = threshold(w, theta);
    SweepRow row;
    row.theta = theta;
    row.edges = g.edge_count();
    auto pl = straightline_planar(g, pts);
    row.planar = pl.planar;
    row.crossings = std::move(pl.crossings);
    row.components = components(g);
    row.isolated = isolated(g);
    row.connected = row.components.size() == 1;
    const auto inc = is_subgraph(mst, g);
    row.contains_mst = inc.holds;
    row.mst_missing = inc.missing;
    if (row.connected) s.last_connected = theta;
    if (prev) {
      if (row.components.size() > prev->components.size())
        s.events.push_back(label + "(" + theta.str() + "): splits into " + std::to_string(row.components.size()) +
                           " components");
      for (const auto& n : row.isolated)
        if (std::find(prev->isolated.begin(), prev->isolated.end(), n) == prev->isolated.end())
          s.events.push_back(label + "(" + theta.str() + "): " + n + " becomes isolated");
    }
    prev = row;
    s.rows.push_back(std::move(row));
  }
  return s;
}

}  // namespace detail

/// Evaluates the inclusion relations between the proximity graphs of `pts`,
/// the road graph `h`, a laboratory graph `lab` and a simulated graph `sim`.
/// Relations whose inputs are absent are reported as skipped.
inline FindingsReport findings_report(const WeightedCityGraph* lab, const WeightedCityGraph* sim, const CityGraph* h,
                                      const PointSet& pts, const FindingsOptions& opt = {}) {
  FindingsReport rep;
  rep.partial = opt.partial;
  const auto gg = gabriel_graph(pts);
  const auto rng = rng_graph(pts);
  const auto mst = emst(pts);
  auto check_nodes = [&](const CityGraph& g) { require_same_nodes(mst, g); };
  if (h) check_nodes(*h);

  rep.relations.push_back({"MST = RNG", mst == rng ? Verdict::Holds : Verdict::Fails, {}, false, {}});
  if (!(mst == rng)) {
    for (const auto& e : rng.edges())
      if (!mst.has_edge(e)) rep.relations.back().witnesses.push_back(e);
  }
  rep.relations.push_back(detail::inclusion("MST ⊆ RNG", mst, rng));
  rep.relations.push_back(detail::inclusion("RNG ⊆ GG", rng, gg));

  struct Side {
    const char* label;
    const WeightedCityGraph* w;
  };
  for (const Side side : {Side{"P", lab}, Side{"V", sim}}) {
    const std::string l = side.label;
    if (!side.w) {
      for (const auto& n : {"H ⊆ " + l + "(raw)", l + "(strong) ⊆ H", "GG ⊆ " + l + "(raw)"})
        rep.relations.push_back(detail::skipped(n, l + " not supplied", n.find('H') != std::string::npos));
      continue;
    }
    const auto& w = *side.w;
    const auto ids = CityGraph(w.nodes);
    check_nodes(ids);
    const auto raw = threshold(w, raw_theta(w));
    const auto strong = threshold(w, strong_theta(w));
    if (h) {
      rep.relations.push_back(detail::inclusion("H ⊆ " + l + "(raw)", *h, raw, true));
      auto r = detail::inclusion(l + "(strong) ⊆ H", strong, *h, true);
      r.note = "strong = " + strong_theta(w).str();
      rep.relations.push_back(std::move(r));
    } else {
      rep.relations.push_back(detail::skipped("H ⊆ " + l + "(raw)", "road graph not supplied"));
      rep.relations.push_back(detail::skipped(l + "(strong) ⊆ H", "road graph not supplied"));
    }
    rep.relations.push_back(detail::inclusion("GG ⊆ " + l + "(raw)", gg, raw));
    rep.sweeps.push_back(detail::sweep(l, w, pts, mst));
  }

  // MST ⊆ V(θ) for the largest θ at which it holds.
  if (sim) {
    Relation r{"MST ⊆ V(θ)", Verdict::Fails, {}, false, {}};
    const auto& rows = rep.sweeps.back().rows;
    for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
      if (it->contains_mst) {
        r.verdict = Verdict::Holds;
        r.note = "largest θ = " + it->theta.str();
        break;
      }
    }
    if (r.verdict == Verdict::Fails) r.witnesses = rows.front().mst_missing;
    rep.relations.push_back(std::move(r));

    if (opt.mst_floor) {
      Relation f{"MST edges reach " + opt.mst_floor->str() + " in V", Verdict::Holds, {}, false, {}};
      std::vector<std::string> below;
      for (const auto& e : mst.edges()) {
        const auto wt = sim->weight(e);
        if (wt >= *opt.mst_floor) continue;
        const bool exempt = std::find(opt.mst_floor_exempt.begin(), opt.mst_floor_exempt.end(), e) != opt.mst_floor_exempt.end();
        below.push_back(to_string(e) + "=" + wt.str() + (exempt ? " (exempt)" : ""));
        if (!exempt) {
          f.verdict = Verdict::Fails;
          f.witnesses.push_back(e);
        }
      }
      if (!below.empty()) {
        f.note = "below floor:";
        for (const auto& b : below) f.note += " " + b;
      }
      rep.relations.push_back(std::move(f));
    }
  } else {
    rep.relations.push_back(detail::skipped("MST ⊆ V(θ)", "V not supplied", false));
  }

  const Ratio lt = opt.lab_theta.value_or(Ratio(1, 2));
  const Ratio st = opt.sim_theta.value_or(Ratio(1, 1));
  const std::string cross = "P(" + lt.str() + ") ⊆ V(" + st.str() + ")";
  if (lab && sim) rep.relations.push_back(detail::inclusion(cross, threshold(*lab, lt), threshold(*sim, st)));
  else rep.relations.push_back(detail::skipped(cross, "needs both P and V", false));

  return rep;
}

// ---------------------------------------------------------------------------
// Report output

namespace detail {

inline nlohmann::json edge_pairs(const std::vector<Edge>& es) {
  auto a = nlohmann::json::array();
  for (const auto& e : es) a.push_back({e.a, e.b});
  return a;
}

}  // namespace detail

inline nlohmann::json to_json(const FindingsReport& r) {
  auto rel = nlohmann::json::array();
  for (const auto& x : r.relations) {
    nlohmann::json j{{"name", x.name}, {"verdict", to_string(x.verdict)}, {"witnesses", detail::edge_pairs(x.witnesses)}};
    if (x.fixture_dependent) j["tags"] = {"fixture-dependent"};
    if (!x.note.empty()) j["note"] = x.note;
    rel.push_back(std::move(j));
  }
  auto sweeps = nlohmann::json::array();
  for (const auto& s : r.sweeps) {
    auto rows = nlohmann::json::array();
    for (const auto& row : s.rows) {
      auto crossings = nlohmann::json::array();
      for (const auto& [e1, e2] : row.crossings) crossings.push_back({{e1.a, e1.b}, {e2.a, e2.b}});
      rows.push_back({{"theta", row.theta.str()},
                      {"theta_decimal", row.theta.value()},
                      {"edges", row.edges},
                      {"planar", row.planar},
                      {"crossings", crossings},
                      {"components", row.components},
                      {"isolated", row.isolated},
                      {"connected", row.connected},
                      {"contains_mst", row.contains_mst},
                      {"mst_missing", detail::edge_pairs(row.mst_missing)}});
    }
    nlohmann::json j{{"graph", s.label}, {"k", s.k}, {"rows", rows}, {"events", s.events}};
    j["last_connected_theta"] = s.last_connected ? nlohmann::json(s.last_connected->str()) : nlohmann::json(nullptr);
    sweeps.push_back(std::move(j));
  }
  return {{"partial", r.partial}, {"relations", rel}, {"sweeps", sweeps}};
}

inline std::string to_text(const FindingsReport& r) {
  std::ostringstream os;
  if (r.partial) os << "NOTE: computed from a partial campaign\n\n";
  os << std::left << std::setw(34) << "relation" << std::setw(9) << "verdict" << "witnesses / notes\n";
  for (const auto& x : r.relations) {
    os << std::setw(34) << x.name << std::setw(9) << to_string(x.verdict);
    for (const auto& e : x.witnesses) os << to_string(e) << ' ';
    if (!x.note.empty()) os << x.note << ' ';
    if (x.fixture_dependent) os << "[fixture-dependent]";
    os << '\n';
  }
  for (const auto& s : r.sweeps) {
    os << "\n" << s.label << "(θ), k = " << s.k << "\n";
    os << std::setw(8) << "θ" << std::setw(7) << "edges" << std::setw(8) << "planar" << std::setw(11) << "components"
       << std::setw(10) << "isolated" << "MST missing\n";
    for (const auto& row : s.rows) {
      os << std::setw(8) << row.theta.str() << std::setw(7) << row.edges << std::setw(8) << (row.planar ? "yes" : "no")
         << std::setw(11) << row.components.size() << std::setw(10) << row.isolated.size();
      for (const auto& e : row.mst_missing) os << to_string(e) << ' ';
      os << '\n';
    }
    os << "last connected θ: " << (s.last_connected ? s.last_connected->str() : "none") << '\n';
    for (const auto& ev : s.events) os << "  " << ev << '\n';
  }
  return os.str();
}

/// One line per edge: a,b,count,k,weight,weight_decimal.
inline std::string to_csv(const WeightedCityGraph& p) {
  std::ostringstream os;
  os << "a,b,count,k,weight,weight_decimal\n";
  for (const auto& [e, c] : p.counts) {
    const Ratio w(c, p.k);
    os << e.a << ',' << e.b << ',' << c << ',' << p.k << ',' << w.str() << ',' << std::setprecision(6) << w.value() << '\n';
  }
  return os.str();
}

}  // namespace slimenet
