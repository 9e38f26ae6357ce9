#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slimenet/error.hpp"

namespace slimenet {

/// Unordered pair of city ids, stored with `a < b`.
struct Edge {
  std::string a;
  std::string b;

  static Edge make(std::string x, std::string y) {
    if (x == y) throw ValidationError("self-loop on '" + x + "'", "edges");
    if (y < x) std::swap(x, y);
    return Edge{std::move(x), std::move(y)};
  }

  bool touches(const Edge& o) const { return a == o.a || a == o.b || b == o.a || b == o.b; }

  auto operator<=>(const Edge&) const = default;
  bool operator==(const Edge&) const = default;
};

inline std::string to_string(const Edge& e) { return e.a + "-" + e.b; }

/// Unweighted simple graph over named cities. Node order is insertion order
/// and carries no meaning beyond stable output.
class CityGraph {
 public:
  CityGraph() = default;

  explicit CityGraph(std::vector<std::string> nodes) {
    for (auto& n : nodes) add_node(std::move(n));
  }

  void add_node(std::string name) {
    if (name.empty()) throw ValidationError("empty node name", "nodes");
    if (!index_.insert(name).second) throw ValidationError("duplicate node '" + name + "'", "nodes");
    nodes_.push_back(std::move(name));
  }

  /// Inserts the edge; returns false when it was already present.
  bool add_edge(const std::string& x, const std::string& y) {
    if (!has_node(x)) throw ValidationError("unknown node '" + x + "'", "edges");
    if (!has_node(y)) throw ValidationError("unknown node '" + y + "'", "edges");
    return edges_.insert(Edge::make(x, y)).second;
  }

  bool add_edge(const Edge& e) { return add_edge(e.a, e.b); }

  bool remove_edge(const Edge& e) { return edges_.erase(e) > 0; }

  bool has_node(const std::string& n) const { return index_.count(n) > 0; }
  bool has_edge(const std::string& x, const std::string& y) const {
    return x != y && edges_.count(Edge::make(x, y)) > 0;
  }
  bool has_edge(const Edge& e) const { return edges_.count(e) > 0; }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::set<std::string>& node_set() const { return index_; }
  const std::set<Edge>& edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::vector<std::string> neighbours(const std::string& n) const {
    std::vector<std::string> out;
    for (const auto& e : edges_) {
      if (e.a == n) out.push_back(e.b);
      else if (e.b == n) out.push_back(e.a);
    }
    return out;
  }

  /// Equal node sets (order ignored) and equal edge sets.
  friend bool operator==(const CityGraph& l, const CityGraph& r) {
    return l.index_ == r.index_ && l.edges_ == r.edges_;
  }

 private:
  std::vector<std::string> nodes_;
  std::set<std::string> index_;
  std::set<Edge> edges_;
};

inline bool same_nodes(const CityGraph& g, const CityGraph& h) { return g.node_set() == h.node_set(); }

inline void require_same_nodes(const CityGraph& g, const CityGraph& h) {
  if (!same_nodes(g, h)) throw ValidationError("graphs are defined over different node sets", "nodes");
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json edges_to_json(const std::set<Edge>& edges) {
  auto arr = nlohmann::json::array();
  for (const auto& e : edges) arr.push_back({e.a, e.b});
  return arr;
}

inline nlohmann::json to_json(const CityGraph& g) {
  return nlohmann::json{{"nodes", g.nodes()}, {"edges", edges_to_json(g.edges())}};
}

/// Reads {"nodes": [...], "edges": [[a,b], ...]}. When `nodes` is absent the
/// node set is taken from `universe` (if given) or from the edge endpoints.
inline CityGraph graph_from_json(const nlohmann::json& doc,
                                 const std::optional<std::vector<std::string>>& universe = std::nullopt) {
  if (!doc.is_object()) throw ValidationError("graph document must be an object", "graph");
  CityGraph g;
  try {
    if (doc.contains("nodes")) {
      for (const auto& n : doc.at("nodes")) g.add_node(n.get<std::string>());
    } else if (universe) {
      for (const auto& n : *universe) g.add_node(n);
    } else if (doc.contains("edges")) {
      std::vector<std::string> seen;
      for (const auto& e : doc.at("edges"))
        for (const auto& n : e)
          if (std::find(seen.begin(), seen.end(), n.get<std::string>()) == seen.end()) seen.push_back(n.get<std::string>());
      for (auto& n : seen) g.add_node(n);
    }
    if (doc.contains("edges")) {
      for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw ValidationError("edge must be a [name, name] pair", "edges");
        g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(ex.what(), "graph");
  }
  return g;
}

/// Coordinates used for the `pos` attribute in DOT output.
using NodePositions = std::map<std::string, std::pair<double, double>>;

/// Undirected DOT. With positions, y is flipped so raster rows point down in
/// `neato -n` renderings the same way they do in the map image.
inline std::string to_dot(const CityGraph& g, const std::string& name = "G", const NodePositions& pos = {},
                          const std::map<Edge, std::string>& edge_labels = {}) {
  std::ostringstream os;
  os << "graph \"" << name << "\" {\n";
  for (const auto& n : g.nodes()) {
    os << "  \"" << n << "\"";
    if (auto it = pos.find(n); it != pos.end())
      os << " [pos=\"" << it->second.first << "," << -it->second.second << "!\"]";
    os << ";\n";
  }
  for (const auto& e : g.edges()) {
    os << "  \"" << e.a << "\" -- \"" << e.b << "\"";
    if (auto it = edge_labels.find(e); it != edge_labels.end()) os << " [label=\"" << it->second << "\"]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace slimenet
