#pragma once

// Planar proximity graphs over small point sets.
//
// All predicates compare squared distances in double precision without an
// epsilon. Gabriel discs and RNG lunes are open: a point on the boundary
// does not block an edge. Algorithms are the direct O(n^3) definitions;
// city sets hold a few dozen points at most.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "slimenet/error.hpp"
#include "slimenet/graph.hpp"

namespace slimenet {

struct Vec2 {
  double x = 0;
  double y = 0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dist2(const Vec2& p, const Vec2& q) {
  const double dx = p.x - q.x, dy = p.y - q.y;
  return dx * dx + dy * dy;
}

struct Site {
  std::string id;
  Vec2 at;
};

/// Ordered, non-empty set of uniquely named finite points.
class PointSet {
 public:
  PointSet() = default;

  explicit PointSet(std::vector<Site> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) throw ValidationError("point set must contain at least one point", "points");
    std::set<std::string> ids;
    for (const auto& s : sites_) {
      if (!std::isfinite(s.at.x) || !std::isfinite(s.at.y))
        throw ValidationError("non-finite coordinate for '" + s.id + "'", "points");
      if (!ids.insert(s.id).second) throw ValidationError("duplicate id '" + s.id + "'", "points");
    }
  }

  std::size_t size() const { return sites_.size(); }
  const Site& operator[](std::size_t i) const { return sites_[i]; }
  const std::vector<Site>& sites() const { return sites_; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(sites_.size());
    for (const auto& s : sites_) out.push_back(s.id);
    return out;
  }

  std::optional<std::size_t> find(const std::string& id) const {
    for (std::size_t i = 0; i < sites_.size(); ++i)
      if (sites_[i].id == id) return i;
    return std::nullopt;
  }

  const Vec2& at(const std::string& id) const {
    auto i = find(id);
    if (!i) throw ValidationError("no coordinates for '" + id + "'", "points");
    return sites_[*i].at;
  }

  NodePositions positions() const {
    NodePositions out;
    for (const auto& s : sites_) out[s.id] = {s.at.x, s.at.y};
    return out;
  }

 private:
  std::vector<Site> sites_;
};

/// Rejects two distinct ids sharing a coordinate.
inline void require_distinct_coordinates(const PointSet& p) {
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j)
      if (p[i].at == p[j].at)
        throw ValidationError("'" + p[i].id + "' and '" + p[j].id + "' share coordinates", "points");
}

namespace detail {

// Strict total order on candidate edges: squared length, then (id, id).
struct RankedEdge {
  double len2;
  Edge edge;
  std::size_t i, j;

  bool operator<(const RankedEdge& o) const { return std::tie(len2, edge) < std::tie(o.len2, o.edge); }
};

inline RankedEdge ranked(const PointSet& p, std::size_t i, std::size_t j) {
  return RankedEdge{dist2(p[i].at, p[j].at), Edge::make(p[i].id, p[j].id), i, j};
}

}  // namespace detail

inline CityGraph gabriel_graph(const PointSet& p) {
  require_distinct_coordinates(p);
  CityGraph g(p.ids());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      // c is strictly inside the disc with diameter ab iff |ca|^2 + |cb|^2 < |ab|^2.
      const double ab = dist2(p[i].at, p[j].at);
      bool empty = true;
      for (std::size_t k = 0; k < p.size() && empty; ++k) {
        if (k == i || k == j) continue;
        empty = dist2(p[k].at, p[i].at) + dist2(p[k].at, p[j].at) >= ab;
      }
      if (empty) g.add_edge(p[i].id, p[j].id);
    }
  }
  return g;
}

/// Relative neighbourhood graph: ab kept unless some c has
/// max(|ac|, |bc|) < |ab|.
inline CityGraph rng_graph(const PointSet& p) {
  require_distinct_coordinates(p);
  CityGraph g(p.ids());
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const double ab = dist2(p[i].at, p[j].at);
      bool empty = true;
      for (std::size_t k = 0; k < p.size() && empty; ++k) {
        if (k == i || k == j) continue;
        empty = std::max(dist2(p[k].at, p[i].at), dist2(p[k].at, p[j].at)) >= ab;
      }
      if (empty) g.add_edge(p[i].id, p[j].id);
    }
  }
  return g;
}

/// Euclidean minimum spanning tree (Kruskal). Equal lengths are broken by
/// the lexicographically smaller id pair, which makes the tree unique.
inline CityGraph emst(const PointSet& p) {
  require_distinct_coordinates(p);
  std::vector<detail::RankedEdge> cand;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) cand.push_back(detail::ranked(p, i, j));
  std::sort(cand.begin(), cand.end());

  std::vector<std::size_t> parent(p.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  CityGraph g(p.ids());
  for (const auto& c : cand) {
    const auto ri = root(c.i), rj = root(c.j);
    if (ri == rj) continue;
    parent[ri] = rj;
    g.add_edge(c.edge);
    if (g.edge_count() + 1 == p.size()) break;
  }
  return g;
}

inline double total_length(const CityGraph& g, const PointSet& p) {
  double sum = 0;
  for (const auto& e : g.edges()) sum += std::sqrt(dist2(p.at(e.a), p.at(e.b)));
  return sum;
}

struct GrowthStage {
  std::string node;  ///< node attached at this stage
  Edge edge;         ///< tree edge that attached it
};

/// Spanning tree grown from `root`, one attachment per stage.
struct GrowthSequence {
  std::string root;
  std::vector<GrowthStage> stages;

  CityGraph tree(const std::vector<std::string>& nodes) const {
    CityGraph g(nodes);
    for (const auto& s : stages) g.add_edge(s.edge);
    return g;
  }
};

/// Prim's algorithm from `root`, same tie-break as emst(), so the edge set
/// always equals emst(p).
inline GrowthSequence prim_growth(const PointSet& p, const std::string& root) {
  require_distinct_coordinates(p);
  const auto r = p.find(root);
  if (!r) throw ValidationError("root '" + root + "' is not in the point set", "root");

  const std::size_t n = p.size();
  std::vector<bool> in_tree(n, false);
  std::vector<std::optional<detail::RankedEdge>> best(n);
  in_tree[*r] = true;
  for (std::size_t v = 0; v < n; ++v)
    if (!in_tree[v]) best[v] = detail::ranked(p, *r, v);

  GrowthSequence seq{root, {}};
  for (std::size_t step = 1; step < n; ++step) {
    std::optional<std::size_t> pick;
    for (std::size_t v = 0; v < n; ++v)
      if (!in_tree[v] && (!pick || *best[v] < *best[*pick])) pick = v;
    const auto v = *pick;
    in_tree[v] = true;
    seq.stages.push_back({p[v].id, best[v]->edge});
    for (std::size_t u = 0; u < n; ++u) {
      if (in_tree[u]) continue;
      auto cand = detail::ranked(p, v, u);
      if (cand < *best[u]) best[u] = cand;
    }
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Straight-line crossings

struct Segment {
  Vec2 p, q;
};

namespace detail {

inline int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return (v > 0) - (v < 0);
}

// c is collinear with ab; is it within the closed bounding box?
inline bool within(const Vec2& a, const Vec2& b, const Vec2& c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= c.y &&
         c.y <= std::max(a.y, b.y);
}

inline bool is_endpoint(const Segment& s, const Vec2& v) { return s.p == v || s.q == v; }

}  // namespace detail

/// True when the two segments meet anywhere other than at an endpoint they
/// share. A T-junction (an endpoint lying inside the other segment) and any
/// collinear overlap of positive length count as crossings.
inline bool segments_cross(const Segment& s1, const Segment& s2) {
  using detail::orientation;
  for (const auto* s : {&s1, &s2}) {
    if (!std::isfinite(s->p.x) || !std::isfinite(s->p.y) || !std::isfinite(s->q.x) || !std::isfinite(s->q.y))
      throw ValidationError("segment endpoint is not finite", "segment");
    if (s->p == s->q) throw ValidationError("zero-length segment", "segment");
  }
  const int o1 = orientation(s1.p, s1.q, s2.p);
  const int o2 = orientation(s1.p, s1.q, s2.q);
  const int o3 = orientation(s2.p, s2.q, s1.p);
  const int o4 = orientation(s2.p, s2.q, s1.q);

  if (o1 == 0 && o2 == 0) {
    // Collinear: compare the overlap along the dominant axis.
    const bool use_x = std::abs(s1.q.x - s1.p.x) >= std::abs(s1.q.y - s1.p.y);
    auto coord = [&](const Vec2& v) { return use_x ? v.x : v.y; };
    const double lo = std::max(std::min(coord(s1.p), coord(s1.q)), std::min(coord(s2.p), coord(s2.q)));
    const double hi = std::min(std::max(coord(s1.p), coord(s1.q)), std::max(coord(s2.p), coord(s2.q)));
    // A single touching point of collinear segments is necessarily a shared endpoint.
    return lo < hi;
  }

  if (o1 * o2 < 0 && o3 * o4 < 0) return true;

  // Non-parallel segments meet in at most one point; find it if they touch.
  std::optional<Vec2> touch;
  if (o1 == 0 && detail::within(s1.p, s1.q, s2.p)) touch = s2.p;
  else if (o2 == 0 && detail::within(s1.p, s1.q, s2.q)) touch = s2.q;
  else if (o3 == 0 && detail::within(s2.p, s2.q, s1.p)) touch = s1.p;
  else if (o4 == 0 && detail::within(s2.p, s2.q, s1.q)) touch = s1.q;
  if (!touch) return false;
  return !(detail::is_endpoint(s1, *touch) && detail::is_endpoint(s2, *touch));
}

struct PlanarityReport {
  bool planar = true;
  std::vector<std::pair<Edge, Edge>> crossings;
};

/// Checks the straight-line drawing of `g` at the coordinates in `p`. Only
/// pairs of edges without a common endpoint are tested.
inline PlanarityReport straightline_planar(const CityGraph& g, const PointSet& p) {
  std::map<std::string, Vec2> at;
  for (const auto& n : g.nodes()) at[n] = p.at(n);

  PlanarityReport out;
  const std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    for (std::size_t j = i + 1; j < edges.size(); ++j) {
      if (edges[i].touches(edges[j])) continue;
      if (segments_cross({at[edges[i].a], at[edges[i].b]}, {at[edges[j].a], at[edges[j].b]}))
        out.crossings.emplace_back(edges[i], edges[j]);
    }
  }
  out.planar = out.crossings.empty();
  return out;
}

}  // namespace slimenet
