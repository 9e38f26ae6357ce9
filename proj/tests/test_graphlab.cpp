#include <gtest/gtest.h>

#include <random>

#include "slimenet/commands.hpp"
#include "slimenet/graphlab.hpp"
#include "test_support.hpp"

using namespace slimenet;
using namespace testing_support;

namespace {

std::vector<CityGraph> sets_with_edge(int present, int k, const std::vector<std::string>& nodes, Edge e) {
  std::vector<CityGraph> out;
  for (int i = 0; i < k; ++i) {
    CityGraph g(nodes);
    if (i < present) g.add_edge(e);
    out.push_back(std::move(g));
  }
  return out;
}

CityGraph graph(const std::vector<std::string>& nodes, std::initializer_list<std::pair<const char*, const char*>> list) {
  CityGraph g(nodes);
  for (auto [a, b] : list) g.add_edge(a, b);
  return g;
}

CityGraph road_fixture() { return load_road_graph(data_dir() / "italy" / "roads.json", italy().cities); }

}  // namespace

// --- aggregate / weights ---------------------------------------------------------------

TEST(Aggregate, TwelveOfTwentyEight) {
  const auto nodes = letters(3);
  const auto w = aggregate(sets_with_edge(12, 28, nodes, Edge::make("a", "b")), 28);
  const auto wt = w.weight("a", "b");
  EXPECT_TRUE(wt.identical(Ratio(12, 28)));
  EXPECT_EQ(wt.str(), "12/28");
  EXPECT_EQ(wt, Ratio(3, 7));
}

TEST(Aggregate, UnanimousAndAbsent) {
  const auto nodes = letters(3);
  const auto w = aggregate(sets_with_edge(5, 5, nodes, Edge::make("a", "c")));
  EXPECT_EQ(w.weight("a", "c"), Ratio(1, 1));
  EXPECT_EQ(w.counts.count(Edge::make("a", "b")), 0u);
  EXPECT_EQ(w.weight("a", "b").num, 0);
}

TEST(Aggregate, MismatchedNodeSetsOrCountRejected) {
  std::vector<CityGraph> sets{CityGraph(letters(3)), CityGraph(letters(4))};
  EXPECT_THROW(aggregate(sets, 2), ValidationError);
  EXPECT_THROW(aggregate({CityGraph(letters(3))}, 2), ValidationError);
  EXPECT_THROW(aggregate({}), ValidationError);
}

// --- threshold ---------------------------------------------------------------------

TEST(Threshold, ZeroKeepsAllObservedEdges) {
  std::mt19937_64 gen(1);
  std::vector<CityGraph> sets;
  for (int i = 0; i < 6; ++i) sets.push_back(random_graph(gen, letters(6), 0.3));
  const auto w = aggregate(sets);
  EXPECT_EQ(threshold(w, Ratio(0, 1)), w.support());
}

TEST(Threshold, TwelveOfTwentyEightAtNineAndThirteen) {
  const auto nodes = letters(2);
  const auto w = aggregate(sets_with_edge(12, 28, nodes, Edge::make("a", "b")));
  EXPECT_TRUE(threshold(w, Ratio(9, 28)).has_edge("a", "b"));
  EXPECT_TRUE(threshold(w, Ratio(12, 28)).has_edge("a", "b"));
  EXPECT_FALSE(threshold(w, Ratio(13, 28)).has_edge("a", "b"));
}

TEST(Threshold, OneKeepsOnlyUnanimousEdges) {
  const auto nodes = letters(3);
  auto sets = sets_with_edge(4, 4, nodes, Edge::make("a", "b"));
  sets[0].add_edge("b", "c");
  const auto g = threshold(aggregate(sets), Ratio(1, 1));
  EXPECT_EQ(g, graph(nodes, {{"a", "b"}}));
  EXPECT_EQ(g.node_count(), 3u);
}

TEST(Threshold, NegativeThetaRejected) {
  const auto w = aggregate({CityGraph(letters(2))});
  EXPECT_THROW(threshold(w, Ratio(-1, 2)), ValidationError);
}

TEST(Threshold, ParseRatio) {
  EXPECT_TRUE(parse_ratio("9/28").identical(Ratio(9, 28)));
  EXPECT_TRUE(parse_ratio("1").identical(Ratio(1, 1)));
  EXPECT_THROW(parse_ratio("1/0"), ValidationError);
  EXPECT_THROW(parse_ratio("x"), ValidationError);
  EXPECT_THROW(parse_ratio("0.5"), ValidationError);
}

// --- road graph -------------------------------------------------------------------------

TEST(RoadGraph, EmptyFileGivesEmptyGraph) {
  const auto dir = scratch_dir("roads_empty");
  write_text(dir / "h.json", "");
  const auto h = load_road_graph(dir / "h.json", italy().cities);
  EXPECT_EQ(h.edge_count(), 0u);
  EXPECT_EQ(h.node_count(), 11u);
}

TEST(RoadGraph, UnknownCityRejected) {
  nlohmann::json doc{{"edges", {{"Roma", "Mediolanum"}}}};
  EXPECT_THROW(load_road_graph(doc, italy().cities), ValidationError);
}

TEST(RoadGraph, FixtureContainsPinnedEdgesAndIsPlanar) {
  const auto h = road_fixture();
  EXPECT_TRUE(h.has_edge("Placentia", "Bononia"));
  EXPECT_TRUE(h.has_edge("Genua", "Florenzia"));
  for (auto [a, b] : {std::pair{"Capua", "Venusia"}, {"Venusia", "Brundisium"}, {"Bononia", "Ariminum"}, {"Ariminum", "Roma"}})
    EXPECT_TRUE(h.has_edge(a, b)) << a << "-" << b;
  EXPECT_TRUE(straightline_planar(h, italy().cities.points()).planar);
  EXPECT_EQ(components(h).size(), 1u);
  const auto doc = read_json(data_dir() / "italy" / "roads.json");
  EXPECT_EQ(doc.at("provenance").at("kind"), "transcription");
}

// --- intersect / is_subgraph / components ---------------------------------------------------

TEST(Intersect, Examples) {
  std::mt19937_64 gen(2);
  const auto g = random_graph(gen, letters(6), 0.5);
  EXPECT_EQ(intersect(g, g), g);
  EXPECT_EQ(intersect(g, CityGraph(letters(6))).edge_count(), 0u);
  PointSet tri({{"a", {0, 0}}, {"b", {4, 0}}, {"c", {0, 3}}});
  const auto t = graph(letters(3), {{"a", "b"}, {"b", "c"}, {"a", "c"}});
  EXPECT_EQ(intersect(t, emst(tri)), emst(tri));
  EXPECT_THROW(intersect(g, CityGraph(letters(5))), ValidationError);
}

TEST(Intersect, CommutativeAssociativeIdempotent) {
  std::mt19937_64 gen(3);
  for (int i = 0; i < 100; ++i) {
    const auto nodes = letters(7);
    const auto a = random_graph(gen, nodes, 0.4), b = random_graph(gen, nodes, 0.4), c = random_graph(gen, nodes, 0.4);
    EXPECT_EQ(intersect(a, b), intersect(b, a));
    EXPECT_EQ(intersect(intersect(a, b), c), intersect(a, intersect(b, c)));
    EXPECT_EQ(intersect(a, a), a);
  }
}

TEST(IsSubgraph, ReportsMissingEdges) {
  const auto h = road_fixture();
  auto strong = h;
  strong.remove_edge(Edge::make("Placentia", "Bononia"));
  strong.remove_edge(Edge::make("Genua", "Florenzia"));
  const auto r = is_subgraph(h, strong);
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.missing, (std::vector<Edge>{Edge::make("Bononia", "Placentia"), Edge::make("Florenzia", "Genua")}));
  EXPECT_TRUE(is_subgraph(strong, h).holds);
}

TEST(IsSubgraph, PartialOrderOnRandomGraphs) {
  std::mt19937_64 gen(4);
  const auto nodes = letters(6);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_graph(gen, nodes, 0.5), b = random_graph(gen, nodes, 0.7), c = random_graph(gen, nodes, 0.9);
    EXPECT_TRUE(is_subgraph(a, a).holds);
    if (is_subgraph(a, b).holds && is_subgraph(b, a).holds) {
      EXPECT_EQ(a, b);
    }
    if (is_subgraph(a, b).holds && is_subgraph(b, c).holds) {
      EXPECT_TRUE(is_subgraph(a, c).holds);
    }
    const auto ab = intersect(a, b);
    EXPECT_TRUE(is_subgraph(ab, a).holds);
    EXPECT_TRUE(is_subgraph(intersect(ab, c), ab).holds);
  }
}

TEST(IsSubgraph, MstInRngOnRandomPointSets) {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_points(gen, 3 + i % 10);
    EXPECT_TRUE(is_subgraph(emst(p), rng_graph(p)).holds);
  }
}

TEST(Components, Examples) {
  const auto nodes = letters(4);
  EXPECT_EQ(components(graph(nodes, {{"a", "b"}, {"b", "c"}, {"c", "d"}})).size(), 1u);
  const CityGraph empty(italy().cities.names());
  EXPECT_EQ(components(empty).size(), 11u);
  EXPECT_EQ(isolated(empty).size(), 11u);
  const auto g = graph(nodes, {{"a", "b"}, {"b", "c"}});
  EXPECT_EQ(components(g), (std::vector<std::vector<std::string>>{{"a", "b", "c"}, {"d"}}));
  EXPECT_EQ(isolated(g), (std::vector<std::string>{"d"}));
}

// --- threshold algebra properties ---------------------------------------------------------

TEST(ThresholdAlgebra, MonotoneUnionAndEmptyAboveOne) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + trial % 25;
    const auto nodes = letters(3 + trial % 8);
    std::vector<CityGraph> sets;
    CityGraph uni(nodes);
    for (int i = 0; i < k; ++i) {
      sets.push_back(random_graph(gen, nodes, 0.35));
      for (const auto& e : sets.back().edges()) uni.add_edge(e);
    }
    const auto w = aggregate(sets, k);
    EXPECT_EQ(threshold(w, Ratio(1, k)), uni);
    EXPECT_EQ(threshold(w, Ratio(k + 1, k)).edge_count(), 0u);
    auto prev = threshold(w, Ratio(0, 1));
    std::size_t prev_comp = components(prev).size();
    for (int i = 1; i <= k + 1; ++i) {
      const auto g = threshold(w, Ratio(i, k));
      EXPECT_TRUE(is_subgraph(g, prev).holds);
      EXPECT_LE(g.edge_count(), prev.edge_count());
      EXPECT_GE(components(g).size(), prev_comp);
      prev_comp = components(g).size();
      prev = g;
    }
  }
}

// --- findings -------------------------------------------------------------------------

TEST(Findings, SingleRunEqualToRoadGraph) {
  const auto h = road_fixture();
  const auto pts = italy().cities.points();
  const auto p = aggregate({h});
  const auto rep = findings_report(&p, nullptr, &h, pts);
  EXPECT_EQ(rep.find("H ⊆ P(raw)")->verdict, Verdict::Holds);
  EXPECT_EQ(rep.find("P(strong) ⊆ H")->verdict, Verdict::Holds);
  EXPECT_TRUE(rep.find("H ⊆ P(raw)")->fixture_dependent);
  EXPECT_EQ(rep.find("MST = RNG")->verdict, Verdict::Holds);
  EXPECT_EQ(rep.find("V(strong) ⊆ H")->verdict, Verdict::Skipped);
}

TEST(Findings, MissingRoadGraphSkipsDependentRelations) {
  const auto pts = italy().cities.points();
  const auto v = aggregate({emst(pts), CityGraph(pts.ids())});
  const auto rep = findings_report(nullptr, &v, nullptr, pts);
  EXPECT_EQ(rep.find("H ⊆ V(raw)")->verdict, Verdict::Skipped);
  EXPECT_EQ(rep.find("V(strong) ⊆ H")->verdict, Verdict::Skipped);
  EXPECT_EQ(rep.find("MST ⊆ V(θ)")->verdict, Verdict::Holds);
  EXPECT_EQ(rep.find("MST ⊆ V(θ)")->note, "largest θ = 1/2");
  const auto j = to_json(rep);
  EXPECT_EQ(j["sweeps"][0]["rows"][0]["theta"], "1/2");
}

TEST(Findings, SweepEdgeCountNonIncreasingAndEvents) {
  std::mt19937_64 gen(8);
  const auto pts = italy().cities.points();
  const auto mst = emst(pts);
  std::vector<CityGraph> sets;
  for (int i = 0; i < 20; ++i) {
    auto g = random_graph(gen, pts.ids(), 0.15);
    for (const auto& e : mst.edges())
      if (gen() % 10 < 7) g.add_edge(e);
    sets.push_back(std::move(g));
  }
  const auto v = aggregate(sets);
  const auto rep = findings_report(nullptr, &v, nullptr, pts);
  ASSERT_EQ(rep.sweeps.size(), 1u);
  const auto& rows = rep.sweeps[0].rows;
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].edges, rows[i - 1].edges);
  EXPECT_EQ(rows.front().edges, v.support().edge_count());
  if (rep.sweeps[0].last_connected) {
    EXPECT_TRUE(rows[rep.sweeps[0].last_connected->num - 1].connected);
  }
  EXPECT_FALSE(to_text(rep).empty());
}

TEST(Findings, MstFloorWithExemptions) {
  const auto pts = italy().cities.points();
  const auto mst = emst(pts);
  std::vector<CityGraph> sets;
  for (int i = 0; i < 20; ++i) {
    auto g = mst;
    if (i < 15) g.remove_edge(Edge::make("Genua", "Placentia"));
    sets.push_back(std::move(g));
  }
  const auto v = aggregate(sets);
  FindingsOptions opt;
  opt.mst_floor = Ratio(10, 20);
  auto rep = findings_report(nullptr, &v, nullptr, pts, opt);
  const auto* r = rep.find("MST edges reach 10/20 in V");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->verdict, Verdict::Fails);
  EXPECT_EQ(r->witnesses, (std::vector<Edge>{Edge::make("Genua", "Placentia")}));
  opt.mst_floor_exempt = {Edge::make("Genua", "Placentia")};
  rep = findings_report(nullptr, &v, nullptr, pts, opt);
  EXPECT_EQ(rep.find("MST edges reach 10/20 in V")->verdict, Verdict::Holds);
}

TEST(Findings, LabVersusSimulated) {
  const auto pts = italy().cities.points();
  const auto mst = emst(pts);
  const auto lab = aggregate({mst, mst});
  auto more = mst;
  more.add_edge("Bononia", "Roma");
  const auto sim = aggregate({more});
  const auto rep = findings_report(&lab, &sim, nullptr, pts);
  EXPECT_EQ(rep.find("P(1/2) ⊆ V(1/1)")->verdict, Verdict::Holds);
  const auto& vrows = rep.sweeps.back().rows;
  EXPECT_FALSE(vrows.front().planar);
}

TEST(WeightedGraphIo, JsonAndCsvRoundTrip) {
  const auto nodes = letters(3);
  const auto w = aggregate(sets_with_edge(12, 28, nodes, Edge::make("a", "b")));
  const auto j = to_json(w);
  EXPECT_EQ(j["edges"][0]["weight"], "12/28");
  const auto back = weighted_from_json(j);
  EXPECT_EQ(back.k, 28);
  EXPECT_EQ(back.counts, w.counts);
  EXPECT_NE(to_csv(w).find("a,b,12,28,12/28,0.428571"), std::string::npos);
  nlohmann::json bad = j;
  bad["edges"][0]["count"] = 29;
  EXPECT_THROW(weighted_from_json(bad), ValidationError);
}
