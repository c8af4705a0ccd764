#include <gtest/gtest.h>

#include <numeric>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "../support/temp_dir.hpp"
#include "causalmamba/digraph.hpp"
#include "causalmamba/error.hpp"
#include "causalmamba/intervention.hpp"

using namespace causalmamba;

namespace {

CausalGraph make_graph(const std::vector<Edge>& edges, std::size_t n) {
  CausalGraph g;
  g.weights = Tensor({n, n});
  for (const Edge& e : edges) g.weights(e.parent, e.child) = 1.0;
  g.edges = edges;
  for (std::size_t i = 0; i < n; ++i) g.node_ids.push_back("n" + std::to_string(i));
  return g;
}

std::vector<Edge> random_digraph(std::size_t n, double p, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && rng.bernoulli(p)) edges.push_back({i, j});
  return edges;
}

}  // namespace

// ------------------------------------------------------------ PageRank

TEST(PageRank, CompleteGraphIsUniform) {
  const std::vector<Edge> k3 = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}};
  const PageRankResult r = pagerank(k3, 3);
  EXPECT_TRUE(r.converged);
  for (double s : r.scores) EXPECT_NEAR(s, 1.0 / 3.0, 1e-9);
}

TEST(PageRank, TwoNodeChainWithDanglingSink) {
  const PageRankResult r = pagerank({{0, 1}}, 2);
  EXPECT_NEAR(r.scores[0], 0.350877, 1e-6);
  EXPECT_NEAR(r.scores[1], 0.649123, 1e-6);
}

TEST(PageRank, MatchesLinearSystemOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng.below(10);
    const std::vector<Edge> edges = random_digraph(n, 0.25, rng);
    const PageRankResult r = pagerank(edges, n);
    const std::vector<double> ref = oracle::pagerank_linear(edges, n, 0.85);
    EXPECT_NEAR(std::accumulate(r.scores.begin(), r.scores.end(), 0.0), 1.0, 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GT(r.scores[i], 0.0);
      EXPECT_NEAR(r.scores[i], ref[i], 1e-8);
    }
  }
}

TEST(PageRank, RelabelingPermutesScores) {
  Rng rng(2);
  const std::size_t n = 7;
  const std::vector<Edge> edges = random_digraph(n, 0.3, rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm.begin(), perm.end());
  std::vector<Edge> relabeled;
  for (const Edge& e : edges) relabeled.push_back({perm[e.parent], perm[e.child]});
  const auto a = pagerank(edges, n).scores, b = pagerank(relabeled, n).scores;
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(b[perm[i]], a[i], 1e-9);
}

TEST(PageRank, WeightedModeIgnoresOverallScale) {
  Rng rng(3);
  const std::size_t n = 6;
  const std::vector<Edge> edges = random_digraph(n, 0.4, rng);
  Tensor w({n, n});
  for (const Edge& e : edges) w(e.parent, e.child) = rng.uniform(0.1, 2.0);
  Tensor w10 = w;
  for (double& v : w10.values()) v *= -10.0;
  PageRankConfig cfg;
  cfg.weighted = true;
  const auto a = pagerank(edges, n, cfg, &w).scores, b = pagerank(edges, n, cfg, &w10).scores;
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);

  // Equal weights reduce to the unweighted chain.
  Tensor ones({n, n});
  for (const Edge& e : edges) ones(e.parent, e.child) = 1.0;
  const auto c = pagerank(edges, n, cfg, &ones).scores, d = pagerank(edges, n).scores;
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(c[i], d[i], 1e-12);
}

TEST(PageRank, ConfigValidation) {
  PageRankConfig cfg;
  cfg.damping = 1.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.damping = 0.85;
  cfg.max_iter = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

// ------------------------------------------------------------ intervene

TEST(Intervene, StarHubRemovalDisconnectsLeaves) {
  const auto [edges, n] = oracle::hub_graph(6, 1);
  const InterventionReport r = intervene(make_graph(edges, n), 1);
  ASSERT_EQ(r.removed_indices, (std::vector<std::size_t>{0}));
  EXPECT_EQ(r.removed_ids, (std::vector<std::string>{"n0"}));
  EXPECT_EQ(r.components_before, 1u);
  EXPECT_EQ(r.components_after, 6u);
  EXPECT_EQ(r.largest_component_after, 1u);
  EXPECT_EQ(r.reachable_pairs_before, 6u);
  EXPECT_EQ(r.reachable_pairs_after, 0u);
  EXPECT_EQ(r.edges_after, 0u);
}

TEST(Intervene, PathLosesItsHighestRankedNode) {
  const std::vector<Edge> path = {{0, 1}, {1, 2}, {2, 3}};
  const InterventionReport r = intervene(make_graph(path, 4), 1);
  const std::vector<double> ref = oracle::pagerank_linear(path, 4, 0.85);
  const std::size_t top = static_cast<std::size_t>(std::max_element(ref.begin(), ref.end()) - ref.begin());
  ASSERT_EQ(r.removed_indices, (std::vector<std::size_t>{top}));
  EXPECT_EQ(r.reachable_pairs_before, 6u);
  const InducedSubgraph rest = remove_nodes(path, 4, {top});
  EXPECT_EQ(r.reachable_pairs_after, oracle::reachable_pairs(rest.edges, 3));
  EXPECT_EQ(r.nodes_after, 3u);
}

TEST(Intervene, ZeroRemovalsChangeNothing) {
  Rng rng(4);
  const std::vector<Edge> edges = random_digraph(8, 0.2, rng);
  const InterventionReport r = intervene(make_graph(edges, 8), 0);
  EXPECT_TRUE(r.removed_indices.empty());
  EXPECT_EQ(r.nodes_before, r.nodes_after);
  EXPECT_EQ(r.edges_before, r.edges_after);
  EXPECT_EQ(r.components_before, r.components_after);
  EXPECT_EQ(r.reachable_pairs_before, r.reachable_pairs_after);
}

TEST(Intervene, KMustLeaveANode) {
  const CausalGraph g = make_graph({{0, 1}, {1, 2}}, 3);
  try {
    intervene(g, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::KTooLarge);
  }
  const InterventionReport r = intervene(g, 2);
  EXPECT_EQ(r.nodes_after, 1u);
  EXPECT_EQ(r.edges_after, 0u);
  EXPECT_EQ(r.components_after, 1u);
  EXPECT_EQ(r.reachable_pairs_after, 0u);
}

TEST(Intervene, TiesGoToTheLowerIndex) {
  // Four isolated nodes share every score.
  const InterventionReport r = intervene(make_graph({}, 4), 2);
  EXPECT_EQ(r.removed_indices, (std::vector<std::size_t>{0, 1}));
}

TEST(Intervene, MetricsAgreeWithOracles) {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    const std::vector<Edge> edges = random_digraph(n, 0.2, rng);
    const std::size_t k = rng.below(n);
    const InterventionReport r = intervene(make_graph(edges, n), k);
    ASSERT_EQ(r.removed_indices.size(), k);
    const InducedSubgraph rest = remove_nodes(edges, n, r.removed_indices);
    EXPECT_EQ(r.reachable_pairs_before, oracle::reachable_pairs(edges, n));
    EXPECT_EQ(r.reachable_pairs_after, oracle::reachable_pairs(rest.edges, n - k));
    EXPECT_EQ(r.components_after, oracle::weak_component_count(rest.edges, n - k));
    EXPECT_LE(r.reachable_pairs_after, r.reachable_pairs_before);
    const std::vector<double> ref = oracle::pagerank_linear(edges, n, 0.85);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t removed = r.removed_indices[i];
      for (std::size_t j = 0; j < n; ++j)
        if (std::find(r.removed_indices.begin(), r.removed_indices.end(), j) == r.removed_indices.end())
          EXPECT_GE(ref[removed], ref[j] - 1e-8);
    }
  }
}

TEST(Intervene, IntervenedGraphKeepsSurvivors) {
  const CausalGraph g = make_graph({{0, 1}, {1, 2}, {2, 3}}, 4);
  InterventionReport r;
  r.removed_indices = {1};
  const CausalGraph rest = intervened_graph(g, r);
  EXPECT_EQ(rest.node_ids, (std::vector<std::string>{"n0", "n2", "n3"}));
  EXPECT_EQ(rest.edges, (std::vector<Edge>{{1, 2}}));
  EXPECT_EQ(rest.weights(1, 2), 1.0);
}

TEST(Intervene, ReportJson) {
  const auto [edges, n] = oracle::hub_graph(3, 2);
  const nlohmann::json j = nlohmann::json::parse(report_to_json(intervene(make_graph(edges, n), 1)));
  EXPECT_EQ(j.at("removed_nodes").at(0).at("id"), "n0");
  EXPECT_TRUE(j.contains("reachable_pairs_before"));
}

// ------------------------------------------------------------ DOT

TEST(Dot, EmptyGraph) { EXPECT_EQ(render_dot(std::vector<std::string>{}, {}), "digraph { }\n"); }

TEST(Dot, OneEdge) {
  EXPECT_EQ(render_dot({"a", "b"}, {{0, 1}}), "digraph {\n  \"a\";\n  \"b\";\n  \"a\" -> \"b\";\n}\n");
}

TEST(Dot, HighlightsAndSortedEdges) {
  const std::string dot = render_dot({"x", "y", "z"}, {{2, 0}, {0, 1}}, {2});
  EXPECT_EQ(dot,
            "digraph {\n  \"x\";\n  \"y\";\n  \"z\" [color=red, style=filled, fillcolor=red];\n"
            "  \"x\" -> \"y\";\n  \"z\" -> \"x\";\n}\n");
  EXPECT_EQ(dot, render_dot({"x", "y", "z"}, {{0, 1}, {2, 0}}, {2}));
}

TEST(Dot, ExportWritesTheText) {
  testutil::TempDir dir;
  const std::string dot = render_dot(make_graph({{0, 1}}, 2));
  export_dot(dir / "g.dot", dot);
  EXPECT_EQ(testutil::read_text(dir / "g.dot"), dot);
  EXPECT_THROW(export_dot(dir / "missing" / "g.dot", dot), Error);
}
