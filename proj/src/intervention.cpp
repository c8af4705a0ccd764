#include "causalmamba/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "causalmamba/digraph.hpp"
#include "causalmamba/error.hpp"
#include "causalmamba/logging.hpp"

namespace causalmamba {

void PageRankConfig::validate() const {
  if (!(damping > 0.0 && damping < 1.0)) throw Error(Errc::InvalidConfig, "damping must lie in (0, 1)");
  if (!(tol > 0.0) || max_iter == 0) throw Error(Errc::InvalidConfig, "pagerank tolerance/iterations must be positive");
}

PageRankResult pagerank(const std::vector<Edge>& edges, std::size_t n, const PageRankConfig& config,
                        const Tensor* weights) {
  config.validate();
  if (n == 0) throw Error(Errc::EmptyGraph, "pagerank on an empty graph");
  if (config.weighted && (!weights || weights->shape() != Shape{n, n}))
    throw Error(Errc::ShapeMismatch, "weighted pagerank needs an n x n weight matrix");

  std::vector<double> edge_weight(edges.size(), 1.0);
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const Edge& e = edges[k];
    if (e.parent >= n || e.child >= n) throw Error(Errc::IndexOutOfRange, "pagerank edge outside graph");
    if (config.weighted) edge_weight[k] = std::abs((*weights)(e.parent, e.child));
    out_weight[e.parent] += edge_weight[k];
  }

  const double nd = static_cast<double>(n);
  PageRankResult result;
  std::vector<double> p(n, 1.0 / nd), next(n);
  for (result.iterations = 1; result.iterations <= config.max_iter; ++result.iterations) {
    double dangling = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (out_weight[i] == 0.0) dangling += p[i];
    std::fill(next.begin(), next.end(), (1.0 - config.damping) / nd + config.damping * dangling / nd);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      next[e.child] += config.damping * p[e.parent] * edge_weight[k] / out_weight[e.parent];
    }
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      change += std::abs(next[i] - p[i]);
    }
    p.swap(next);
    if (change <= config.tol) {
      result.converged = true;
      break;
    }
  }
  if (!result.converged) {
    result.iterations = config.max_iter;
    warn("pagerank did not converge in " + std::to_string(config.max_iter) + " iterations");
  }
  result.scores = std::move(p);
  return result;
}

InterventionReport intervene(const CausalGraph& graph, std::size_t k, const PageRankConfig& config) {
  const std::size_t n = graph.size();
  if (k >= n) throw Error(Errc::KTooLarge, "k = " + std::to_string(k) + " must be below n = " + std::to_string(n));

  const PageRankResult pr = pagerank(graph.edges, n, config, config.weighted ? &graph.weights : nullptr);
  // Rank on a 1e-12 grid so floating-point noise does not break index tie-breaks.
  std::vector<long long> key(n);
  for (std::size_t i = 0; i < n; ++i) key[i] = std::llround(pr.scores[i] * 1e12);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });

  InterventionReport r;
  r.scores = pr.scores;
  r.pagerank_converged = pr.converged;
  r.removed_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t idx : r.removed_indices) {
    r.removed_ids.push_back(idx < graph.node_ids.size() ? graph.node_ids[idx] : std::to_string(idx));
    r.removed_scores.push_back(pr.scores[idx]);
  }

  const InducedSubgraph after = remove_nodes(graph.edges, n, r.removed_indices);
  const ComponentStats before_cc = weak_components(graph.edges, n);
  const ComponentStats after_cc = weak_components(after.edges, after.kept.size());
  r.nodes_before = n;
  r.nodes_after = after.kept.size();
  r.edges_before = graph.edges.size();
  r.edges_after = after.edges.size();
  r.components_before = before_cc.count;
  r.components_after = after_cc.count;
  r.largest_component_before = before_cc.largest;
  r.largest_component_after = after_cc.largest;
  r.reachable_pairs_before = reachable_pairs(graph.edges, n);
  r.reachable_pairs_after = reachable_pairs(after.edges, after.kept.size());
  return r;
}

std::string report_to_json(const InterventionReport& r, int indent) {
  nlohmann::json removed = nlohmann::json::array();
  for (std::size_t i = 0; i < r.removed_indices.size(); ++i)
    removed.push_back({{"index", r.removed_indices[i]}, {"id", r.removed_ids[i]}, {"pagerank", r.removed_scores[i]}});
  nlohmann::json j = {
      {"removed_nodes", removed},
      {"pagerank_scores", r.scores},
      {"pagerank_converged", r.pagerank_converged},
      {"nodes_before", r.nodes_before},
      {"nodes_after", r.nodes_after},
      {"edges_before", r.edges_before},
      {"edges_after", r.edges_after},
      {"components_before", r.components_before},
      {"components_after", r.components_after},
      {"largest_component_before", r.largest_component_before},
      {"largest_component_after", r.largest_component_after},
      {"reachable_pairs_before", r.reachable_pairs_before},
      {"reachable_pairs_after", r.reachable_pairs_after},
  };
  return j.dump(indent);
}

namespace {
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}
}  // namespace

std::string render_dot(const std::vector<std::string>& names, const std::vector<Edge>& edges,
                       const std::set<std::size_t>& highlights) {
  if (names.empty()) return "digraph { }\n";
  std::ostringstream os;
  os << "digraph {\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    os << "  " << quoted(names[i]);
    if (highlights.contains(i)) os << " [color=red, style=filled, fillcolor=red]";
    os << ";\n";
  }
  std::vector<Edge> sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  for (const Edge& e : sorted) os << "  " << quoted(names.at(e.parent)) << " -> " << quoted(names.at(e.child)) << ";\n";
  os << "}\n";
  return os.str();
}

std::string render_dot(const CausalGraph& graph, const std::set<std::size_t>& highlights) {
  std::vector<std::string> names = graph.node_ids;
  if (names.size() != graph.size()) {
    names.clear();
    for (std::size_t i = 0; i < graph.size(); ++i) names.push_back(std::to_string(i));
  }
  return render_dot(names, graph.edges, highlights);
}

void export_dot(const std::filesystem::path& path, const std::string& dot_text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << dot_text;
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

CausalGraph intervened_graph(const CausalGraph& graph, const InterventionReport& report) {
  const InducedSubgraph sub = remove_nodes(graph.edges, graph.size(), report.removed_indices);
  CausalGraph out;
  out.threshold = graph.threshold;
  out.edges = sub.edges;
  out.weights = Tensor({sub.kept.size(), sub.kept.size()});
  for (std::size_t i = 0; i < sub.kept.size(); ++i) {
    out.node_ids.push_back(sub.kept[i] < graph.node_ids.size() ? graph.node_ids[sub.kept[i]]
                                                               : std::to_string(sub.kept[i]));
    for (std::size_t j = 0; j < sub.kept.size(); ++j) out.weights(i, j) = graph.weights(sub.kept[i], sub.kept[j]);
  }
  return out;
}

}  // namespace causalmamba
