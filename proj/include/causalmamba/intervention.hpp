#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "causalmamba/causal.hpp"

namespace causalmamba {

struct PageRankConfig {
  double damping = 0.85;
  double tol = 1e-10;
  std::size_t max_iter = 1000;
  /// Transition probabilities proportional to |W_ij| instead of 1/out-degree.
  bool weighted = false;

  void validate() const;
};

struct PageRankResult {
  std::vector<double> scores;
  std::size_t iterations = 0;
  bool converged = false;  // false: max_iter reached, last iterate returned
};

/// Power iteration with uniform teleport and uniform redistribution of
/// dangling mass; stops when the L1 change is ≤ tol. `weights` (n x n) is
/// only read in weighted mode.
PageRankResult pagerank(const std::vector<Edge>& edges, std::size_t n, const PageRankConfig& config = {},
                        const Tensor* weights = nullptr);

struct InterventionReport {
  std::vector<std::size_t> removed_indices;
  std::vector<std::string> removed_ids;
  std::vector<double> removed_scores;
  std::vector<double> scores;
  std::size_t nodes_before = 0, nodes_after = 0;
  std::size_t edges_before = 0, edges_after = 0;
  std::size_t components_before = 0, components_after = 0;
  std::size_t largest_component_before = 0, largest_component_after = 0;
  std::size_t reachable_pairs_before = 0, reachable_pairs_after = 0;
  bool pagerank_converged = true;
};

/// Removes the k highest-PageRank nodes (ties to the lower index) and
/// measures connectivity before and after. Throws KTooLarge unless k < n.
InterventionReport intervene(const CausalGraph& graph, std::size_t k, const PageRankConfig& config = {});

std::string report_to_json(const InterventionReport& report, int indent = 2);

/// Deterministic DOT text: one statement per node in index order, then
/// edges in sorted order. Highlighted nodes are filled red.
std::string render_dot(const std::vector<std::string>& node_names, const std::vector<Edge>& edges,
                       const std::set<std::size_t>& highlights = {});
std::string render_dot(const CausalGraph& graph, const std::set<std::size_t>& highlights = {});
/// Throws IoError.
void export_dot(const std::filesystem::path& path, const std::string& dot_text);

/// The graph left after deleting the removed nodes of `report`.
CausalGraph intervened_graph(const CausalGraph& graph, const InterventionReport& report);

}  // namespace causalmamba
