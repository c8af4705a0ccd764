#pragma once

#include <optional>
#include <vector>

#include "causalmamba/cascade.hpp"
#include "causalmamba/tensor.hpp"

namespace causalmamba {

/// 0.1 · max_{i≠j} |W_ij|.
double default_threshold(const Tensor& w);

/// Edges (i, j), i ≠ j, with |W_ij| > tau, in row-major order. The default
/// tau is default_threshold(w). Throws NonSquare.
std::vector<Edge> extract_digraph(const Tensor& w, std::optional<double> tau = std::nullopt);

/// Kahn's algorithm; true iff the directed edge set on n nodes has no cycle.
bool is_acyclic(const std::vector<Edge>& edges, std::size_t n);

/// Edges of one directed cycle, or nullopt for a DAG.
std::optional<std::vector<Edge>> find_cycle(const std::vector<Edge>& edges, std::size_t n);

struct ComponentStats {
  std::size_t count = 0;
  std::size_t largest = 0;
};

/// Weakly connected components (isolated nodes count as components).
ComponentStats weak_components(const std::vector<Edge>& edges, std::size_t n);

/// Ordered pairs (u, v), u ≠ v, with a directed path u ⇝ v.
std::size_t reachable_pairs(const std::vector<Edge>& edges, std::size_t n);

struct InducedSubgraph {
  std::vector<Edge> edges;
  /// kept[i] = original index of new node i
  std::vector<std::size_t> kept;
};

/// Deletes `removed` nodes with their incident edges and compacts indices.
InducedSubgraph remove_nodes(const std::vector<Edge>& edges, std::size_t n, const std::vector<std::size_t>& removed);

/// Number of unordered node pairs whose edge state (absent, i→j, j→i, both)
/// differs between the two graphs; a reversal counts once.
std::size_t structural_hamming_distance(const std::vector<Edge>& estimate, const std::vector<Edge>& truth,
                                        std::size_t n);

}  // namespace causalmamba
