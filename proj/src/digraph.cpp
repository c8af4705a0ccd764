#include "causalmamba/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causalmamba/error.hpp"

namespace causalmamba {

namespace {

std::vector<std::vector<std::size_t>> adjacency_lists(const std::vector<Edge>& edges, std::size_t n) {
  std::vector<std::vector<std::size_t>> out(n);
  for (const Edge& e : edges) {
    if (e.parent >= n || e.child >= n) throw Error(Errc::IndexOutOfRange, "edge endpoint outside graph");
    out[e.parent].push_back(e.child);
  }
  return out;
}

void require_square(const Tensor& w) {
  if (w.rank() != 2 || w.dim(0) != w.dim(1)) throw Error(Errc::NonSquare, "expected a square matrix, got " + shape_string(w.shape()));
}

}  // namespace

double default_threshold(const Tensor& w) {
  require_square(w);
  double m = 0.0;
  for (std::size_t i = 0; i < w.dim(0); ++i)
    for (std::size_t j = 0; j < w.dim(1); ++j)
      if (i != j) m = std::max(m, std::abs(w(i, j)));
  return 0.1 * m;
}

std::vector<Edge> extract_digraph(const Tensor& w, std::optional<double> tau) {
  require_square(w);
  const double threshold = tau ? *tau : default_threshold(w);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < w.dim(0); ++i)
    for (std::size_t j = 0; j < w.dim(1); ++j)
      if (i != j && std::abs(w(i, j)) > threshold) edges.push_back(Edge{i, j});
  return edges;
}

bool is_acyclic(const std::vector<Edge>& edges, std::size_t n) {
  const auto out = adjacency_lists(edges, n);
  std::vector<std::size_t> indegree(n, 0);
  for (const Edge& e : edges) ++indegree[e.child];
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t v = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t w : out[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  return visited == n;
}

std::optional<std::vector<Edge>> find_cycle(const std::vector<Edge>& edges, std::size_t n) {
  const auto out = adjacency_lists(edges, n);
  enum : unsigned char { kWhite, kGrey, kBlack };
  std::vector<unsigned char> colour(n, kWhite);
  std::vector<std::size_t> parent(n, n);
  for (std::size_t start = 0; start < n; ++start) {
    if (colour[start] != kWhite) continue;
    // Iterative DFS: stack of (node, next child position).
    std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
    colour[start] = kGrey;
    while (!stack.empty()) {
      auto& [v, pos] = stack.back();
      if (pos == out[v].size()) {
        colour[v] = kBlack;
        stack.pop_back();
        continue;
      }
      const std::size_t w = out[v][pos++];
      if (colour[w] == kGrey) {
        std::vector<Edge> cycle{Edge{v, w}};
        for (std::size_t x = v; x != w; x = parent[x]) cycle.push_back(Edge{parent[x], x});
        return cycle;
      }
      if (colour[w] == kWhite) {
        colour[w] = kGrey;
        parent[w] = v;
        stack.emplace_back(w, 0);
      }
    }
  }
  return std::nullopt;
}

ComponentStats weak_components(const std::vector<Edge>& edges, std::size_t n) {
  std::vector<std::size_t> root(n);
  std::iota(root.begin(), root.end(), 0);
  const auto find = [&](std::size_t x) {
    while (root[x] != x) x = root[x] = root[root[x]];
    return x;
  };
  for (const Edge& e : edges) {
    if (e.parent >= n || e.child >= n) throw Error(Errc::IndexOutOfRange, "edge endpoint outside graph");
    root[find(e.parent)] = find(e.child);
  }
  std::vector<std::size_t> sizes(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++sizes[find(i)];
  ComponentStats stats;
  for (std::size_t s : sizes) {
    if (s == 0) continue;
    ++stats.count;
    stats.largest = std::max(stats.largest, s);
  }
  return stats;
}

std::size_t reachable_pairs(const std::vector<Edge>& edges, std::size_t n) {
  const auto out = adjacency_lists(edges, n);
  std::size_t total = 0;
  std::vector<std::size_t> seen(n, n);
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    queue.assign(1, s);
    seen[s] = s;
    for (std::size_t head = 0; head < queue.size(); ++head)
      for (std::size_t w : out[queue[head]])
        if (seen[w] != s) {
          seen[w] = s;
          queue.push_back(w);
        }
    total += queue.size() - 1;
  }
  return total;
}

InducedSubgraph remove_nodes(const std::vector<Edge>& edges, std::size_t n, const std::vector<std::size_t>& removed) {
  std::vector<bool> gone(n, false);
  for (std::size_t r : removed) {
    if (r >= n) throw Error(Errc::IndexOutOfRange, "removed node outside graph");
    gone[r] = true;
  }
  InducedSubgraph sub;
  std::vector<std::size_t> new_index(n, n);
  for (std::size_t i = 0; i < n; ++i)
    if (!gone[i]) {
      new_index[i] = sub.kept.size();
      sub.kept.push_back(i);
    }
  for (const Edge& e : edges)
    if (!gone[e.parent] && !gone[e.child]) sub.edges.push_back(Edge{new_index[e.parent], new_index[e.child]});
  return sub;
}

std::size_t structural_hamming_distance(const std::vector<Edge>& estimate, const std::vector<Edge>& truth,
                                        std::size_t n) {
  std::vector<unsigned char> est(n * n, 0), tru(n * n, 0);
  for (const Edge& e : estimate) est[e.parent * n + e.child] = 1;
  for (const Edge& e : truth) tru[e.parent * n + e.child] = 1;
  std::size_t shd = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (est[i * n + j] != tru[i * n + j] || est[j * n + i] != tru[j * n + i]) ++shd;
  return shd;
}

}  // namespace causalmamba
