#include "causalmamba/gcn_encoder.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "causalmamba/error.hpp"
#include "causalmamba/ops.hpp"

namespace causalmamba {

GcnParams init_gcn(std::size_t hidden, Rng& rng) {
  GcnParams p;
  p.weight = random_normal({hidden, hidden}, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  p.bias = Tensor({hidden});
  return p;
}

Tensor normalize_adjacency(const std::vector<Edge>& edges, std::size_t n) {
  std::set<std::pair<std::size_t, std::size_t>> undirected;
  for (const Edge& e : edges) {
    if (e.parent >= n || e.child >= n)
      throw Error(Errc::IndexOutOfRange, "edge (" + std::to_string(e.parent) + "," + std::to_string(e.child) +
                                             ") outside " + std::to_string(n) + " nodes");
    if (e.parent == e.child) throw Error(Errc::IndexOutOfRange, "self-loop in adjacency input");
    undirected.emplace(std::min(e.parent, e.child), std::max(e.parent, e.child));
  }
  Tensor a = Tensor::identity(n);
  for (const auto& [i, j] : undirected) a(i, j) = a(j, i) = 1.0;
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
  return a;
}

Var gcn_forward(Var h_seq, const std::vector<Tensor>& normalized_adjacency, const Tensor& mask, const GcnVars& p) {
  const Tensor& h = h_seq.value();
  if (h.rank() != 3 || mask.shape() != Shape{h.dim(0), h.dim(1)} || normalized_adjacency.size() != h.dim(0))
    throw Error(Errc::ShapeMismatch, "gcn input " + shape_string(h.shape()));
  for (std::size_t b = 0; b < normalized_adjacency.size(); ++b) {
    std::size_t real = 0;
    for (std::size_t i = 0; i < h.dim(1); ++i) real += mask(b, i) != 0.0;
    if (normalized_adjacency[b].rank() != 2 || normalized_adjacency[b].dim(0) != real)
      throw Error(Errc::ShapeMismatch, "adjacency size does not match node count of graph " + std::to_string(b));
  }
  Var agg = ad::graph_aggregate(h_seq, normalized_adjacency);
  Var out = ad::relu(ad::add_bias(ad::matmul(agg, p.weight), p.bias));
  return ad::mask_rows(out, mask);
}

}  // namespace causalmamba
