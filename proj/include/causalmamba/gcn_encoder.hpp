#pragma once

#include <vector>

#include "causalmamba/cascade.hpp"
#include "causalmamba/parameters.hpp"

namespace causalmamba {

template <class T>
struct GcnLayer {
  T weight, bias;

  template <class Self, class F>
  static void each(Self& s, F&& f) {
    f("weight", s.weight);
    f("bias", s.bias);
  }
};

using GcnParams = GcnLayer<Tensor>;
using GcnVars = GcnLayer<Var>;

GcnParams init_gcn(std::size_t hidden, Rng& rng);

/// D^-1/2 (A + I) D^-1/2 over the symmetrised edge set (duplicates collapse).
/// Throws IndexOutOfRange for endpoints ≥ n or self-loops.
Tensor normalize_adjacency(const std::vector<Edge>& edges, std::size_t n);

/// Per graph: ReLU(N · H · W + b) on real nodes; padded rows stay zero.
Var gcn_forward(Var h_seq, const std::vector<Tensor>& normalized_adjacency, const Tensor& mask, const GcnVars& p);

}  // namespace causalmamba
