#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalmamba/cascade.hpp"
#include "causalmamba/parameters.hpp"

namespace causalmamba {

struct CausalHyper {
  double lambda1 = 0.01;  // L1 weight
  double lambda2 = 1.0;   // acyclicity weight
  double lambda = 0.1;    // weight of the causal term in the joint loss

  void validate() const;
};

/// Soft adjacency over a cascade's real nodes together with its thresholded
/// directed support (diagonal excluded).
struct CausalGraph {
  Tensor weights;  // n x n
  double threshold = 0.0;
  std::vector<Edge> edges;
  std::vector<std::string> node_ids;

  std::size_t size() const { return weights.empty() ? 0 : weights.dim(0); }
};

/// Learned projections for the asymmetric variant W = (H'P₁)(H'P₂)ᵀ/d.
template <class T>
struct CausalProjection {
  T p1, p2;

  template <class Self, class F>
  static void each(Self& s, F&& f) {
    f("p1", s.p1);
    f("p2", s.p2);
  }
};

using CausalProjectionParams = CausalProjection<Tensor>;
using CausalProjectionVars = CausalProjection<Var>;

CausalProjectionParams init_causal_projection(std::size_t hidden, Rng& rng);

/// W = H'H'ᵀ/d (symmetric). Throws EmptyGraph.
Var causal_adjacency(Var h_real);
/// W = (H'P₁)(H'P₂)ᵀ/d.
Var causal_adjacency(Var h_real, const CausalProjectionVars& projection);

/// tr(e^{W⊙W}) - n. Throws NonSquare.
Var acyclicity(Var w);

/// ‖H' - W H'‖²_F + λ₁‖W‖₁ + λ₂·acyclicity(W) with W = causal_adjacency(H')
/// (or the projected variant when `projection` is non-null).
Var notears_loss(Var h_real, double lambda1, double lambda2, const CausalProjectionVars* projection = nullptr);

// Value-level conveniences.
Tensor causal_adjacency_value(const Tensor& h_real);
double acyclicity_value(const Tensor& w);

}  // namespace causalmamba
