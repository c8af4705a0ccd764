#pragma once

#include <cstddef>

#include "causalmamba/causal.hpp"

namespace causalmamba {

struct NotearsOptions {
  double lambda1 = 0.1;
  std::size_t max_iter = 100;
  double threshold = 0.3;
  double h_tol = 1e-8;
  double rho_max = 1e16;
  std::size_t inner_max_iter = 3000;
  double inner_tol = 1e-7;
};

struct NotearsResult {
  CausalGraph graph;
  double h = 0.0;           // acyclicity of the continuous estimate
  std::size_t iterations = 0;
  std::size_t pruned_edges = 0;  // removed to break residual cycles
};

/// Linear NOTEARS on a sample-by-variable matrix X (m x n; columns are
/// centred internally): minimises (1/2m)‖X − XW‖² + λ₁‖W‖₁ subject to
/// tr(e^{W⊙W}) = n with an augmented Lagrangian whose subproblems are solved
/// over W = W⁺ − W⁻ (W± ≥ 0, zero diagonal) by spectral projected gradient.
/// The support |W| > threshold is pruned of its weakest cycle edges until
/// acyclic. Throws NonConvergence, ShapeMismatch.
NotearsResult notears_fit(const Tensor& x, const NotearsOptions& options = {});

}  // namespace causalmamba
