#pragma once

#include <functional>
#include <span>
#include <vector>

#include "causalmamba/tape.hpp"

namespace causalmamba {

using ScalarFn = std::function<Var(Tape&, Var)>;
using MultiScalarFn = std::function<Var(Tape&, std::span<const Var>)>;

/// Gradients of a scalar composite with respect to every leaf, each shaped like its leaf.
std::vector<Tensor> grad(const MultiScalarFn& f, std::span<const Tensor> leaves);
Tensor grad(const ScalarFn& f, const Tensor& x);

/// f evaluated at x without recording gradients.
double evaluate(const ScalarFn& f, const Tensor& x);

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  /// Coordinates where one-sided slopes disagree (a kink inside the stencil).
  std::vector<std::size_t> excluded;
};

/// Central-difference check of the analytic gradient of f at x. Relative
/// error per coordinate is |a - g| / max(|a|, |g|, 1e-8); the check passes
/// iff the maximum over non-excluded coordinates is ≤ tol.
/// Throws NonFiniteEvaluation when f is not finite near x.
GradCheckReport finite_diff_check(const ScalarFn& f, const Tensor& x, double step = 1e-5, double tol = 1e-4);

}  // namespace causalmamba
