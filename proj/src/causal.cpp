#include "causalmamba/causal.hpp"

#include <cmath>

#include "causalmamba/error.hpp"
#include "causalmamba/ops.hpp"

namespace causalmamba {

void CausalHyper::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0 || lambda < 0.0)
    throw Error(Errc::InvalidConfig, "causal loss weights must be nonnegative");
}

CausalProjectionParams init_causal_projection(std::size_t hidden, Rng& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(hidden));
  return {random_normal({hidden, hidden}, s, rng), random_normal({hidden, hidden}, s, rng)};
}

namespace {
void require_nonempty(Var h) {
  if (h.value().rank() != 2 || h.value().dim(0) == 0 || h.value().dim(1) == 0)
    throw Error(Errc::EmptyGraph, "causal adjacency needs a nonempty n x d matrix, got " + shape_string(h.shape()));
}
}  // namespace

Var causal_adjacency(Var h_real) {
  require_nonempty(h_real);
  const double d = static_cast<double>(h_real.value().dim(1));
  return ad::scale(ad::matmul(h_real, ad::transpose(h_real)), 1.0 / d);
}

Var causal_adjacency(Var h_real, const CausalProjectionVars& projection) {
  require_nonempty(h_real);
  const double d = static_cast<double>(h_real.value().dim(1));
  Var left = ad::matmul(h_real, projection.p1);
  Var right = ad::matmul(h_real, projection.p2);
  return ad::scale(ad::matmul(left, ad::transpose(right)), 1.0 / d);
}

Var acyclicity(Var w) {
  const Tensor& wv = w.value();
  if (wv.rank() != 2 || wv.dim(0) != wv.dim(1)) throw Error(Errc::NonSquare, "acyclicity of " + shape_string(wv.shape()));
  return ad::add_scalar(ad::trace_expm(ad::square(w)), -static_cast<double>(wv.dim(0)));
}

Var notears_loss(Var h_real, double lambda1, double lambda2, const CausalProjectionVars* projection) {
  Var w = projection ? causal_adjacency(h_real, *projection) : causal_adjacency(h_real);
  Var residual = ad::sub(h_real, ad::matmul(w, h_real));
  Var loss = ad::sum(ad::square(residual));
  if (lambda1 != 0.0) loss = ad::add(loss, ad::scale(ad::sum(ad::abs(w)), lambda1));
  if (lambda2 != 0.0) loss = ad::add(loss, ad::scale(acyclicity(w), lambda2));
  return loss;
}

Tensor causal_adjacency_value(const Tensor& h_real) {
  Tape tape;
  return causal_adjacency(tape.constant(h_real)).value();
}

double acyclicity_value(const Tensor& w) {
  Tape tape;
  return acyclicity(tape.constant(w)).value().item();
}

}  // namespace causalmamba
