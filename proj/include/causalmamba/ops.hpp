#pragma once

#include <vector>

#include "causalmamba/tape.hpp"

// Differentiable primitives. Each op records its value on the inputs' tape
// together with the analytic vector-Jacobian product.
namespace causalmamba::ad {

inline constexpr double kLogClamp = 1e-12;

// Linear algebra. `matmul` folds every leading dimension of `a` into rows,
// so a B x L x F tensor times an F x d matrix is a batched linear map.
Var matmul(Var a, Var b);
Var transpose(Var a);

// Elementwise.
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var mul_const(Var a, const Tensor& c);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);
Var add_bias(Var a, Var bias);
Var relu(Var a);  // subgradient 0 at 0
Var exp(Var a);
Var log(Var a);  // clamped below at kLogClamp, warns when clamping
Var softplus(Var a);
Var square(Var a);
Var abs(Var a);  // subgradient 0 at 0

// Reductions.
Var sum(Var a);
Var mean(Var a);
Var weighted_sum(Var a, const Tensor& weights);

// Row-wise over the last dimension.
Var softmax(Var a);
Var layer_norm(Var a, Var gamma, Var beta, double eps = 1e-5);

// Masking. `mask` has one entry per row of `a` (B x L for a B x L x d input).
Var mask_rows(Var a, const Tensor& mask);
/// Σ_i a[b,i,:]·M[b,i] / Σ_i M[b,i]. Throws AllMasked.
Var masked_mean_pool(Var a, const Tensor& mask);
/// Real-node rows a[b, 0:n, :] as an n x d matrix.
Var slice_rows(Var a, std::size_t batch_index, std::size_t n);

/// Selective state-space scan over a B x L x d sequence (diagonal A = -exp(a_log)).
/// For every valid position t (mask 1) and channel c:
///   h_t[c,:] = exp(Δ_t[c] A[c,:]) ⊙ h_{t-1}[c,:] + Δ_t[c] B_t u_t[c]
///   y_t[c]   = <C_t, h_t[c,:]> + D[c] u_t[c]
/// Masked positions emit zero and carry h unchanged.
Var selective_scan(Var u, Var delta, Var b, Var c, Var a_log, Var d_skip, const Tensor& mask);

/// out[b, 0:n_b, :] = N_b · h[b, 0:n_b, :]; rows past n_b are zero.
/// Each N_b must be symmetric (the backward pass uses N_b for N_bᵀ).
Var graph_aggregate(Var h, const std::vector<Tensor>& adjacency);

/// tr(e^S) with gradient (e^S)ᵀ.
Var trace_expm(Var s);

}  // namespace causalmamba::ad
