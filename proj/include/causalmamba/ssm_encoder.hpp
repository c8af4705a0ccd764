#pragma once

#include <vector>

#include "causalmamba/parameters.hpp"

namespace causalmamba {

struct EncoderConfig {
  std::size_t layers = 2;
  std::size_t hidden = 32;
  std::size_t state = 16;
  double dropout = 0.2;
  /// Initial layer-norm gain of the last layer. The causal penalty grows with
  /// the fourth power of the state scale, so the encoder starts small.
  double output_gain = 0.1;

  void validate() const;
};

/// One selective state-space layer:
///   u = x W_in + b_in
///   Δ = softplus(u W_Δ + b_Δ),  B = u W_B,  C = u W_C,  A = -exp(A_log)
///   y = scan(u, Δ, B, C, A, D)
///   out = mask(layer_norm(u + dropout(y)))
template <class T>
struct SsmLayer {
  T w_in, b_in;
  T w_delta, b_delta;
  T w_b, w_c;
  T a_log, d_skip;
  T ln_gamma, ln_beta;

  template <class Self, class F>
  static void each(Self& s, F&& f) {
    f("w_in", s.w_in);
    f("b_in", s.b_in);
    f("w_delta", s.w_delta);
    f("b_delta", s.b_delta);
    f("w_b", s.w_b);
    f("w_c", s.w_c);
    f("a_log", s.a_log);
    f("d_skip", s.d_skip);
    f("ln_gamma", s.ln_gamma);
    f("ln_beta", s.ln_beta);
  }
};

using SsmLayerParams = SsmLayer<Tensor>;
using SsmLayerVars = SsmLayer<Var>;

/// Mamba-style initialisation: A = -(1..s) per channel, Δ bias so that
/// softplus(b_Δ) is log-uniform in [1e-3, 1e-1], D = 1, layer-norm gain `ln_gain`.
SsmLayerParams init_ssm_layer(std::size_t in_width, std::size_t hidden, std::size_t state, Rng& rng,
                              double ln_gain = 1.0);

/// `dropout_keep`, when non-null, is a B x L x d tensor of 0 or 1/(1-p)
/// multiplied into the scan output. Throws ShapeMismatch.
Var ssm_layer_forward(Var x, const Tensor& mask, const SsmLayerVars& p, const Tensor* dropout_keep = nullptr);

/// Stacked layers; the first layer's input projection maps F -> d.
/// `dropout_keep` is empty in eval mode, else one tensor per layer.
Var encoder_forward(Var x, const Tensor& mask, const std::vector<SsmLayerVars>& layers,
                    const std::vector<Tensor>& dropout_keep = {});

/// Inverted-dropout keep mask (entries 0 or 1/(1-rate)).
Tensor dropout_mask(const Shape& shape, double rate, Rng& rng);

}  // namespace causalmamba
