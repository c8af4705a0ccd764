#include "causalmamba/ssm_encoder.hpp"

#include <cmath>

#include "causalmamba/error.hpp"
#include "causalmamba/ops.hpp"

namespace causalmamba {

void EncoderConfig::validate() const {
  if (layers == 0 || hidden == 0 || state == 0) throw Error(Errc::InvalidConfig, "encoder sizes must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw Error(Errc::InvalidConfig, "dropout must lie in [0, 1)");
  if (!(output_gain > 0.0)) throw Error(Errc::InvalidConfig, "output_gain must be positive");
}

SsmLayerParams init_ssm_layer(std::size_t in_width, std::size_t hidden, std::size_t state, Rng& rng,
                              double ln_gain) {
  SsmLayerParams p;
  p.w_in = random_normal({in_width, hidden}, 1.0 / std::sqrt(static_cast<double>(in_width)), rng);
  p.b_in = Tensor({hidden});
  p.w_delta = random_normal({hidden, hidden}, 0.1 / std::sqrt(static_cast<double>(hidden)), rng);
  p.b_delta = Tensor({hidden});
  for (double& b : p.b_delta.values()) {
    const double dt = std::exp(std::log(1e-3) + rng.uniform() * (std::log(1e-1) - std::log(1e-3)));
    b = dt + std::log(-std::expm1(-dt));  // softplus^-1
  }
  p.w_b = random_normal({hidden, state}, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  p.w_c = random_normal({hidden, state}, 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
  p.a_log = Tensor({hidden, state});
  for (std::size_t c = 0; c < hidden; ++c)
    for (std::size_t n = 0; n < state; ++n) p.a_log(c, n) = std::log(static_cast<double>(n + 1));
  p.d_skip = Tensor({hidden}, 1.0);
  p.ln_gamma = Tensor({hidden}, ln_gain);
  p.ln_beta = Tensor({hidden});
  return p;
}

Var ssm_layer_forward(Var x, const Tensor& mask, const SsmLayerVars& p, const Tensor* dropout_keep) {
  const Tensor& xv = x.value();
  if (xv.rank() != 3 || mask.shape() != Shape{xv.dim(0), xv.dim(1)})
    throw Error(Errc::ShapeMismatch, "ssm layer input " + shape_string(xv.shape()) + " with mask " +
                                         shape_string(mask.shape()));
  if (p.w_in.value().rank() != 2 || p.w_in.value().dim(0) != xv.dim(2))
    throw Error(Errc::ShapeMismatch, "ssm layer expects width " + std::to_string(p.w_in.value().dim(0)) + ", got " +
                                         std::to_string(xv.dim(2)));
  Var u = ad::add_bias(ad::matmul(x, p.w_in), p.b_in);
  Var delta = ad::softplus(ad::add_bias(ad::matmul(u, p.w_delta), p.b_delta));
  Var b = ad::matmul(u, p.w_b);
  Var c = ad::matmul(u, p.w_c);
  Var y = ad::selective_scan(u, delta, b, c, p.a_log, p.d_skip, mask);
  if (dropout_keep) y = ad::mul_const(y, *dropout_keep);
  Var out = ad::layer_norm(ad::add(u, y), p.ln_gamma, p.ln_beta);
  return ad::mask_rows(out, mask);
}

Var encoder_forward(Var x, const Tensor& mask, const std::vector<SsmLayerVars>& layers,
                    const std::vector<Tensor>& dropout_keep) {
  if (!dropout_keep.empty() && dropout_keep.size() != layers.size())
    throw Error(Errc::ShapeMismatch, "one dropout mask per layer required");
  Var h = x;
  for (std::size_t l = 0; l < layers.size(); ++l)
    h = ssm_layer_forward(h, mask, layers[l], dropout_keep.empty() ? nullptr : &dropout_keep[l]);
  return h;
}

Tensor dropout_mask(const Shape& shape, double rate, Rng& rng) {
  Tensor keep(shape, 1.0);
  if (rate <= 0.0) return keep;
  const double scale = 1.0 / (1.0 - rate);
  for (double& v : keep.values()) v = rng.uniform() < rate ? 0.0 : scale;
  return keep;
}

}  // namespace causalmamba
