#include "causalmamba/optim.hpp"

#include <cmath>

#include "causalmamba/error.hpp"

namespace causalmamba {

void AdamWConfig::validate() const {
  if (!(lr > 0.0)) throw Error(Errc::InvalidConfig, "learning rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw Error(Errc::InvalidConfig, "betas must lie in [0, 1)");
  if (!(eps > 0.0)) throw Error(Errc::InvalidConfig, "eps must be positive");
  if (weight_decay < 0.0) throw Error(Errc::InvalidConfig, "weight decay must be nonnegative");
}

void adamw_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
                const AdamWConfig& c) {
  if (params.size() != grads.size()) throw Error(Errc::ShapeMismatch, "parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const Tensor* p : params) {
      state.m.emplace_back(p->shape());
      state.v.emplace_back(p->shape());
    }
  }
  if (state.m.size() != params.size()) throw Error(Errc::ShapeMismatch, "optimizer state does not match parameters");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    if (g.shape() != p.shape()) throw Error(Errc::ShapeMismatch, "gradient shape differs from parameter");
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    auto pd = p.values();
    const auto gd = g.values();
    for (std::size_t k = 0; k < pd.size(); ++k) {
      pd[k] -= c.lr * c.weight_decay * pd[k];
      m[k] = c.beta1 * m[k] + (1.0 - c.beta1) * gd[k];
      v[k] = c.beta2 * v[k] + (1.0 - c.beta2) * gd[k] * gd[k];
      pd[k] -= c.lr * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + c.eps);
    }
  }
}

double global_norm(const std::vector<Tensor>& grads) {
  double s = 0.0;
  for (const Tensor& g : grads)
    for (double x : g.values()) s += x * x;
  return std::sqrt(s);
}

double clip_grad_norm(std::vector<Tensor>& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (Tensor& g : grads)
      for (double& x : g.values()) x *= scale;
  }
  return norm;
}

}  // namespace causalmamba
