#pragma once

#include <vector>

#include "causalmamba/tensor.hpp"

namespace causalmamba {

struct AdamWConfig {
  double lr = 5e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.05;
  void validate() const;
};

/// First and second moments, one tensor per parameter, plus the step count.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::size_t step = 0;
};

/// Decoupled weight decay: p ← p − lr·wd·p, then the bias-corrected Adam update.
void adamw_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads, AdamState& state,
                const AdamWConfig& config);

/// Global L2 norm over all gradients.
double global_norm(const std::vector<Tensor>& grads);

/// Rescales so the global norm is at most `max_norm`; returns the norm before clipping.
double clip_grad_norm(std::vector<Tensor>& grads, double max_norm);

}  // namespace causalmamba
