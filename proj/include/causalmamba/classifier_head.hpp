#pragma once

#include <vector>

#include "causalmamba/parameters.hpp"

namespace causalmamba {

template <class T>
struct HeadLayer {
  T w1, b1, w2, b2;

  template <class Self, class F>
  static void each(Self& s, F&& f) {
    f("w1", s.w1);
    f("b1", s.b1);
    f("w2", s.w2);
    f("b2", s.b2);
  }
};

using HeadParams = HeadLayer<Tensor>;
using HeadVars = HeadLayer<Var>;

HeadParams init_head(std::size_t hidden, std::size_t head_hidden, std::size_t classes, Rng& rng);

/// H = H_seq + α·H_graph. Throws ShapeMismatch.
Var fuse(Var h_seq, Var h_graph, double alpha);

/// z_b = Σ_i H[b,i]·M[b,i] / Σ_i M[b,i]. Throws AllMasked.
Var masked_mean_pool(Var h, const Tensor& mask);

/// W₂·ReLU(W₁z + b₁) + b₂ (pre-softmax).
Var classifier_logits(Var z, const HeadVars& p);
/// softmax of classifier_logits; rows sum to 1.
Var classify(Var z, const HeadVars& p);

/// Mean over the batch of -Σ_k q_k log p_k with q = (1-ε)·onehot(y) + ε/K.
/// Probabilities below 1e-12 are clamped (with a warning).
Var smoothed_ce(Var probs, const std::vector<int>& labels, double epsilon);

}  // namespace causalmamba
