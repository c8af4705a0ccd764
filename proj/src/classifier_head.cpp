#include "causalmamba/classifier_head.hpp"

#include <cmath>

#include "causalmamba/error.hpp"
#include "causalmamba/ops.hpp"

namespace causalmamba {

HeadParams init_head(std::size_t hidden, std::size_t head_hidden, std::size_t classes, Rng& rng) {
  HeadParams p;
  p.w1 = random_normal({hidden, head_hidden}, std::sqrt(2.0 / static_cast<double>(hidden)), rng);
  p.b1 = Tensor({head_hidden});
  p.w2 = random_normal({head_hidden, classes}, 1.0 / std::sqrt(static_cast<double>(head_hidden)), rng);
  p.b2 = Tensor({classes});
  return p;
}

Var fuse(Var h_seq, Var h_graph, double alpha) {
  if (h_seq.shape() != h_graph.shape())
    throw Error(Errc::ShapeMismatch,
                "fuse " + shape_string(h_seq.shape()) + " with " + shape_string(h_graph.shape()));
  return ad::add(h_seq, ad::scale(h_graph, alpha));
}

Var masked_mean_pool(Var h, const Tensor& mask) { return ad::masked_mean_pool(h, mask); }

Var classifier_logits(Var z, const HeadVars& p) {
  if (z.value().cols() != p.w1.value().dim(0))
    throw Error(Errc::ShapeMismatch, "classifier expects width " + std::to_string(p.w1.value().dim(0)));
  Var hidden = ad::relu(ad::add_bias(ad::matmul(z, p.w1), p.b1));
  return ad::add_bias(ad::matmul(hidden, p.w2), p.b2);
}

Var classify(Var z, const HeadVars& p) { return ad::softmax(classifier_logits(z, p)); }

Var smoothed_ce(Var probs, const std::vector<int>& labels, double epsilon) {
  const Tensor& p = probs.value();
  if (p.rank() != 2 || p.dim(0) != labels.size())
    throw Error(Errc::ShapeMismatch, "smoothed_ce: probs " + shape_string(p.shape()) + " for " +
                                         std::to_string(labels.size()) + " labels");
  if (epsilon < 0.0 || epsilon >= 1.0) throw Error(Errc::InvalidConfig, "label smoothing must lie in [0, 1)");
  const std::size_t batch = p.dim(0), classes = p.dim(1);
  Tensor weights({batch, classes});
  for (std::size_t b = 0; b < batch; ++b) {
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= classes)
      throw Error(Errc::IndexOutOfRange, "label " + std::to_string(labels[b]));
    for (std::size_t k = 0; k < classes; ++k) {
      const double q = (static_cast<std::size_t>(labels[b]) == k ? 1.0 - epsilon : 0.0) +
                       epsilon / static_cast<double>(classes);
      weights(b, k) = -q / static_cast<double>(batch);
    }
  }
  return ad::weighted_sum(ad::log(probs), weights);
}

}  // namespace causalmamba
