#pragma once

#include <string>
#include <utility>
#include <vector>

#include "causalmamba/batching.hpp"
#include "causalmamba/causal.hpp"
#include "causalmamba/classifier_head.hpp"
#include "causalmamba/gcn_encoder.hpp"
#include "causalmamba/ssm_encoder.hpp"

namespace causalmamba {

struct ModelConfig {
  std::size_t input_width = 81;
  EncoderConfig encoder;
  std::size_t head_hidden = 0;  // 0: same as encoder.hidden
  double alpha = 0.3;
  double label_smoothing = 0.1;
  CausalHyper causal;
  bool use_gcn = true;
  bool use_causal = true;
  /// Average the causal loss over every graph of a batch instead of the first only.
  bool causal_all_graphs = false;
  /// W = (H'P₁)(H'P₂)ᵀ/d instead of H'H'ᵀ/d.
  bool causal_asymmetric = false;

  std::size_t resolved_head_hidden() const { return head_hidden ? head_hidden : encoder.hidden; }
  void validate() const;
};

/// "mamba", "mamba-gcn", "causalmamba" or "mamba-causal".
std::string variant_name(const ModelConfig& config);

template <class T>
struct ModelWeights {
  std::vector<SsmLayer<T>> layers;
  GcnLayer<T> gcn;
  HeadLayer<T> head;
  std::vector<CausalProjection<T>> projection;  // one entry in the asymmetric variant
};

using ModelParams = ModelWeights<Tensor>;
using ModelVars = ModelWeights<Var>;

ModelParams init_model_params(const ModelConfig& config, std::uint64_t seed);

/// Every parameter tensor with a dotted name, in binding order.
std::vector<std::pair<std::string, Tensor*>> named_parameters(ModelParams& params);
std::vector<std::pair<std::string, const Tensor*>> named_parameters(const ModelParams& params);

/// Registers all parameters as leaves (binding order) and appends them to `registry`.
ModelVars bind_model(Tape& tape, const ModelParams& params, std::vector<Var>* registry = nullptr);

struct ForwardPass {
  Var h_seq;
  Var h_graph;  // invalid when the GCN is disabled
  Var h;        // fused node states
  Var z;
  Var logits;
  Var probs;
};

/// Normalised adjacency of every graph in the batch.
std::vector<Tensor> batch_adjacency(const Batch& batch);

/// `dropout_keep` empty means eval mode.
ForwardPass model_forward(const ModelConfig& config, const ModelVars& vars, const Batch& batch,
                          const std::vector<Tensor>& adjacency, const std::vector<Tensor>& dropout_keep = {});

struct LossParts {
  Var total;
  Var cls;
  Var causal;  // invalid when the causal term is disabled
  double cls_value = 0.0;
  double causal_value = 0.0;
  double total_value = 0.0;
};

/// L_total = L_cls + λ·L_causal; use_causal=false sets λ to 0.
LossParts joint_loss(const ModelConfig& config, const ModelVars& vars, const Batch& batch, const ForwardPass& pass);

/// Causal graph of one graph of a batch built from the fused states of its real nodes.
CausalGraph causal_graph_for(const ModelConfig& config, const ModelParams& params, const Batch& batch,
                             std::size_t index, std::optional<double> threshold = std::nullopt);

}  // namespace causalmamba
