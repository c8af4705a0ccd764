#include "causalmamba/model.hpp"

#include "causalmamba/digraph.hpp"
#include "causalmamba/error.hpp"
#include "causalmamba/ops.hpp"
#include "causalmamba/random.hpp"

namespace causalmamba {

void ModelConfig::validate() const {
  encoder.validate();
  causal.validate();
  if (input_width == 0) throw Error(Errc::InvalidConfig, "input_width must be positive");
  if (alpha < 0.0) throw Error(Errc::InvalidConfig, "alpha must be nonnegative");
  if (label_smoothing < 0.0 || label_smoothing >= 1.0) throw Error(Errc::InvalidConfig, "label smoothing must lie in [0, 1)");
}

std::string variant_name(const ModelConfig& c) {
  if (c.use_gcn && c.use_causal) return "causalmamba";
  if (c.use_gcn) return "mamba-gcn";
  if (c.use_causal) return "mamba-causal";
  return "mamba";
}

ModelParams init_model_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, 0x1417));
  ModelParams p;
  const std::size_t d = config.encoder.hidden;
  for (std::size_t l = 0; l < config.encoder.layers; ++l)
    p.layers.push_back(init_ssm_layer(l == 0 ? config.input_width : d, d, config.encoder.state, rng,
                                     l + 1 == config.encoder.layers ? config.encoder.output_gain : 1.0));
  p.gcn = init_gcn(d, rng);
  p.head = init_head(d, config.resolved_head_hidden(), kNumClasses, rng);
  if (config.causal_asymmetric) p.projection.push_back(init_causal_projection(d, rng));
  return p;
}

namespace {

template <class T, class F>
void visit_model(ModelWeights<T>& w, F&& f) {
  for (std::size_t l = 0; l < w.layers.size(); ++l)
    SsmLayer<T>::each(w.layers[l], [&](const std::string& name, T& t) { f("ssm" + std::to_string(l) + "." + name, t); });
  GcnLayer<T>::each(w.gcn, [&](const std::string& name, T& t) { f("gcn." + name, t); });
  HeadLayer<T>::each(w.head, [&](const std::string& name, T& t) { f("head." + name, t); });
  for (auto& proj : w.projection)
    CausalProjection<T>::each(proj, [&](const std::string& name, T& t) { f("causal." + name, t); });
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> named_parameters(ModelParams& params) {
  std::vector<std::pair<std::string, Tensor*>> out;
  visit_model(params, [&](const std::string& name, Tensor& t) { out.emplace_back(name, &t); });
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> named_parameters(const ModelParams& params) {
  std::vector<std::pair<std::string, const Tensor*>> out;
  visit_model(const_cast<ModelParams&>(params), [&](const std::string& name, Tensor& t) { out.emplace_back(name, &t); });
  return out;
}

ModelVars bind_model(Tape& tape, const ModelParams& params, std::vector<Var>* registry) {
  ModelVars vars;
  vars.layers.resize(params.layers.size());
  vars.projection.resize(params.projection.size());
  std::vector<Var*> slots;
  visit_model(vars, [&](const std::string&, Var& v) { slots.push_back(&v); });
  const auto tensors = named_parameters(params);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    *slots[i] = tape.leaf(*tensors[i].second);
    if (registry) registry->push_back(*slots[i]);
  }
  return vars;
}

std::vector<Tensor> batch_adjacency(const Batch& batch) {
  std::vector<Tensor> out;
  out.reserve(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b)
    out.push_back(normalize_adjacency(batch.edges_per_graph[b], batch.n_per_graph[b]));
  return out;
}

ForwardPass model_forward(const ModelConfig& config, const ModelVars& vars, const Batch& batch,
                          const std::vector<Tensor>& adjacency, const std::vector<Tensor>& dropout_keep) {
  Tape& tape = *vars.head.w1.tape();
  ForwardPass pass;
  Var x = tape.constant(batch.x);
  pass.h_seq = encoder_forward(x, batch.mask, vars.layers, dropout_keep);
  if (config.use_gcn) {
    pass.h_graph = gcn_forward(pass.h_seq, adjacency, batch.mask, vars.gcn);
    pass.h = fuse(pass.h_seq, pass.h_graph, config.alpha);
  } else {
    pass.h = pass.h_seq;
  }
  pass.z = masked_mean_pool(pass.h, batch.mask);
  pass.logits = classifier_logits(pass.z, vars.head);
  pass.probs = ad::softmax(pass.logits);
  return pass;
}

namespace {
Var causal_term(const ModelConfig& config, const ModelVars& vars, const Batch& batch, Var h, std::size_t b) {
  Var h_real = ad::slice_rows(h, b, batch.n_per_graph[b]);
  const CausalProjectionVars* proj = vars.projection.empty() ? nullptr : &vars.projection.front();
  return notears_loss(h_real, config.causal.lambda1, config.causal.lambda2, proj);
}
}  // namespace

LossParts joint_loss(const ModelConfig& config, const ModelVars& vars, const Batch& batch, const ForwardPass& pass) {
  LossParts parts;
  parts.cls = smoothed_ce(pass.probs, batch.y, config.label_smoothing);
  parts.cls_value = parts.cls.value().item();
  parts.total = parts.cls;
  if (config.use_causal && config.causal.lambda > 0.0) {
    if (config.causal_all_graphs) {
      parts.causal = causal_term(config, vars, batch, pass.h, 0);
      for (std::size_t b = 1; b < batch.size(); ++b)
        parts.causal = ad::add(parts.causal, causal_term(config, vars, batch, pass.h, b));
      parts.causal = ad::scale(parts.causal, 1.0 / static_cast<double>(batch.size()));
    } else {
      parts.causal = causal_term(config, vars, batch, pass.h, 0);
    }
    parts.causal_value = parts.causal.value().item();
    parts.total = ad::add(parts.cls, ad::scale(parts.causal, config.causal.lambda));
  }
  parts.total_value = parts.total.value().item();
  return parts;
}

CausalGraph causal_graph_for(const ModelConfig& config, const ModelParams& params, const Batch& batch,
                             std::size_t index, std::optional<double> threshold) {
  if (index >= batch.size()) throw Error(Errc::IndexOutOfRange, "graph index outside batch");
  Tape tape;
  ModelVars vars = bind_model(tape, params);
  const ForwardPass pass = model_forward(config, vars, batch, batch_adjacency(batch));
  Var h_real = ad::slice_rows(pass.h, index, batch.n_per_graph[index]);
  Var w = vars.projection.empty() ? causal_adjacency(h_real) : causal_adjacency(h_real, vars.projection.front());
  CausalGraph g;
  g.weights = w.value();
  g.threshold = threshold ? *threshold : default_threshold(g.weights);
  g.edges = extract_digraph(g.weights, g.threshold);
  return g;
}

}  // namespace causalmamba
