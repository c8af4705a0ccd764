#include "causalmamba/trainer.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "causalmamba/error.hpp"

namespace causalmamba {

void TrainConfig::validate() const {
  if (lr < 0.0 || !std::isfinite(lr)) throw Error(Errc::InvalidConfig, "learning rate must be nonnegative");
  if (weight_decay < 0.0) throw Error(Errc::InvalidConfig, "weight decay must be nonnegative");
  if (clip_norm < 0.0) throw Error(Errc::InvalidConfig, "clip_norm must be nonnegative");
  if (batch_size == 0) throw Error(Errc::InvalidConfig, "batch_size must be positive");
  if (patience == 0) throw Error(Errc::InvalidConfig, "patience must be at least 1");
  if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
    throw Error(Errc::InvalidConfig, "betas must lie in [0, 1)");
  if (!(adam_eps > 0.0)) throw Error(Errc::InvalidConfig, "adam_eps must be positive");
}

AdamWConfig TrainConfig::adamw() const { return {lr, beta1, beta2, adam_eps, weight_decay}; }

ModelState init_state(const ModelConfig& model, const TrainConfig& train) {
  train.validate();
  ModelState s;
  s.model = model;
  s.params = init_model_params(model, train.seed);
  s.rng = Rng(derive_seed(train.seed, 0xD209));
  s.best_params = s.params;
  return s;
}

namespace {

std::vector<Batch> batches_of(const std::vector<Cascade>& data, std::size_t batch_size) {
  return make_batches(data, batch_size);
}

}  // namespace

Trainer::Trainer(const std::vector<Cascade>& train, const std::vector<Cascade>& val, TrainConfig config,
                 ModelState state)
    : train_(train), val_(val), config_(config), state_(std::move(state)) {
  config_.validate();
  state_.model.validate();
  if (train_.empty() || val_.empty()) throw Error(Errc::InvalidConfig, "training and validation splits must be nonempty");
  train_adj_.reserve(train_.size());
  for (const Cascade& c : train_) train_adj_.push_back(normalize_adjacency(c.edges, c.size()));
  val_batches_ = batches_of(val_, config_.batch_size);
}

bool Trainer::done() const {
  return state_.finalized || state_.epoch >= config_.max_epochs || state_.epochs_since_best >= config_.patience;
}

EpochRecord Trainer::run_epoch() {
  const ModelConfig& mc = state_.model;
  const std::size_t epoch = state_.epoch + 1;
  std::vector<std::size_t> order(train_.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffler(derive_seed(config_.seed, 0x5A0000 + epoch));
  shuffler.shuffle(order.begin(), order.end());

  const AdamWConfig opt = config_.adamw();
  EpochRecord rec;
  rec.epoch = epoch;
  std::size_t nb = 0;
  for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
    const std::size_t end = std::min(order.size(), start + config_.batch_size);
    std::vector<const Cascade*> members;
    std::vector<Tensor> adjacency;
    for (std::size_t i = start; i < end; ++i) {
      members.push_back(&train_[order[i]]);
      adjacency.push_back(train_adj_[order[i]]);
    }
    const Batch batch = make_batch(members);

    std::vector<Tensor> keep;
    if (mc.encoder.dropout > 0.0)
      for (std::size_t l = 0; l < mc.encoder.layers; ++l)
        keep.push_back(dropout_mask({batch.size(), batch.length(), mc.encoder.hidden}, mc.encoder.dropout, state_.rng));

    Tape tape;
    std::vector<Var> registry;
    LossParts loss;
    try {
      const ModelVars vars = bind_model(tape, state_.params, &registry);
      const ForwardPass pass = model_forward(mc, vars, batch, adjacency, keep);
      loss = joint_loss(mc, vars, batch, pass);
      tape.backward(loss.total);
    } catch (const Error& e) {
      if (e.code() != Errc::NonFinite) throw;
      std::ostringstream msg;
      msg << "epoch " << epoch << ", batch " << nb << ": " << e.what();
      throw Error(Errc::NonFiniteLoss, msg.str());
    }
    if (!std::isfinite(loss.total_value)) {
      std::ostringstream msg;
      msg << "epoch " << epoch << ", batch " << nb << ": cls=" << loss.cls_value << " causal=" << loss.causal_value;
      throw Error(Errc::NonFiniteLoss, msg.str());
    }

    std::vector<Tensor> grads;
    grads.reserve(registry.size());
    for (const Var& v : registry) grads.push_back(tape.grad(v));
    rec.grad_norm += clip_grad_norm(grads, config_.clip_norm);

    std::vector<Tensor*> params;
    for (auto& [name, t] : named_parameters(state_.params)) params.push_back(t);
    adamw_step(params, grads, state_.adam, opt);

    rec.train_loss += loss.total_value;
    rec.train_cls += loss.cls_value;
    rec.train_causal += loss.causal_value;
    ++nb;
  }
  const double denom = static_cast<double>(nb);
  rec.train_loss /= denom;
  rec.train_cls /= denom;
  rec.train_causal /= denom;
  rec.grad_norm /= denom;

  std::vector<int> labels;
  for (const Batch& b : val_batches_) labels.insert(labels.end(), b.y.begin(), b.y.end());
  const ClassificationMetrics m = classification_metrics(predict(mc, state_.params, val_batches_), labels);
  rec.val_accuracy = m.accuracy;
  rec.val_macro_f1 = m.macro_f1;

  state_.epoch = epoch;
  // Ties keep the earlier epoch.
  if (m.macro_f1 > state_.best_metric) {
    state_.best_metric = m.macro_f1;
    state_.best_epoch = epoch;
    state_.best_params = state_.params;
    state_.epochs_since_best = 0;
    rec.improved = true;
  } else {
    ++state_.epochs_since_best;
  }
  history_.push_back(rec);
  return rec;
}

void Trainer::finalize() {
  if (state_.finalized) return;
  if (state_.best_epoch > 0) state_.params = state_.best_params;
  state_.finalized = true;
}

FitResult fit(const std::vector<Cascade>& train, const std::vector<Cascade>& val, const ModelConfig& model,
              const TrainConfig& config, const std::function<void(const EpochRecord&)>& on_epoch) {
  Trainer trainer(train, val, config, init_state(model, config));
  while (!trainer.done()) {
    const EpochRecord rec = trainer.run_epoch();
    if (on_epoch) on_epoch(rec);
  }
  trainer.finalize();
  return {std::move(trainer.state()), trainer.history()};
}

std::vector<int> predict(const ModelConfig& model, const ModelParams& params, const std::vector<Batch>& batches) {
  std::vector<int> out;
  for (const Batch& batch : batches) {
    Tape tape;
    const ModelVars vars = bind_model(tape, params);
    const ForwardPass pass = model_forward(model, vars, batch, batch_adjacency(batch));
    const Tensor& p = pass.probs.value();
    for (std::size_t b = 0; b < batch.size(); ++b) {
      int best = 0;
      for (std::size_t k = 1; k < p.cols(); ++k)
        if (p(b, k) > p(b, static_cast<std::size_t>(best))) best = static_cast<int>(k);
      out.push_back(best);
    }
  }
  return out;
}

std::vector<int> predict(const ModelState& state, const std::vector<Cascade>& data, std::size_t batch_size) {
  return predict(state.model, state.params, batches_of(data, batch_size));
}

ClassificationMetrics evaluate(const ModelState& state, const std::vector<Cascade>& data, std::size_t batch_size) {
  if (data.empty()) throw Error(Errc::InvalidConfig, "evaluation data must be nonempty");
  std::vector<int> labels;
  for (const Cascade& c : data) labels.push_back(static_cast<int>(c.label));
  return classification_metrics(predict(state, data, batch_size), labels);
}

}  // namespace causalmamba
