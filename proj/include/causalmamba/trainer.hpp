#pragma once

#include <functional>
#include <string>
#include <vector>

#include "causalmamba/metrics.hpp"
#include "causalmamba/model.hpp"
#include "causalmamba/optim.hpp"
#include "causalmamba/random.hpp"

namespace causalmamba {

struct TrainConfig {
  double lr = 5e-5;  // 0 freezes the model
  double weight_decay = 0.05;
  double clip_norm = 1.0;
  std::size_t batch_size = 16;
  std::size_t patience = 10;
  std::size_t max_epochs = 100;
  std::uint64_t seed = 42;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
  AdamWConfig adamw() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_cls = 0.0;
  double train_causal = 0.0;
  double grad_norm = 0.0;  // mean pre-clip global norm
  double val_accuracy = 0.0;
  double val_macro_f1 = 0.0;
  bool improved = false;

  bool operator==(const EpochRecord&) const = default;
};

struct ModelState {
  ModelConfig model;
  ModelParams params;
  AdamState adam;
  Rng rng;  // dropout stream
  std::size_t epoch = 0;  // completed epochs
  ModelParams best_params;
  double best_metric = -1.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_since_best = 0;
  bool finalized = false;  // best snapshot restored into params
};

ModelState init_state(const ModelConfig& model, const TrainConfig& train);

/// Epoch-by-epoch driver; `fit` runs it to completion. Exposed so a run can
/// be checkpointed mid-way and resumed bit-exactly.
class Trainer {
 public:
  Trainer(const std::vector<Cascade>& train, const std::vector<Cascade>& val, TrainConfig config, ModelState state);

  EpochRecord run_epoch();
  bool done() const;
  /// Restores the best validation snapshot.
  void finalize();

  ModelState& state() { return state_; }
  const ModelState& state() const { return state_; }
  const std::vector<EpochRecord>& history() const { return history_; }

 private:
  const std::vector<Cascade>& train_;
  const std::vector<Cascade>& val_;
  TrainConfig config_;
  ModelState state_;
  std::vector<Tensor> train_adj_;
  std::vector<Batch> val_batches_;
  std::vector<EpochRecord> history_;
};

struct FitResult {
  ModelState state;
  std::vector<EpochRecord> history;
};

FitResult fit(const std::vector<Cascade>& train, const std::vector<Cascade>& val, const ModelConfig& model,
              const TrainConfig& config, const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Eval-mode class predictions, batch by batch in input order.
std::vector<int> predict(const ModelConfig& model, const ModelParams& params, const std::vector<Batch>& batches);
std::vector<int> predict(const ModelState& state, const std::vector<Cascade>& data, std::size_t batch_size = 16);

ClassificationMetrics evaluate(const ModelState& state, const std::vector<Cascade>& data, std::size_t batch_size = 16);

}  // namespace causalmamba
