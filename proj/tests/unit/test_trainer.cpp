#include <gtest/gtest.h>

#include <cmath>

#include "../support/temp_dir.hpp"
#include "causalmamba/checkpoint.hpp"
#include "causalmamba/config.hpp"
#include "causalmamba/error.hpp"
#include "causalmamba/features.hpp"
#include "causalmamba/metrics.hpp"
#include "causalmamba/optim.hpp"
#include "causalmamba/synthetic.hpp"
#include "causalmamba/trainer.hpp"

using namespace causalmamba;

namespace {

constexpr std::size_t kText = 8, kUser = 4;

struct TinyData {
  std::vector<Cascade> train, val;
};

const TinyData& tiny_data() {
  static const TinyData data = [] {
    SyntheticConfig cfg;
    cfg.num_events = 48;
    cfg.nodes_min = 4;
    cfg.nodes_max = 8;
    cfg.d_text = kText;
    cfg.d_user = kUser;
    cfg.seed = 99;
    std::vector<Cascade> all = generate_synthetic(cfg).cascades;
    featurize_all(all, TrigramEmbedding(kText), kUser, "salt");
    const DatasetSplit s = split_dataset(all, {0.7, 0.3, 0.0}, 1);
    return TinyData{s.train, s.val};
  }();
  return data;
}

ModelConfig tiny_model() {
  ModelConfig m;
  m.input_width = feature_width(kText, kUser);
  m.encoder.layers = 1;
  m.encoder.hidden = 8;
  m.encoder.state = 4;
  m.encoder.dropout = 0.1;
  return m;
}

TrainConfig tiny_train() {
  TrainConfig t;
  t.lr = 1e-2;
  t.batch_size = 8;
  t.max_epochs = 4;
  t.patience = 10;
  t.seed = 5;
  return t;
}

void expect_same_params(const ModelParams& a, const ModelParams& b) {
  const auto na = named_parameters(a), nb = named_parameters(b);
  ASSERT_EQ(na.size(), nb.size());
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_EQ(na[i].first, nb[i].first);
    EXPECT_EQ(*na[i].second, *nb[i].second) << na[i].first;
  }
}

}  // namespace

// ------------------------------------------------------------ metrics

TEST(Metrics, PerfectPredictions) {
  const std::vector<int> y = {0, 1, 2, 3, 1, 2};
  const ClassificationMetrics m = classification_metrics(y, y);
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.macro_f1, 1.0);
  EXPECT_EQ(m.count, 6u);
}

TEST(Metrics, TwoClassExample) {
  // Class 0: tp 1, fp 1 gives 2/3; class 1 is never predicted and scores 0.
  EXPECT_NEAR(macro_f1({0, 0}, {0, 1}, 2), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(accuracy({0, 0}, {0, 1}), 0.5);
}

TEST(Metrics, AbsentClassesStillCount) {
  EXPECT_NEAR(macro_f1({0, 0}, {0, 0}, 4), 0.25, 1e-15);
}

TEST(Metrics, DisjointPredictionsScoreZero) {
  EXPECT_EQ(macro_f1({1, 1, 0}, {0, 0, 1}, 2), 0.0);
  EXPECT_EQ(accuracy({1, 1, 0}, {0, 0, 1}), 0.0);
}

TEST(Metrics, LengthMismatch) {
  try {
    accuracy({0, 1}, {0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::LengthMismatch);
  }
}

TEST(Metrics, ConfusionMatchesCounts) {
  Rng rng(1);
  std::vector<int> p, y;
  for (int i = 0; i < 200; ++i) {
    p.push_back(static_cast<int>(rng.below(4)));
    y.push_back(static_cast<int>(rng.below(4)));
  }
  const ClassificationMetrics m = classification_metrics(p, y);
  std::size_t diagonal = 0;
  for (std::size_t t = 0; t < 4; ++t) {
    const auto row = std::accumulate(m.confusion[t].begin(), m.confusion[t].end(), std::size_t{0});
    EXPECT_EQ(row, static_cast<std::size_t>(std::count(y.begin(), y.end(), static_cast<int>(t))));
    diagonal += m.confusion[t][t];
    const double tp = static_cast<double>(m.confusion[t][t]);
    double fp = 0, fn = 0;
    for (std::size_t o = 0; o < 4; ++o)
      if (o != t) {
        fp += static_cast<double>(m.confusion[o][t]);
        fn += static_cast<double>(m.confusion[t][o]);
      }
    EXPECT_NEAR(m.per_class_f1[t], 2 * tp / (2 * tp + fp + fn), 1e-15);
  }
  EXPECT_NEAR(m.accuracy, static_cast<double>(diagonal) / 200.0, 1e-15);
}

// ------------------------------------------------------------ optimiser

TEST(Optim, ClippingBoundsTheGlobalNorm) {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Tensor> g = {random_normal({3, 4}, 2.0, rng), random_normal({5}, 2.0, rng)};
    const double before = global_norm(g);
    const std::vector<Tensor> original = g;
    EXPECT_DOUBLE_EQ(clip_grad_norm(g, 1.0), before);
    EXPECT_LE(global_norm(g), 1.0 + 1e-9);
    for (std::size_t t = 0; t < g.size(); ++t)
      for (std::size_t i = 0; i < g[t].size(); ++i) EXPECT_NEAR(g[t][i] * before, original[t][i], 1e-12);
  }
  std::vector<Tensor> small = {Tensor({2}, 0.1)};
  clip_grad_norm(small, 1.0);
  EXPECT_EQ(small[0][0], 0.1);
}

TEST(Optim, AdamWithoutDecayFindsTheBowlMinimum) {
  const Tensor target({4}, std::vector<double>{1.0, -2.0, 0.5, 3.0});
  Tensor p({4});
  AdamState state;
  AdamWConfig cfg;
  cfg.lr = 1e-2;
  cfg.weight_decay = 0.0;
  for (int step = 0; step < 20000; ++step) {
    Tensor g = p;
    for (std::size_t i = 0; i < 4; ++i) g[i] -= target[i];
    adamw_step({&p}, {g}, state, cfg);
  }
  EXPECT_EQ(state.step, 20000u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(p[i], target[i], 1e-6);
}

TEST(Optim, DecayIsDecoupledFromTheGradient) {
  Tensor p({3}, 2.0);
  AdamState state;
  AdamWConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.05;
  for (int step = 0; step < 10; ++step) adamw_step({&p}, {Tensor({3})}, state, cfg);
  for (double v : p.values()) EXPECT_NEAR(v, 2.0 * std::pow(1.0 - 0.1 * 0.05, 10), 1e-14);
}

TEST(Optim, FirstStepMovesByLearningRate) {
  // Bias correction makes the first update lr·sign(g) up to eps.
  Tensor p({2}, 0.0);
  AdamState state;
  AdamWConfig cfg;
  cfg.lr = 0.01;
  cfg.weight_decay = 0.0;
  adamw_step({&p}, {Tensor({2}, std::vector<double>{3.0, -0.5})}, state, cfg);
  EXPECT_NEAR(p[0], -0.01, 1e-9);
  EXPECT_NEAR(p[1], 0.01, 1e-9);
}

// ------------------------------------------------------------ model and loss

TEST(Model, VariantNames) {
  ModelConfig m;
  EXPECT_EQ(variant_name(m), "causalmamba");
  m.use_causal = false;
  EXPECT_EQ(variant_name(m), "mamba-gcn");
  m.use_gcn = false;
  EXPECT_EQ(variant_name(m), "mamba");
  m.use_causal = true;
  EXPECT_EQ(variant_name(m), "mamba-causal");
}

TEST(Model, JointLossArithmetic) {
  const TinyData& d = tiny_data();
  const std::vector<Batch> batches = make_batches(d.train, 8);
  ModelConfig m = tiny_model();
  m.causal.lambda = 1.2;
  const ModelParams params = init_model_params(m, 3);
  Tape tape;
  const ModelVars vars = bind_model(tape, params);
  const ForwardPass pass = model_forward(m, vars, batches[0], batch_adjacency(batches[0]));
  const LossParts parts = joint_loss(m, vars, batches[0], pass);
  EXPECT_GT(parts.causal_value, 0.0);
  EXPECT_NEAR(parts.total_value, parts.cls_value + 1.2 * parts.causal_value, 1e-12);

  m.causal.lambda = 0.0;
  const LossParts plain = joint_loss(m, vars, batches[0], pass);
  EXPECT_EQ(plain.total_value, plain.cls_value);
  EXPECT_EQ(plain.cls_value, parts.cls_value);

  m.causal.lambda = 1.2;
  m.use_causal = false;
  EXPECT_EQ(joint_loss(m, vars, batches[0], pass).total_value, parts.cls_value);
}

TEST(Model, ForwardShapes) {
  const TinyData& d = tiny_data();
  const Batch batch = make_batches(d.train, 8)[0];
  const ModelConfig m = tiny_model();
  Tape tape;
  const ForwardPass pass = model_forward(m, bind_model(tape, init_model_params(m, 3)), batch, batch_adjacency(batch));
  EXPECT_EQ(pass.h.shape(), (Shape{batch.size(), batch.length(), 8}));
  EXPECT_EQ(pass.probs.shape(), (Shape{batch.size(), 4}));
  EXPECT_TRUE(pass.h_graph.valid());
}

// ------------------------------------------------------------ training

TEST(Fit, DeterministicForAFixedSeed) {
  const TinyData& d = tiny_data();
  const FitResult a = fit(d.train, d.val, tiny_model(), tiny_train());
  const FitResult b = fit(d.train, d.val, tiny_model(), tiny_train());
  EXPECT_EQ(a.history, b.history);
  expect_same_params(a.state.params, b.state.params);
}

TEST(Fit, FrozenModelStopsAfterPatience) {
  const TinyData& d = tiny_data();
  TrainConfig t = tiny_train();
  t.lr = 0.0;
  t.patience = 1;
  t.max_epochs = 20;
  const FitResult r = fit(d.train, d.val, tiny_model(), t);
  ASSERT_EQ(r.history.size(), 2u);
  EXPECT_TRUE(r.history[0].improved);
  EXPECT_FALSE(r.history[1].improved);
  EXPECT_EQ(r.history[0].val_macro_f1, r.history[1].val_macro_f1);
  expect_same_params(r.state.params, init_model_params(tiny_model(), t.seed));
}

TEST(Fit, LearnsASeparableSet) {
  const TinyData& d = tiny_data();
  TrainConfig t = tiny_train();
  t.max_epochs = 40;
  t.patience = 40;
  const FitResult r = fit(d.train, d.val, tiny_model(), t);
  EXPECT_LT(r.history.back().train_cls, r.history.front().train_cls);
  EXPECT_GE(evaluate(r.state, d.train).accuracy, 0.9);
}

TEST(Fit, BestSnapshotIsRestored) {
  const TinyData& d = tiny_data();
  TrainConfig t = tiny_train();
  t.max_epochs = 6;
  const FitResult r = fit(d.train, d.val, tiny_model(), t);
  EXPECT_TRUE(r.state.finalized);
  ASSERT_GT(r.state.best_epoch, 0u);
  EXPECT_EQ(evaluate(r.state, d.val).macro_f1, r.state.best_metric);
  EXPECT_EQ(r.history[r.state.best_epoch - 1].val_macro_f1, r.state.best_metric);
}

TEST(Checkpoint, RoundTripIsExact) {
  const TinyData& d = tiny_data();
  TrainConfig t = tiny_train();
  t.max_epochs = 2;
  const FitResult r = fit(d.train, d.val, tiny_model(), t);
  testutil::TempDir dir;
  const std::string path = (dir / "ckpt.json").string();
  save_checkpoint(path, r.state, {{"note", "x"}});
  nlohmann::json meta;
  const ModelState back = load_checkpoint(path, &meta);
  EXPECT_EQ(meta.at("note"), "x");
  expect_same_params(back.params, r.state.params);
  expect_same_params(back.best_params, r.state.best_params);
  EXPECT_EQ(back.adam.step, r.state.adam.step);
  EXPECT_EQ(back.adam.m, r.state.adam.m);
  EXPECT_EQ(back.adam.v, r.state.adam.v);
  EXPECT_EQ(back.rng, r.state.rng);
  EXPECT_EQ(back.epoch, 2u);
  EXPECT_EQ(back.best_metric, r.state.best_metric);
  EXPECT_EQ(to_json(back.model), to_json(r.state.model));
}

TEST(Checkpoint, ResumeIsBitExact) {
  const TinyData& d = tiny_data();
  const TrainConfig t = tiny_train();

  Trainer straight(d.train, d.val, t, init_state(tiny_model(), t));
  while (!straight.done()) straight.run_epoch();

  Trainer first(d.train, d.val, t, init_state(tiny_model(), t));
  first.run_epoch();
  first.run_epoch();
  testutil::TempDir dir;
  const std::string path = (dir / "mid.json").string();
  save_checkpoint(path, first.state());
  Trainer second(d.train, d.val, t, load_checkpoint(path));
  std::vector<EpochRecord> history = first.history();
  while (!second.done()) history.push_back(second.run_epoch());

  EXPECT_EQ(history, straight.history());
  expect_same_params(second.state().params, straight.state().params);
  EXPECT_EQ(second.state().adam.m, straight.state().adam.m);
}

TEST(Checkpoint, BadFiles) {
  testutil::TempDir dir;
  try {
    load_checkpoint((dir / "absent.json").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FileNotFound);
  }
  testutil::write_text(dir / "bad.json", "{\"format\": \"something else\"}");
  try {
    load_checkpoint((dir / "bad.json").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BadCheckpoint);
  }
}

// ------------------------------------------------------------ configuration

TEST(Config, JsonRoundTrip) {
  RunConfig cfg;
  cfg.model.alpha = 0.7;
  cfg.train.lr = 3e-4;
  cfg.intervention.threshold = 0.2;
  const RunConfig back = run_config_from_json(to_json(cfg));
  EXPECT_EQ(to_json(back), to_json(cfg));
}

TEST(Config, UnknownKeysAndWrongTypesAreRejected) {
  for (const char* text : {R"({"model": {"bogus": 1}})", R"({"nonsense": {}})", R"({"train": {"lr": "fast"}})"}) {
    try {
      run_config_from_json(nlohmann::json::parse(text));
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::InvalidConfig) << text;
    }
  }
}

TEST(Config, PartialSectionsKeepDefaults) {
  const RunConfig cfg = run_config_from_json(nlohmann::json::parse(R"({"train": {"batch_size": 4}})"));
  EXPECT_EQ(cfg.train.batch_size, 4u);
  EXPECT_EQ(cfg.train.patience, TrainConfig{}.patience);
  EXPECT_EQ(cfg.model.alpha, ModelConfig{}.alpha);
}

TEST(Config, ResolveValidatesAndPropagatesWidths) {
  RunConfig cfg;
  cfg.features.d_text = 12;
  cfg.features.d_user = 3;
  cfg.resolve();
  EXPECT_EQ(cfg.model.input_width, 16u);
  EXPECT_EQ(cfg.synthetic.d_text, 12u);
  cfg.train.batch_size = 0;
  EXPECT_THROW(cfg.resolve(), Error);
}
