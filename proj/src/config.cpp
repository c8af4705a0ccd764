#include "causalmamba/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <type_traits>

#include "causalmamba/error.hpp"
#include "causalmamba/features.hpp"

namespace causalmamba {

using nlohmann::json;

namespace {

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(Errc::InvalidConfig, where_ + " must be an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    bool ok;
    if constexpr (std::is_same_v<T, bool>) {
      ok = v.is_boolean();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      ok = v.is_number_unsigned();
    } else if constexpr (std::is_floating_point_v<T>) {
      ok = v.is_number();
    } else {
      ok = v.is_string();
    }
    if (!ok) throw Error(Errc::InvalidConfig, "wrong type for " + where_ + "." + key);
    out = v.get<T>();
  }

  void get(const char* key, std::optional<double>& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    if (v.is_null()) {
      out.reset();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      throw Error(Errc::InvalidConfig, "wrong type for " + where_ + "." + key);
    }
  }

  const json* section(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw Error(Errc::InvalidConfig, "unknown key " + where_ + "." + it.key());
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

json class_params_json(const ClassParams& p) {
  return {{"branching", p.branching}, {"chaining", p.chaining}, {"decay_rate", p.decay_rate},
          {"text_separation", p.text_separation}};
}

}  // namespace

void RunConfig::resolve() {
  if (features.d_text == 0) throw Error(Errc::InvalidConfig, "features.d_text must be positive");
  synthetic.d_text = features.d_text;
  synthetic.d_user = features.d_user;
  model.input_width = feature_width(features.d_text, features.d_user);
  synthetic.validate();
  model.validate();
  train.validate();
  intervention.pagerank.validate();
  if (intervention.threshold && !(*intervention.threshold >= 0.0))
    throw Error(Errc::InvalidConfig, "intervention.threshold must be nonnegative");
  if (!(notears.lambda1 >= 0.0) || !(notears.threshold >= 0.0) || notears.max_iter == 0 || !(notears.h_tol > 0.0))
    throw Error(Errc::InvalidConfig, "notears options out of range");
  const double total = split.ratios.train + split.ratios.val + split.ratios.test;
  if (std::abs(total - 1.0) > 1e-9) throw Error(Errc::InvalidConfig, "split ratios must sum to 1");
}

json to_json(const ModelConfig& c) {
  return {{"hidden", c.encoder.hidden},
          {"state", c.encoder.state},
          {"layers", c.encoder.layers},
          {"dropout", c.encoder.dropout},
          {"output_gain", c.encoder.output_gain},
          {"input_width", c.input_width},
          {"head_hidden", c.head_hidden},
          {"alpha", c.alpha},
          {"label_smoothing", c.label_smoothing},
          {"lambda", c.causal.lambda},
          {"lambda1", c.causal.lambda1},
          {"lambda2", c.causal.lambda2},
          {"use_gcn", c.use_gcn},
          {"use_causal", c.use_causal},
          {"causal_all_graphs", c.causal_all_graphs},
          {"causal_asymmetric", c.causal_asymmetric}};
}

ModelConfig model_config_from_json(const json& j, ModelConfig c) {
  ObjectReader r(j, "model");
  r.get("hidden", c.encoder.hidden);
  r.get("state", c.encoder.state);
  r.get("layers", c.encoder.layers);
  r.get("dropout", c.encoder.dropout);
  r.get("output_gain", c.encoder.output_gain);
  r.get("input_width", c.input_width);
  r.get("head_hidden", c.head_hidden);
  r.get("alpha", c.alpha);
  r.get("label_smoothing", c.label_smoothing);
  r.get("lambda", c.causal.lambda);
  r.get("lambda1", c.causal.lambda1);
  r.get("lambda2", c.causal.lambda2);
  r.get("use_gcn", c.use_gcn);
  r.get("use_causal", c.use_causal);
  r.get("causal_all_graphs", c.causal_all_graphs);
  r.get("causal_asymmetric", c.causal_asymmetric);
  r.finish();
  return c;
}

json to_json(const RunConfig& c) {
  json classes = json::array();
  for (const ClassParams& p : c.synthetic.class_params) classes.push_back(class_params_json(p));
  json model = to_json(c.model);
  model.erase("input_width");  // derived from the feature widths
  return {
      {"synthetic",
       {{"num_events", c.synthetic.num_events},
        {"nodes_min", c.synthetic.nodes_min},
        {"nodes_max", c.synthetic.nodes_max},
        {"seed", c.synthetic.seed},
        {"num_users", c.synthetic.num_users},
        {"text_noise", c.synthetic.text_noise},
        {"shortcut_prob", c.synthetic.shortcut_prob},
        {"class_params", classes}}},
      {"features",
       {{"d_text", c.features.d_text},
        {"d_user", c.features.d_user},
        {"salt", c.features.salt},
        {"embedding_seed", c.features.embedding_seed}}},
      {"model", model},
      {"train",
       {{"lr", c.train.lr},
        {"weight_decay", c.train.weight_decay},
        {"clip_norm", c.train.clip_norm},
        {"batch_size", c.train.batch_size},
        {"patience", c.train.patience},
        {"max_epochs", c.train.max_epochs},
        {"seed", c.train.seed},
        {"beta1", c.train.beta1},
        {"beta2", c.train.beta2},
        {"adam_eps", c.train.adam_eps}}},
      {"split",
       {{"train", c.split.ratios.train},
        {"val", c.split.ratios.val},
        {"test", c.split.ratios.test},
        {"seed", c.split.seed}}},
      {"intervention",
       {{"damping", c.intervention.pagerank.damping},
        {"tol", c.intervention.pagerank.tol},
        {"max_iter", c.intervention.pagerank.max_iter},
        {"weighted", c.intervention.pagerank.weighted},
        {"k", c.intervention.k},
        {"threshold", c.intervention.threshold ? json(*c.intervention.threshold) : json(nullptr)}}},
      {"notears",
       {{"lambda1", c.notears.lambda1},
        {"max_iter", c.notears.max_iter},
        {"threshold", c.notears.threshold},
        {"h_tol", c.notears.h_tol},
        {"rho_max", c.notears.rho_max},
        {"inner_max_iter", c.notears.inner_max_iter},
        {"inner_tol", c.notears.inner_tol}}},
      {"paths", {{"data", c.paths.data}, {"output", c.paths.output}}},
  };
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  ObjectReader root(j, "config");
  if (const json* s = root.section("synthetic")) {
    ObjectReader r(*s, "synthetic");
    r.get("num_events", c.synthetic.num_events);
    r.get("nodes_min", c.synthetic.nodes_min);
    r.get("nodes_max", c.synthetic.nodes_max);
    r.get("seed", c.synthetic.seed);
    r.get("num_users", c.synthetic.num_users);
    r.get("text_noise", c.synthetic.text_noise);
    r.get("shortcut_prob", c.synthetic.shortcut_prob);
    if (const json* cls = r.section("class_params")) {
      if (!cls->is_array() || cls->size() != kNumClasses)
        throw Error(Errc::InvalidConfig, "synthetic.class_params must be an array of 4 objects");
      for (std::size_t k = 0; k < kNumClasses; ++k) {
        ObjectReader p((*cls)[k], "synthetic.class_params[" + std::to_string(k) + "]");
        p.get("branching", c.synthetic.class_params[k].branching);
        p.get("chaining", c.synthetic.class_params[k].chaining);
        p.get("decay_rate", c.synthetic.class_params[k].decay_rate);
        p.get("text_separation", c.synthetic.class_params[k].text_separation);
        p.finish();
      }
    }
    r.finish();
  }
  if (const json* s = root.section("features")) {
    ObjectReader r(*s, "features");
    r.get("d_text", c.features.d_text);
    r.get("d_user", c.features.d_user);
    r.get("salt", c.features.salt);
    r.get("embedding_seed", c.features.embedding_seed);
    r.finish();
  }
  if (const json* s = root.section("model")) {
    if (s->is_object() && s->contains("input_width"))
      throw Error(Errc::InvalidConfig, "unknown key model.input_width (derived from features)");
    c.model = model_config_from_json(*s, c.model);
  }
  if (const json* s = root.section("train")) {
    ObjectReader r(*s, "train");
    r.get("lr", c.train.lr);
    r.get("weight_decay", c.train.weight_decay);
    r.get("clip_norm", c.train.clip_norm);
    r.get("batch_size", c.train.batch_size);
    r.get("patience", c.train.patience);
    r.get("max_epochs", c.train.max_epochs);
    r.get("seed", c.train.seed);
    r.get("beta1", c.train.beta1);
    r.get("beta2", c.train.beta2);
    r.get("adam_eps", c.train.adam_eps);
    r.finish();
  }
  if (const json* s = root.section("split")) {
    ObjectReader r(*s, "split");
    r.get("train", c.split.ratios.train);
    r.get("val", c.split.ratios.val);
    r.get("test", c.split.ratios.test);
    r.get("seed", c.split.seed);
    r.finish();
  }
  if (const json* s = root.section("intervention")) {
    ObjectReader r(*s, "intervention");
    r.get("damping", c.intervention.pagerank.damping);
    r.get("tol", c.intervention.pagerank.tol);
    r.get("max_iter", c.intervention.pagerank.max_iter);
    r.get("weighted", c.intervention.pagerank.weighted);
    r.get("k", c.intervention.k);
    r.get("threshold", c.intervention.threshold);
    r.finish();
  }
  if (const json* s = root.section("notears")) {
    ObjectReader r(*s, "notears");
    r.get("lambda1", c.notears.lambda1);
    r.get("max_iter", c.notears.max_iter);
    r.get("threshold", c.notears.threshold);
    r.get("h_tol", c.notears.h_tol);
    r.get("rho_max", c.notears.rho_max);
    r.get("inner_max_iter", c.notears.inner_max_iter);
    r.get("inner_tol", c.notears.inner_tol);
    r.finish();
  }
  if (const json* s = root.section("paths")) {
    ObjectReader r(*s, "paths");
    r.get("data", c.paths.data);
    r.get("output", c.paths.output);
    r.finish();
  }
  root.finish();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, "config " + path + " is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

}  // namespace causalmamba
