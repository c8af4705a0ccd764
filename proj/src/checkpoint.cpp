#include "causalmamba/checkpoint.hpp"

#include <fstream>

#include "causalmamba/config.hpp"
#include "causalmamba/error.hpp"

namespace causalmamba {

using nlohmann::json;

namespace {

json tensor_json(const Tensor& t) { return {{"shape", t.shape()}, {"data", t.storage()}}; }

Tensor tensor_from(const json& j, const Shape& expected, const std::string& name) {
  if (!j.is_object() || !j.contains("shape") || !j.contains("data"))
    throw Error(Errc::BadCheckpoint, "tensor " + name + " lacks shape or data");
  const auto shape = j.at("shape").get<Shape>();
  if (shape != expected) throw Error(Errc::BadCheckpoint, "tensor " + name + " has an unexpected shape");
  auto data = j.at("data").get<std::vector<double>>();
  Tensor t(shape);
  if (data.size() != t.size()) throw Error(Errc::BadCheckpoint, "tensor " + name + " has the wrong element count");
  return Tensor(shape, std::move(data));
}

json params_json(const ModelParams& p) {
  json out = json::object();
  for (const auto& [name, t] : named_parameters(p)) out[name] = tensor_json(*t);
  return out;
}

void params_from(const json& j, ModelParams& p, const std::string& what) {
  if (!j.is_object()) throw Error(Errc::BadCheckpoint, what + " must be an object");
  auto slots = named_parameters(p);
  if (j.size() != slots.size()) throw Error(Errc::BadCheckpoint, what + " has the wrong number of tensors");
  for (auto& [name, t] : slots) {
    if (!j.contains(name)) throw Error(Errc::BadCheckpoint, what + " is missing " + name);
    *t = tensor_from(j.at(name), t->shape(), name);
  }
}

json moments_json(const ModelParams& skeleton, const std::vector<Tensor>& m) {
  json out = json::object();
  const auto names = named_parameters(skeleton);
  for (std::size_t i = 0; i < m.size(); ++i) out[names[i].first] = tensor_json(m[i]);
  return out;
}

std::vector<Tensor> moments_from(const json& j, const ModelParams& skeleton, const std::string& what) {
  std::vector<Tensor> out;
  if (!j.is_object()) throw Error(Errc::BadCheckpoint, what + " must be an object");
  if (j.empty()) return out;
  const auto names = named_parameters(skeleton);
  if (j.size() != names.size()) throw Error(Errc::BadCheckpoint, what + " has the wrong number of tensors");
  for (const auto& [name, t] : names) {
    if (!j.contains(name)) throw Error(Errc::BadCheckpoint, what + " is missing " + name);
    out.push_back(tensor_from(j.at(name), t->shape(), name));
  }
  return out;
}

}  // namespace

json checkpoint_to_json(const ModelState& s, const json& metadata) {
  return {{"format", "causalmamba-checkpoint"},
          {"version", kCheckpointVersion},
          {"model", to_json(s.model)},
          {"epoch", s.epoch},
          {"best_metric", s.best_metric},
          {"best_epoch", s.best_epoch},
          {"epochs_since_best", s.epochs_since_best},
          {"finalized", s.finalized},
          {"adam_step", s.adam.step},
          {"rng", s.rng.save_state()},
          {"params", params_json(s.params)},
          {"best_params", params_json(s.best_params)},
          {"adam_m", moments_json(s.params, s.adam.m)},
          {"adam_v", moments_json(s.params, s.adam.v)},
          {"metadata", metadata}};
}

ModelState checkpoint_from_json(const json& j, json* metadata) {
  try {
    if (!j.is_object() || j.value("format", "") != "causalmamba-checkpoint")
      throw Error(Errc::BadCheckpoint, "not a checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion)
      throw Error(Errc::BadCheckpoint, "unsupported checkpoint version");
    ModelState s;
    try {
      s.model = model_config_from_json(j.at("model"));
      s.model.validate();
    } catch (const Error& e) {
      throw Error(Errc::BadCheckpoint, std::string("model section: ") + e.what());
    }
    s.params = init_model_params(s.model, 0);
    s.best_params = s.params;
    params_from(j.at("params"), s.params, "params");
    params_from(j.at("best_params"), s.best_params, "best_params");
    s.adam.m = moments_from(j.at("adam_m"), s.params, "adam_m");
    s.adam.v = moments_from(j.at("adam_v"), s.params, "adam_v");
    if (s.adam.m.size() != s.adam.v.size()) throw Error(Errc::BadCheckpoint, "adam moments are incomplete");
    s.adam.step = j.at("adam_step").get<std::size_t>();
    s.epoch = j.at("epoch").get<std::size_t>();
    s.best_metric = j.at("best_metric").get<double>();
    s.best_epoch = j.at("best_epoch").get<std::size_t>();
    s.epochs_since_best = j.at("epochs_since_best").get<std::size_t>();
    s.finalized = j.at("finalized").get<bool>();
    s.rng.load_state(j.at("rng").get<std::string>());
    if (metadata) *metadata = j.value("metadata", json::object());
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::BadCheckpoint, e.what());
  }
}

void save_checkpoint(const std::string& path, const ModelState& state, const json& metadata) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write checkpoint " + path);
  out << checkpoint_to_json(state, metadata).dump() << '\n';
  if (!out) throw Error(Errc::IoError, "failed writing checkpoint " + path);
}

ModelState load_checkpoint(const std::string& path, json* metadata) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, "cannot open checkpoint " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::BadCheckpoint, "checkpoint " + path + " is not valid JSON: " + e.what());
  }
  return checkpoint_from_json(j, metadata);
}

}  // namespace causalmamba
