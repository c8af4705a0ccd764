#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "causalmamba/batching.hpp"
#include "causalmamba/intervention.hpp"
#include "causalmamba/model.hpp"
#include "causalmamba/notears.hpp"
#include "causalmamba/synthetic.hpp"
#include "causalmamba/trainer.hpp"

namespace causalmamba {

struct FeatureConfig {
  std::size_t d_text = 64;
  std::size_t d_user = 16;
  std::string salt = "causalmamba";
  std::uint64_t embedding_seed = 0x5eed;
};

struct SplitConfig {
  SplitRatios ratios;
  std::uint64_t seed = 7;
};

struct InterventionConfig {
  PageRankConfig pagerank;
  std::size_t k = 3;
  std::optional<double> threshold;  // unset: 0.1 · max off-diagonal |W|
};

struct PathsConfig {
  std::string data;
  std::string output = "run";
};

/// Everything a command needs. JSON sections mirror the member names;
/// missing keys keep their defaults and unknown keys are rejected.
struct RunConfig {
  SyntheticConfig synthetic;
  FeatureConfig features;
  ModelConfig model;
  TrainConfig train;
  SplitConfig split;
  InterventionConfig intervention;
  NotearsOptions notears;
  PathsConfig paths;

  /// Copies the feature widths into the generator and model, then validates every section.
  void resolve();
};

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ModelConfig& config);
/// Applies `j` on top of `base`. Throws InvalidConfig on unknown keys or wrong types.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

RunConfig load_run_config(const std::string& path);

}  // namespace causalmamba
