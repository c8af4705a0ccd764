#pragma once

#include <string>

#include <json.hpp>

#include "causalmamba/trainer.hpp"

namespace causalmamba {

/// Checkpoint format: one JSON object.
///   format "causalmamba-checkpoint", version 1
///   model            ModelConfig fields
///   epoch, best_metric, best_epoch, epochs_since_best, finalized, adam_step
///   rng              text state of the dropout stream
///   params, best_params, adam_m, adam_v
///                    { name: {"shape": [...], "data": [...]} } in binding order
///   metadata         free-form object supplied by the caller
/// Doubles are written with round-trip precision, so a reload is bit-exact.
inline constexpr int kCheckpointVersion = 1;

nlohmann::json checkpoint_to_json(const ModelState& state, const nlohmann::json& metadata = nlohmann::json::object());
ModelState checkpoint_from_json(const nlohmann::json& j, nlohmann::json* metadata = nullptr);

void save_checkpoint(const std::string& path, const ModelState& state,
                     const nlohmann::json& metadata = nlohmann::json::object());
/// BadCheckpoint on a malformed file, FileNotFound when missing.
ModelState load_checkpoint(const std::string& path, nlohmann::json* metadata = nullptr);

}  // namespace causalmamba
