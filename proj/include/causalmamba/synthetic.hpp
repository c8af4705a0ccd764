#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "causalmamba/cascade.hpp"

namespace causalmamba {

/// Growth dynamics for one class. A new node attaches to the source with
/// probability `branching`, to the latest node with probability `chaining`,
/// and otherwise to a uniformly chosen earlier node. Inter-arrival times are
/// exponential with rate `decay_rate`; text embeddings sit at distance
/// `text_separation` from the origin along a class-specific direction.
struct ClassParams {
  double branching = 0.5;
  double chaining = 0.25;
  double decay_rate = 1.0;
  double text_separation = 1.0;
};

struct SyntheticConfig {
  std::size_t num_events = 400;
  std::size_t nodes_min = 8;
  std::size_t nodes_max = 32;
  std::size_t d_text = 64;
  std::size_t d_user = 16;
  std::uint64_t seed = 2024;
  std::size_t num_users = 1000;
  /// Norm of the isotropic text noise added to each node embedding.
  double text_noise = 1.0;
  /// Probability that a non-root node also receives an edge from its grandparent in the planted DAG.
  double shortcut_prob = 0.15;
  std::array<ClassParams, kNumClasses> class_params = default_class_params();

  /// Throws InvalidConfig.
  void validate() const;

  static std::array<ClassParams, kNumClasses> default_class_params();
  /// Classes that differ only in tree shape: identical timing and text statistics.
  static std::array<ClassParams, kNumClasses> structure_only_class_params();
};

struct SyntheticDataset {
  std::vector<Cascade> cascades;
  /// Ground-truth DAG per cascade: the tree edges plus grandparent shortcuts.
  std::vector<std::vector<Edge>> planted;
};

/// Deterministic in the seed; cascade e is drawn from its own stream, with
/// label e mod 4. Throws InvalidConfig.
SyntheticDataset generate_synthetic(const SyntheticConfig& config);

}  // namespace causalmamba
