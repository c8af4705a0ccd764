#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causalmamba/tensor.hpp"

namespace causalmamba {

enum class Label : int { True = 0, False = 1, Unverified = 2, NonRumor = 3 };
inline constexpr std::size_t kNumClasses = 4;

std::string_view label_name(Label label);
/// Accepts "true", "false", "unverified", "nonrumor" (and "non-rumor").
/// Throws UnknownLabelString.
Label parse_label(std::string_view text);

/// Directed reply edge, parent index -> child index.
struct Edge {
  std::size_t parent = 0;
  std::size_t child = 0;
  auto operator<=>(const Edge&) const = default;
};

/// One propagation event. Node 0 is the source; nodes are ordered by
/// propagation time with timestamps as offsets from the source.
struct Cascade {
  std::string event_id;
  Label label = Label::True;
  std::vector<std::string> node_ids;
  std::vector<std::string> users;
  std::vector<std::optional<std::string>> texts;
  std::vector<double> timestamps;
  std::vector<Edge> edges;
  /// Precomputed text embeddings (n x d_text); empty when texts are embedded
  /// by an EmbeddingProvider at featurize time.
  Tensor text_embeddings;
  /// n x F once featurized.
  Tensor features;

  std::size_t size() const { return node_ids.size(); }
  bool operator==(const Cascade&) const = default;
};

struct RawNode {
  std::string id;
  double t = 0.0;
  std::optional<std::string> parent;
  std::string user;
  std::optional<std::string> text;
  std::vector<double> embedding;
};

/// Canonicalises a raw event: source first, remaining nodes sorted by
/// (timestamp, node id), timestamps re-based on the source, self-loops
/// dropped. Throws TooSmall, NoRoot, MultipleRoots, DanglingParent,
/// NegativeTimestamp, DuplicateNode.
Cascade build_cascade(std::string event_id, std::vector<RawNode> raw_nodes, Label label);

/// Checks the structural invariants of a built cascade; throws on violation.
void validate_cascade(const Cascade& cascade);

}  // namespace causalmamba
