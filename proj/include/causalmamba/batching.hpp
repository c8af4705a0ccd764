#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalmamba/cascade.hpp"

namespace causalmamba {

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct DatasetSplit {
  std::vector<Cascade> train;
  std::vector<Cascade> val;
  std::vector<Cascade> test;
};

/// Stratified split: per class, train = floor(train·n_c), val = floor(val·n_c),
/// test = remainder, with a seeded shuffle inside each class. Output keeps
/// class-major order. Throws EmptyClass (a class with no events) and InvalidConfig.
DatasetSplit split_dataset(const std::vector<Cascade>& cascades, SplitRatios ratios, std::uint64_t seed);

/// Padded mini-batch. mask(b, i) = 1 iff i < n_per_graph[b]; padded rows of X are zero.
struct Batch {
  Tensor x;     // B x L x F
  Tensor mask;  // B x L
  std::vector<std::vector<Edge>> edges_per_graph;
  std::vector<int> y;
  std::vector<std::size_t> n_per_graph;
  std::vector<std::string> event_ids;

  std::size_t size() const { return y.size(); }
  std::size_t length() const { return x.empty() ? 0 : x.dim(1); }
};

/// Batch of the given cascades in order. Throws MixedFeatureWidth.
Batch make_batch(const std::vector<const Cascade*>& cascades);
/// Consecutive batches of at most batch_size; the last may be partial.
std::vector<Batch> make_batches(const std::vector<Cascade>& cascades, std::size_t batch_size);

}  // namespace causalmamba
