#include "causalmamba/batching.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "causalmamba/error.hpp"
#include "causalmamba/random.hpp"

namespace causalmamba {

DatasetSplit split_dataset(const std::vector<Cascade>& cascades, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.val < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw Error(Errc::InvalidConfig, "split ratios must be nonnegative and sum to 1");
  std::array<std::vector<std::size_t>, kNumClasses> by_class;
  for (std::size_t i = 0; i < cascades.size(); ++i) by_class[static_cast<int>(cascades[i].label)].push_back(i);

  DatasetSplit out;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    auto& idx = by_class[k];
    if (idx.empty())
      throw Error(Errc::EmptyClass, "class '" + std::string(label_name(static_cast<Label>(k))) + "' has no events");
    Rng rng(derive_seed(seed, k));
    rng.shuffle(idx.begin(), idx.end());
    const auto n = static_cast<double>(idx.size());
    // The small epsilon keeps exact products such as 0.7 * 10 from flooring to 6.
    const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * n + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.val * n + 1e-9));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const Cascade& c = cascades[idx[j]];
      if (j < n_train)
        out.train.push_back(c);
      else if (j < n_train + n_val)
        out.val.push_back(c);
      else
        out.test.push_back(c);
    }
  }
  return out;
}

Batch make_batch(const std::vector<const Cascade*>& cascades) {
  if (cascades.empty()) throw Error(Errc::InvalidConfig, "empty batch");
  const std::size_t width = cascades.front()->features.empty() ? 0 : cascades.front()->features.dim(1);
  std::size_t len = 0;
  for (const Cascade* c : cascades) {
    if (c->features.empty() || c->features.dim(1) != width || c->features.dim(0) != c->size())
      throw Error(Errc::MixedFeatureWidth, "cascade " + c->event_id + " features do not match the batch width");
    len = std::max(len, c->size());
  }
  Batch batch;
  batch.x = Tensor({cascades.size(), len, width});
  batch.mask = Tensor({cascades.size(), len});
  for (std::size_t b = 0; b < cascades.size(); ++b) {
    const Cascade& c = *cascades[b];
    std::copy(c.features.data(), c.features.data() + c.features.size(), &batch.x(b, 0, 0));
    for (std::size_t i = 0; i < c.size(); ++i) batch.mask(b, i) = 1.0;
    batch.edges_per_graph.push_back(c.edges);
    batch.y.push_back(static_cast<int>(c.label));
    batch.n_per_graph.push_back(c.size());
    batch.event_ids.push_back(c.event_id);
  }
  return batch;
}

std::vector<Batch> make_batches(const std::vector<Cascade>& cascades, std::size_t batch_size) {
  if (batch_size == 0) throw Error(Errc::InvalidConfig, "batch_size must be positive");
  std::vector<Batch> out;
  for (std::size_t start = 0; start < cascades.size(); start += batch_size) {
    std::vector<const Cascade*> group;
    for (std::size_t i = start; i < std::min(cascades.size(), start + batch_size); ++i) group.push_back(&cascades[i]);
    out.push_back(make_batch(group));
  }
  return out;
}

}  // namespace causalmamba
