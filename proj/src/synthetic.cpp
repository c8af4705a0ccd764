#include "causalmamba/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "causalmamba/error.hpp"
#include "causalmamba/random.hpp"

namespace causalmamba {

std::array<ClassParams, kNumClasses> SyntheticConfig::default_class_params() {
  return {{
      {0.80, 0.10, 2.0, 1.5},   // true: broad, fast
      {0.15, 0.70, 0.5, 1.5},   // false: deep chains
      {0.45, 0.30, 0.1, 1.5},   // unverified: slow
      {0.30, 0.20, 0.02, 1.5},  // non-rumor: very slow, mixed
  }};
}

std::array<ClassParams, kNumClasses> SyntheticConfig::structure_only_class_params() {
  return {{
      {1.00, 0.00, 1.0, 0.0},
      {0.00, 1.00, 1.0, 0.0},
      {0.50, 0.50, 1.0, 0.0},
      {0.00, 0.00, 1.0, 0.0},
  }};
}

void SyntheticConfig::validate() const {
  const SyntheticConfig& c = *this;
  if (c.num_events == 0) throw Error(Errc::InvalidConfig, "num_events must be positive");
  if (c.nodes_min < 2) throw Error(Errc::InvalidConfig, "nodes_min must be at least 2");
  if (c.nodes_max < c.nodes_min) throw Error(Errc::InvalidConfig, "nodes_max < nodes_min");
  if (c.d_text == 0 || c.d_user == 0) throw Error(Errc::InvalidConfig, "embedding widths must be positive");
  if (c.num_users == 0) throw Error(Errc::InvalidConfig, "num_users must be positive");
  if (c.text_noise < 0.0 || c.shortcut_prob < 0.0 || c.shortcut_prob > 1.0)
    throw Error(Errc::InvalidConfig, "noise/shortcut parameters out of range");
  for (const ClassParams& p : c.class_params) {
    if (p.branching < 0.0 || p.chaining < 0.0 || p.branching + p.chaining > 1.0 + 1e-12)
      throw Error(Errc::InvalidConfig, "branching + chaining must lie in [0, 1]");
    if (!(p.decay_rate > 0.0)) throw Error(Errc::InvalidConfig, "decay_rate must be positive");
    if (p.text_separation < 0.0) throw Error(Errc::InvalidConfig, "text_separation must be nonnegative");
  }
}

SyntheticDataset generate_synthetic(const SyntheticConfig& config) {
  config.validate();
  const std::size_t d = config.d_text;

  // Class directions come from a dedicated stream so they do not depend on num_events.
  std::array<std::vector<double>, kNumClasses> directions;
  Rng dir_rng(derive_seed(config.seed, 0xC1A55));
  for (auto& dir : directions) {
    dir.resize(d);
    double s = 0.0;
    for (double& x : dir) {
      x = dir_rng.normal();
      s += x * x;
    }
    for (double& x : dir) x /= std::sqrt(s);
  }

  SyntheticDataset out;
  out.cascades.reserve(config.num_events);
  out.planted.reserve(config.num_events);
  const double noise_scale = config.text_noise / std::sqrt(static_cast<double>(d));
  for (std::size_t e = 0; e < config.num_events; ++e) {
    Rng rng(derive_seed(config.seed, e + 1));
    const auto label = static_cast<Label>(e % kNumClasses);
    const ClassParams& p = config.class_params[e % kNumClasses];
    const std::size_t n = config.nodes_min + rng.below(config.nodes_max - config.nodes_min + 1);

    Cascade c;
    c.event_id = "syn" + std::to_string(e);
    c.label = label;
    c.text_embeddings = Tensor({n, d});
    std::vector<std::size_t> parent(n, 0);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) {
        t += rng.exponential(p.decay_rate);
        const double r = rng.uniform();
        if (r < p.branching)
          parent[i] = 0;
        else if (r < p.branching + p.chaining)
          parent[i] = i - 1;
        else
          parent[i] = rng.below(i);
        c.edges.push_back(Edge{parent[i], i});
      }
      c.node_ids.push_back("n" + std::to_string(i));
      c.users.push_back("u" + std::to_string(rng.below(config.num_users)));
      c.texts.emplace_back(std::nullopt);
      c.timestamps.push_back(t);
      for (std::size_t j = 0; j < d; ++j)
        c.text_embeddings(i, j) = p.text_separation * directions[e % kNumClasses][j] + noise_scale * rng.normal();
    }

    std::set<Edge> planted(c.edges.begin(), c.edges.end());
    for (std::size_t i = 2; i < n; ++i)
      if (parent[i] != 0 && rng.bernoulli(config.shortcut_prob)) planted.insert(Edge{parent[parent[i]], i});
    std::sort(c.edges.begin(), c.edges.end());
    out.planted.emplace_back(planted.begin(), planted.end());
    out.cascades.push_back(std::move(c));
  }
  return out;
}

}  // namespace causalmamba
