#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "causalmamba/cascade.hpp"

namespace causalmamba {

/// Maps a text (or identifier) to a fixed-width vector. Implementations
/// must be deterministic bit-for-bit and return finite entries.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<double> embed(std::string_view text) const = 0;
};

/// Hashed bag of character trigrams with a Gaussian random projection per
/// trigram, L2-normalised. The empty string maps to the zero vector.
class TrigramEmbedding final : public EmbeddingProvider {
 public:
  explicit TrigramEmbedding(std::size_t dim, std::uint64_t seed = 0x5eed) : dim_(dim), seed_(seed) {}

  std::size_t dim() const override { return dim_; }
  std::vector<double> embed(std::string_view text) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Fixed pseudo-random unit vector for a user, seeded by hash(salt ‖ user).
std::vector<double> user_vector(std::string_view user, std::string_view salt, std::size_t d_user);

inline std::size_t feature_width(std::size_t d_text, std::size_t d_user) { return d_text + 1 + d_user; }

/// Row i = [text embedding | log(1 + Δt_i) | user vector]. Precomputed
/// cascade embeddings take precedence over the provider; a node without
/// text gets a zero text block.
Tensor featurize(const Cascade& cascade, const EmbeddingProvider& provider, std::size_t d_user, std::string_view salt);

void featurize_all(std::vector<Cascade>& cascades, const EmbeddingProvider& provider, std::size_t d_user,
                   std::string_view salt);

}  // namespace causalmamba
