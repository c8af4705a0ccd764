#include "causalmamba/features.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "causalmamba/error.hpp"
#include "causalmamba/random.hpp"

namespace causalmamba {

namespace {
void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (s == 0.0) return;
  const double inv = 1.0 / std::sqrt(s);
  for (double& x : v) x *= inv;
}
}  // namespace

std::vector<double> TrigramEmbedding::embed(std::string_view text) const {
  std::vector<double> out(dim_, 0.0);
  if (text.empty()) return out;
  std::string padded = "  ";
  for (char ch : text) padded += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  padded += ' ';
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    Rng rng(mix64(fnv1a64(std::string_view(padded).substr(i, 3)) ^ seed_));
    for (double& x : out) x += rng.normal();
  }
  normalize(out);
  return out;
}

std::vector<double> user_vector(std::string_view user, std::string_view salt, std::size_t d_user) {
  std::string key(salt);
  key += '\x1f';
  key += user;
  Rng rng(fnv1a64(key));
  std::vector<double> v(d_user);
  for (double& x : v) x = rng.normal();
  normalize(v);
  return v;
}

Tensor featurize(const Cascade& c, const EmbeddingProvider& provider, std::size_t d_user, std::string_view salt) {
  const std::size_t n = c.size();
  const std::size_t d_text = provider.dim();
  if (!c.text_embeddings.empty() && c.text_embeddings.dim(1) != d_text)
    throw Error(Errc::MixedFeatureWidth, c.event_id + ": stored embeddings have width " +
                                             std::to_string(c.text_embeddings.dim(1)) + ", provider " +
                                             std::to_string(d_text));
  const std::size_t width = feature_width(d_text, d_user);
  Tensor x({n, width});
  for (std::size_t i = 0; i < n; ++i) {
    if (!c.text_embeddings.empty()) {
      for (std::size_t j = 0; j < d_text; ++j) x(i, j) = c.text_embeddings(i, j);
    } else if (c.texts[i]) {
      const auto e = provider.embed(*c.texts[i]);
      for (std::size_t j = 0; j < d_text; ++j) x(i, j) = e[j];
    }
    x(i, d_text) = std::log1p(c.timestamps[i] - c.timestamps[0]);
    const auto u = user_vector(c.users[i], salt, d_user);
    for (std::size_t j = 0; j < d_user; ++j) x(i, d_text + 1 + j) = u[j];
  }
  return x;
}

void featurize_all(std::vector<Cascade>& cascades, const EmbeddingProvider& provider, std::size_t d_user,
                   std::string_view salt) {
  for (Cascade& c : cascades) c.features = featurize(c, provider, d_user, salt);
}

}  // namespace causalmamba
