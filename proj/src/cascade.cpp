#include "causalmamba/cascade.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "causalmamba/error.hpp"

namespace causalmamba {

std::string_view label_name(Label label) {
  switch (label) {
    case Label::True: return "true";
    case Label::False: return "false";
    case Label::Unverified: return "unverified";
    case Label::NonRumor: return "nonrumor";
  }
  return "?";
}

Label parse_label(std::string_view text) {
  if (text == "true") return Label::True;
  if (text == "false") return Label::False;
  if (text == "unverified") return Label::Unverified;
  if (text == "nonrumor" || text == "non-rumor") return Label::NonRumor;
  throw Error(Errc::UnknownLabelString, "'" + std::string(text) + "'");
}

Cascade build_cascade(std::string event_id, std::vector<RawNode> raw, Label label) {
  if (raw.size() < 2)
    throw Error(Errc::TooSmall, "event " + event_id + " has " + std::to_string(raw.size()) + " node(s)");

  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!by_id.emplace(raw[i].id, i).second) throw Error(Errc::DuplicateNode, event_id + ": node " + raw[i].id);
    if (raw[i].t < 0.0) throw Error(Errc::NegativeTimestamp, event_id + ": node " + raw[i].id);
    // A node naming itself as parent is a redundant self-loop.
    if (raw[i].parent && *raw[i].parent == raw[i].id) raw[i].parent.reset();
  }

  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].parent) {
      if (!by_id.contains(*raw[i].parent))
        throw Error(Errc::DanglingParent, event_id + ": parent " + *raw[i].parent + " of " + raw[i].id);
      continue;
    }
    if (root) throw Error(Errc::MultipleRoots, event_id + ": " + raw[*root].id + " and " + raw[i].id);
    root = i;
  }
  if (!root) throw Error(Errc::NoRoot, event_id);

  const double t0 = raw[*root].t;
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if ((a == *root) != (b == *root)) return a == *root;
    if (raw[a].t != raw[b].t) return raw[a].t < raw[b].t;
    return raw[a].id < raw[b].id;
  });

  std::vector<std::size_t> new_index(raw.size());
  for (std::size_t k = 0; k < order.size(); ++k) new_index[order[k]] = k;

  const bool has_embeddings = !raw[0].embedding.empty();
  const std::size_t d_text = raw[0].embedding.size();

  Cascade c;
  c.event_id = std::move(event_id);
  c.label = label;
  std::set<Edge> edges;
  if (has_embeddings) c.text_embeddings = Tensor({raw.size(), d_text});
  for (std::size_t k = 0; k < order.size(); ++k) {
    RawNode& node = raw[order[k]];
    if (node.t < t0) throw Error(Errc::NegativeTimestamp, c.event_id + ": node " + node.id + " precedes the source");
    if (node.embedding.size() != d_text)
      throw Error(Errc::ShapeMismatch, c.event_id + ": inconsistent embedding width at node " + node.id);
    if (has_embeddings) std::copy(node.embedding.begin(), node.embedding.end(), &c.text_embeddings(k, 0));
    if (node.parent) edges.insert(Edge{new_index[by_id.at(*node.parent)], k});
    c.node_ids.push_back(std::move(node.id));
    c.users.push_back(std::move(node.user));
    c.texts.push_back(std::move(node.text));
    c.timestamps.push_back(node.t - t0);
  }
  c.edges.assign(edges.begin(), edges.end());
  return c;
}

void validate_cascade(const Cascade& c) {
  const std::size_t n = c.size();
  if (n < 2) throw Error(Errc::TooSmall, c.event_id);
  if (c.users.size() != n || c.texts.size() != n || c.timestamps.size() != n)
    throw Error(Errc::ShapeMismatch, c.event_id + ": per-node fields disagree in length");
  if (c.timestamps[0] != 0.0) throw Error(Errc::NegativeTimestamp, c.event_id + ": source timestamp must be 0");
  for (std::size_t i = 1; i < n; ++i)
    if (c.timestamps[i] < c.timestamps[i - 1])
      throw Error(Errc::NegativeTimestamp, c.event_id + ": timestamps must be nondecreasing");
  for (const Edge& e : c.edges) {
    if (e.parent >= n || e.child >= n) throw Error(Errc::IndexOutOfRange, c.event_id + ": edge endpoint");
    if (e.parent == e.child) throw Error(Errc::IndexOutOfRange, c.event_id + ": self-loop");
  }
  if (!c.text_embeddings.empty() && c.text_embeddings.dim(0) != n)
    throw Error(Errc::ShapeMismatch, c.event_id + ": embedding rows");
  if (!c.features.empty() && c.features.dim(0) != n) throw Error(Errc::ShapeMismatch, c.event_id + ": feature rows");
}

}  // namespace causalmamba
