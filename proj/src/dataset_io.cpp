#include "causalmamba/dataset_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "causalmamba/logging.hpp"

namespace causalmamba {

using nlohmann::json;

namespace {

template <class T>
T field(const json& obj, const char* key, const char* what) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::SchemaViolation, std::string("missing field '") + key + "' in " + what);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::SchemaViolation, std::string("field '") + key + "' has the wrong type in " + what);
  }
}

std::optional<std::string> nullable_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(Errc::SchemaViolation, std::string("field '") + key + "' must be a string or null");
  return it->get<std::string>();
}

}  // namespace

Cascade parse_cascade_json(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw Error(Errc::SchemaViolation, "record is not an object");
  auto event_id = field<std::string>(obj, "event_id", "record");
  const Label label = parse_label(field<std::string>(obj, "label", "record"));
  auto nodes_it = obj.find("nodes");
  if (nodes_it == obj.end() || !nodes_it->is_array()) throw Error(Errc::SchemaViolation, "'nodes' must be an array");
  std::vector<RawNode> raw;
  for (const json& n : *nodes_it) {
    if (!n.is_object()) throw Error(Errc::SchemaViolation, "node is not an object");
    RawNode r;
    r.id = field<std::string>(n, "id", "node");
    r.user = field<std::string>(n, "user", "node");
    r.t = field<double>(n, "t", "node");
    r.parent = nullable_string(n, "parent");
    r.text = nullable_string(n, "text");
    if (auto it = n.find("embedding"); it != n.end() && !it->is_null()) {
      try {
        r.embedding = it->get<std::vector<double>>();
      } catch (const json::exception&) {
        throw Error(Errc::SchemaViolation, "'embedding' must be an array of numbers");
      }
    }
    raw.push_back(std::move(r));
  }
  return build_cascade(std::move(event_id), std::move(raw), label);
}

std::string cascade_to_json(const Cascade& c) {
  std::vector<std::optional<std::size_t>> parent(c.size());
  for (const Edge& e : c.edges)
    if (!parent[e.child]) parent[e.child] = e.parent;
  json nodes = json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    json n = {{"id", c.node_ids[i]}, {"user", c.users[i]}, {"t", c.timestamps[i]}};
    n["parent"] = parent[i] ? json(c.node_ids[*parent[i]]) : json(nullptr);
    n["text"] = c.texts[i] ? json(*c.texts[i]) : json(nullptr);
    if (!c.text_embeddings.empty()) {
      const std::size_t d = c.text_embeddings.dim(1);
      n["embedding"] = std::vector<double>(c.text_embeddings.data() + i * d, c.text_embeddings.data() + (i + 1) * d);
    }
    nodes.push_back(std::move(n));
  }
  json obj = {{"event_id", c.event_id}, {"label", std::string(label_name(c.label))}, {"nodes", std::move(nodes)}};
  return obj.dump();
}

LoadResult load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::FileNotFound, path.string());
  LoadResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.cascades.push_back(parse_cascade_json(line));
    } catch (const Error& e) {
      result.issues.push_back(LoadIssue{lineno, path.string(), e.code(), e.what()});
    }
  }
  if (result.cascades.empty() && result.issues.empty()) warn("no cascades in " + path.string());
  for (const LoadIssue& issue : result.issues)
    warn(path.string() + ":" + std::to_string(issue.line) + ": " + issue.message);
  return result;
}

std::vector<Cascade> load_jsonl_strict(const std::filesystem::path& path) {
  LoadResult r = load_jsonl(path);
  if (!r.issues.empty()) {
    const LoadIssue& first = r.issues.front();
    throw Error(first.code, "line " + std::to_string(first.line) + ": " + first.message);
  }
  return std::move(r.cascades);
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Cascade>& cascades) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  for (const Cascade& c : cascades) out << cascade_to_json(c) << '\n';
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

namespace {

struct Triple {
  std::string user, tweet, delay;
  bool is_root_marker() const { return user == "ROOT"; }
  std::string key() const { return tweet + ":" + user + ":" + delay; }
};

std::string trim_token(std::string s) {
  const auto strip = [](char ch) { return ch == ' ' || ch == '\'' || ch == '"' || ch == '\t' || ch == '\r'; };
  while (!s.empty() && strip(s.front())) s.erase(s.begin());
  while (!s.empty() && strip(s.back())) s.pop_back();
  return s;
}

bool parse_triple(std::string text, Triple& out) {
  text = trim_token(std::move(text));
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') return false;
  text = text.substr(1, text.size() - 2);
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) parts.push_back(trim_token(part));
  if (parts.size() != 3 || parts[0].empty() || parts[1].empty() || parts[2].empty()) return false;
  out = Triple{parts[0], parts[1], parts[2]};
  return true;
}

}  // namespace

TreeParseResult parse_twitter15_tree(const std::filesystem::path& tree_dir, const std::filesystem::path& label_file) {
  if (!std::filesystem::is_directory(tree_dir)) throw Error(Errc::FileNotFound, tree_dir.string());
  std::ifstream labels_in(label_file);
  if (!labels_in) throw Error(Errc::FileNotFound, label_file.string());

  std::unordered_map<std::string, Label> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(labels_in, line)) {
    ++lineno;
    line = trim_token(line);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos)
      throw Error(Errc::MalformedLine, label_file.string() + ":" + std::to_string(lineno));
    labels[line.substr(colon + 1)] = parse_label(line.substr(0, colon));
  }

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(tree_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  TreeParseResult result;
  for (const auto& file : files) {
    const std::string event_id = file.stem().string();
    auto label_it = labels.find(event_id);
    if (label_it == labels.end()) {
      ++result.unlabeled;
      warn("event " + event_id + " has no label; skipped");
      continue;
    }
    std::ifstream in(file);
    if (!in) throw Error(Errc::IoError, "cannot read " + file.string());
    std::vector<RawNode> raw;
    std::unordered_map<std::string, std::size_t> seen;
    std::vector<Triple> parents;
    lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim_token(line).empty()) continue;
      const auto arrow = line.find("->");
      Triple parent, child;
      if (arrow == std::string::npos || !parse_triple(line.substr(0, arrow), parent) ||
          !parse_triple(line.substr(arrow + 2), child))
        throw Error(Errc::MalformedLine, file.string() + ":" + std::to_string(lineno));
      if (!parent.is_root_marker()) parents.push_back(parent);
      const std::string child_key = child.key();
      if (seen.contains(child_key)) continue;
      RawNode node;
      node.id = child_key;
      node.user = child.user;
      try {
        node.t = std::stod(child.delay);
      } catch (const std::exception&) {
        throw Error(Errc::MalformedLine, file.string() + ":" + std::to_string(lineno) + ": bad delay");
      }
      if (!parent.is_root_marker()) node.parent = parent.key();
      seen.emplace(child_key, raw.size());
      raw.push_back(std::move(node));
    }
    for (const Triple& p : parents) {
      if (seen.contains(p.key())) continue;
      RawNode node;
      node.id = p.key();
      node.user = p.user;
      try {
        node.t = std::stod(p.delay);
      } catch (const std::exception&) {
        throw Error(Errc::MalformedLine, file.string() + ": bad delay '" + p.delay + "'");
      }
      seen.emplace(node.id, raw.size());
      raw.push_back(std::move(node));
    }
    try {
      result.cascades.push_back(build_cascade(event_id, std::move(raw), label_it->second));
    } catch (const Error& e) {
      ++result.rejected;
      result.issues.push_back(LoadIssue{0, file.string(), e.code(), e.what()});
    }
  }
  if (result.unlabeled > 0) warn(std::to_string(result.unlabeled) + " unlabeled event(s) skipped");
  return result;
}

}  // namespace causalmamba
