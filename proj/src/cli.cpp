#include "causalmamba/cli.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalmamba/batching.hpp"
#include "causalmamba/checkpoint.hpp"
#include "causalmamba/config.hpp"
#include "causalmamba/dataset_io.hpp"
#include "causalmamba/features.hpp"
#include "causalmamba/intervention.hpp"
#include "causalmamba/logging.hpp"
#include "causalmamba/notears.hpp"
#include "causalmamba/synthetic.hpp"
#include "causalmamba/trainer.hpp"

namespace causalmamba {

using json = nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::TooSmall:
    case Errc::NoRoot:
    case Errc::MultipleRoots:
    case Errc::DanglingParent:
    case Errc::NegativeTimestamp:
    case Errc::DuplicateNode:
    case Errc::FileNotFound:
    case Errc::SchemaViolation:
    case Errc::MalformedLine:
    case Errc::UnknownLabelString:
    case Errc::InvalidConfig:
    case Errc::EmptyClass:
    case Errc::MixedFeatureWidth:
    case Errc::KTooLarge:
    case Errc::UnknownEvent:
    case Errc::BadCheckpoint:
      return kExitUsage;
    default:
      return kExitInternal;
  }
}

std::string git_blob_hash(const std::string& bytes) {
  const std::string header = "blob " + std::to_string(bytes.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 && EVP_DigestFinal_ex(ctx, digest, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(Errc::IoError, "SHA-1 digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || fs::is_directory(path)) throw Error(Errc::FileNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::IoError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(Errc::IoError, "write failed: " + path.string());
}

}  // namespace

std::string file_content_hash(const fs::path& path) { return git_blob_hash(read_file(path)); }

DatasetSummary summarize_dataset(const std::vector<Cascade>& cascades) {
  DatasetSummary s;
  s.events = cascades.size();
  double nodes = 0.0, edges = 0.0;
  for (const Cascade& c : cascades) {
    nodes += static_cast<double>(c.size());
    edges += static_cast<double>(c.edges.size());
    ++s.class_counts[static_cast<int>(c.label)];
  }
  if (s.events > 0) {
    s.avg_nodes = nodes / static_cast<double>(s.events);
    s.avg_edges = edges / static_cast<double>(s.events);
  }
  return s;
}

std::string format_summary(const DatasetSummary& s) {
  char line[96];
  std::string out;
  std::snprintf(line, sizeof line, "%-22s %12s\n", "Statistic", "Value");
  out += line;
  std::snprintf(line, sizeof line, "%-22s %12zu\n", "Events", s.events);
  out += line;
  std::snprintf(line, sizeof line, "%-22s %12.2f\n", "Avg. Nodes / Event", s.avg_nodes);
  out += line;
  std::snprintf(line, sizeof line, "%-22s %12.2f\n", "Avg. Edges / Event", s.avg_edges);
  out += line;
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const std::string name = "Class " + std::string(label_name(static_cast<Label>(k)));
    std::snprintf(line, sizeof line, "%-22s %12zu\n", name.c_str(), s.class_counts[k]);
    out += line;
  }
  return out;
}

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string data;
  std::string output;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_data = true) {
  cmd->add_option("-c,--config", c.config_path, "JSON run config; flags override its values");
  cmd->add_option("--set", c.sets, "Override one key, e.g. --set train.lr=1e-3 (value parsed as JSON, else string)");
  if (with_data) cmd->add_option("-d,--data", c.data, "Input file (paths.data)");
  cmd->add_option("-o,--output", c.output, "Output directory (paths.output)");
  cmd->add_flag("-q,--quiet", c.quiet, "Do not print the resolved config or progress");
}

json parse_scalar(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  return v.is_discarded() ? json(text) : v;
}

/// "a.b.c=value" into `overlay`.
void apply_assignment(json& overlay, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(Errc::InvalidConfig, "--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  json* node = &overlay;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(Errc::InvalidConfig, "malformed key '" + key + "'");
    if (!node->is_object() && !node->is_null()) throw Error(Errc::InvalidConfig, "key '" + key + "' descends into a value");
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = parse_scalar(assignment.substr(eq + 1));
}

json read_json_file(const std::string& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) throw Error(Errc::InvalidConfig, "config file " + path + " is not valid JSON");
  return j;
}

/// Precedence, lowest first: built-in defaults (or the checkpoint's config),
/// --config file, --set assignments in order, dedicated flags.
RunConfig resolve_config(const Common& c, json flags, RunConfig base = {}) {
  RunConfig cfg = std::move(base);
  if (!c.config_path.empty()) cfg = run_config_from_json(read_json_file(c.config_path), cfg);
  if (!c.sets.empty()) {
    json overlay = json::object();
    for (const std::string& s : c.sets) apply_assignment(overlay, s);
    cfg = run_config_from_json(overlay, cfg);
  }
  if (!c.data.empty()) flags["paths"]["data"] = c.data;
  if (!c.output.empty()) flags["paths"]["output"] = c.output;
  if (!flags.empty()) cfg = run_config_from_json(flags, cfg);
  cfg.resolve();
  return cfg;
}

struct Context {
  std::string command;
  RunConfig cfg;
  json inputs = json::object();
  json options = json::object();
  std::ostream& out;
  bool quiet;

  fs::path output(const std::string& name) const { return fs::path(cfg.paths.output) / name; }

  void start() {
    if (!quiet) out << "causalmamba " << command << "\nresolved config:\n" << to_json(cfg).dump(2) << '\n';
    std::error_code ec;
    fs::create_directories(cfg.paths.output, ec);
    if (ec) throw Error(Errc::IoError, "cannot create " + cfg.paths.output + ": " + ec.message());
  }

  void add_input(const std::string& role, const std::string& path) {
    inputs[role] = {{"path", path}, {"hash", file_content_hash(path)}};
  }

  void write_run_json() const {
    const json run = {{"command", command}, {"config", to_json(cfg)}, {"inputs", inputs}, {"options", options}};
    write_file(output("run.json"), run.dump(2) + '\n');
  }
};

std::vector<Cascade> load_dataset(const std::string& path) {
  if (path.empty()) throw Error(Errc::InvalidConfig, "no data file given (--data or paths.data)");
  LoadResult r = load_jsonl(path);  // warns about each skipped line
  if (r.cascades.empty()) throw Error(Errc::SchemaViolation, "no valid cascades in " + path);
  return std::move(r.cascades);
}

void featurize_dataset(std::vector<Cascade>& cascades, const FeatureConfig& f) {
  TrigramEmbedding provider(f.d_text, f.embedding_seed);
  featurize_all(cascades, provider, f.d_user, f.salt);
}

json metrics_json(const ClassificationMetrics& m) {
  return {{"count", m.count},
          {"accuracy", m.accuracy},
          {"macro_f1", m.macro_f1},
          {"per_class_f1", m.per_class_f1},
          {"confusion", m.confusion}};
}

json split_report(const ModelState& state, const std::vector<Cascade>& data, std::size_t batch_size) {
  if (data.empty()) return {{"count", 0}};
  return metrics_json(evaluate(state, data, batch_size));
}

std::string metrics_line(const char* name, const json& m) {
  char line[96];
  if (m.at("count").get<std::size_t>() == 0) {
    std::snprintf(line, sizeof line, "%-6s %6d %10s %10s\n", name, 0, "-", "-");
  } else {
    std::snprintf(line, sizeof line, "%-6s %6zu %10.4f %10.4f\n", name, m.at("count").get<std::size_t>(),
                  m.at("accuracy").get<double>(), m.at("macro_f1").get<double>());
  }
  return line;
}

/// Checkpoint plus the run config stored with it; the output directory
/// defaults to <checkpoint dir>/<command>.
struct LoadedCheckpoint {
  ModelState state;
  RunConfig base;
};

LoadedCheckpoint open_checkpoint(const std::string& path, const std::string& command) {
  if (path.empty()) throw Error(Errc::InvalidConfig, "--checkpoint is required");
  json meta;
  LoadedCheckpoint lc{load_checkpoint(path, &meta), {}};
  if (!meta.is_object() || !meta.contains("config"))
    throw Error(Errc::BadCheckpoint, path + " carries no run config");
  try {
    lc.base = run_config_from_json(meta.at("config"));
  } catch (const Error& e) {
    throw Error(Errc::BadCheckpoint, std::string("stored run config: ") + e.what());
  }
  lc.base.paths.output = (fs::path(path).parent_path() / command).string();
  return lc;
}

void check_feature_width(const RunConfig& cfg, const ModelState& state) {
  if (cfg.model.input_width != state.model.input_width)
    throw Error(Errc::InvalidConfig, "feature width " + std::to_string(cfg.model.input_width) +
                                         " does not match the checkpoint's " +
                                         std::to_string(state.model.input_width));
}

const Cascade& find_event(const std::vector<Cascade>& data, const std::string& id) {
  for (const Cascade& c : data)
    if (c.event_id == id) return c;
  throw Error(Errc::UnknownEvent, "no event '" + id + "' in the dataset");
}

CausalGraph graph_for_event(const ModelState& state, const Cascade& c, std::optional<double> threshold) {
  const Batch batch = make_batch({&c});
  CausalGraph g = causal_graph_for(state.model, state.params, batch, 0, threshold);
  g.node_ids = c.node_ids;
  return g;
}

json graph_json(const std::string& event_id, const CausalGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges) edges.push_back({e.parent, e.child, g.weights(e.parent, e.child)});
  return {{"event_id", event_id}, {"node_ids", g.node_ids}, {"threshold", g.threshold}, {"edges", edges}};
}

// ------------------------------------------------------------------ commands

void cmd_defaults(const Common& c, std::ostream& out) {
  const RunConfig cfg = resolve_config(c, json::object());
  out << to_json(cfg).dump(2) << '\n';
}

struct GenerateOptions {
  std::size_t events = 0;
  std::uint64_t seed = 0;
  std::string tree_dir, labels;
  CLI::Option* events_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
};

void cmd_generate(const Common& c, const GenerateOptions& g, std::ostream& out) {
  json flags = json::object();
  if (g.events_opt->count()) flags["synthetic"]["num_events"] = g.events;
  if (g.seed_opt->count()) flags["synthetic"]["seed"] = g.seed;
  Context ctx{"generate", resolve_config(c, flags), json::object(), json::object(), out, c.quiet};
  ctx.start();

  std::vector<Cascade> cascades;
  if (!g.tree_dir.empty()) {
    if (g.labels.empty()) throw Error(Errc::InvalidConfig, "--tree-dir needs --labels");
    TreeParseResult r = parse_twitter15_tree(g.tree_dir, g.labels);
    for (const LoadIssue& issue : r.issues) warn(issue.file + ": " + issue.message);
    ctx.add_input("labels", g.labels);
    ctx.options = {{"tree_dir", g.tree_dir}, {"unlabeled", r.unlabeled}, {"rejected", r.rejected}};
    cascades = std::move(r.cascades);
  } else {
    SyntheticDataset d = generate_synthetic(ctx.cfg.synthetic);
    std::string planted;
    for (std::size_t e = 0; e < d.cascades.size(); ++e) {
      json edges = json::array();
      for (const Edge& edge : d.planted[e]) edges.push_back({edge.parent, edge.child});
      planted += json{{"event_id", d.cascades[e].event_id}, {"nodes", d.cascades[e].size()}, {"edges", edges}}.dump();
      planted += '\n';
    }
    write_file(ctx.output("planted_dags.jsonl"), planted);
    cascades = std::move(d.cascades);
  }
  write_jsonl(ctx.output("cascades.jsonl"), cascades);
  out << format_summary(summarize_dataset(cascades));
  ctx.write_run_json();
}

struct TrainOptions {
  std::size_t epochs = 0, batch_size = 0, patience = 0;
  double lr = 0.0, lambda = 0.0;
  std::uint64_t seed = 0;
  bool no_gcn = false, no_causal = false;
  CLI::Option *epochs_opt = nullptr, *batch_opt = nullptr, *patience_opt = nullptr, *lr_opt = nullptr,
              *lambda_opt = nullptr, *seed_opt = nullptr;
};

void cmd_train(const Common& c, const TrainOptions& t, std::ostream& out) {
  json flags = json::object();
  if (t.epochs_opt->count()) flags["train"]["max_epochs"] = t.epochs;
  if (t.batch_opt->count()) flags["train"]["batch_size"] = t.batch_size;
  if (t.patience_opt->count()) flags["train"]["patience"] = t.patience;
  if (t.lr_opt->count()) flags["train"]["lr"] = t.lr;
  if (t.seed_opt->count()) flags["train"]["seed"] = t.seed;
  if (t.lambda_opt->count()) flags["model"]["lambda"] = t.lambda;
  if (t.no_gcn) flags["model"]["use_gcn"] = false;
  if (t.no_causal) flags["model"]["use_causal"] = false;
  Context ctx{"train", resolve_config(c, flags), json::object(), json::object(), out, c.quiet};
  std::vector<Cascade> data = load_dataset(ctx.cfg.paths.data);
  ctx.start();
  ctx.add_input("data", ctx.cfg.paths.data);
  featurize_dataset(data, ctx.cfg.features);
  const DatasetSplit split = split_dataset(data, ctx.cfg.split.ratios, ctx.cfg.split.seed);

  std::ofstream metrics(ctx.output("metrics.jsonl"), std::ios::binary);
  if (!metrics) throw Error(Errc::IoError, "cannot write " + ctx.output("metrics.jsonl").string());
  const FitResult result = fit(split.train, split.val, ctx.cfg.model, ctx.cfg.train, [&](const EpochRecord& r) {
    metrics << json{{"epoch", r.epoch},
                    {"train_loss", r.train_loss},
                    {"train_cls", r.train_cls},
                    {"train_causal", r.train_causal},
                    {"grad_norm", r.grad_norm},
                    {"val_accuracy", r.val_accuracy},
                    {"val_macro_f1", r.val_macro_f1},
                    {"improved", r.improved}}
                   .dump()
            << '\n';
    if (!ctx.quiet) {
      char line[128];
      std::snprintf(line, sizeof line, "epoch %3zu  loss %.4f  val acc %.4f  val F1 %.4f%s\n", r.epoch, r.train_loss,
                    r.val_accuracy, r.val_macro_f1, r.improved ? "  *" : "");
      out << line;
    }
  });
  metrics.close();

  save_checkpoint(ctx.output("checkpoint.json").string(), result.state, {{"config", to_json(ctx.cfg)}});
  const std::size_t bs = ctx.cfg.train.batch_size;
  const json report = {{"variant", variant_name(ctx.cfg.model)},
                       {"epochs_run", result.history.size()},
                       {"best_epoch", result.state.best_epoch},
                       {"best_val_macro_f1", result.state.best_metric},
                       {"splits",
                        {{"train", split_report(result.state, split.train, bs)},
                         {"val", split_report(result.state, split.val, bs)},
                         {"test", split_report(result.state, split.test, bs)}}}};
  write_file(ctx.output("report.json"), report.dump(2) + '\n');
  out << "variant " << variant_name(ctx.cfg.model) << "\n";
  out << "split   count   accuracy   macro-F1\n";
  for (const char* name : {"train", "val", "test"}) out << metrics_line(name, report["splits"][name]);
  ctx.write_run_json();
}

struct CheckpointOptions {
  std::string checkpoint, event;
  std::size_t k = 0;
  double threshold = 0.0;
  CLI::Option *k_opt = nullptr, *threshold_opt = nullptr;
};

Context checkpoint_context(const std::string& command, const Common& c, const CheckpointOptions& o, json flags,
                           std::ostream& out, ModelState& state) {
  LoadedCheckpoint lc = open_checkpoint(o.checkpoint, command);
  if (o.threshold_opt && o.threshold_opt->count()) flags["intervention"]["threshold"] = o.threshold;
  Context ctx{command, resolve_config(c, std::move(flags), lc.base), json::object(), json::object(), out, c.quiet};
  check_feature_width(ctx.cfg, lc.state);
  state = std::move(lc.state);
  return ctx;
}

void cmd_eval(const Common& c, const CheckpointOptions& o, std::ostream& out) {
  ModelState state;
  Context ctx = checkpoint_context("eval", c, o, json::object(), out, state);
  std::vector<Cascade> data = load_dataset(ctx.cfg.paths.data);
  ctx.start();
  ctx.add_input("checkpoint", o.checkpoint);
  ctx.add_input("data", ctx.cfg.paths.data);
  featurize_dataset(data, ctx.cfg.features);
  const std::size_t bs = ctx.cfg.train.batch_size;
  const DatasetSplit split = split_dataset(data, ctx.cfg.split.ratios, ctx.cfg.split.seed);
  const json report = {{"variant", variant_name(state.model)},
                       {"splits",
                        {{"train", split_report(state, split.train, bs)},
                         {"val", split_report(state, split.val, bs)},
                         {"test", split_report(state, split.test, bs)},
                         {"all", split_report(state, data, bs)}}}};
  write_file(ctx.output("eval.json"), report.dump(2) + '\n');
  out << "split   count   accuracy   macro-F1\n";
  for (const char* name : {"train", "val", "test", "all"}) out << metrics_line(name, report["splits"][name]);
  ctx.write_run_json();
}

void cmd_intervene(const Common& c, const CheckpointOptions& o, std::ostream& out) {
  json flags = json::object();
  if (o.k_opt->count()) flags["intervention"]["k"] = o.k;
  ModelState state;
  Context ctx = checkpoint_context("intervene", c, o, flags, out, state);
  if (o.event.empty()) throw Error(Errc::InvalidConfig, "--event is required");
  std::vector<Cascade> data = load_dataset(ctx.cfg.paths.data);
  Cascade event = find_event(data, o.event);
  ctx.start();
  ctx.add_input("checkpoint", o.checkpoint);
  ctx.add_input("data", ctx.cfg.paths.data);
  ctx.options = {{"event", o.event}};
  TrigramEmbedding provider(ctx.cfg.features.d_text, ctx.cfg.features.embedding_seed);
  event.features = featurize(event, provider, ctx.cfg.features.d_user, ctx.cfg.features.salt);

  const CausalGraph graph = graph_for_event(state, event, ctx.cfg.intervention.threshold);
  const InterventionReport report = intervene(graph, ctx.cfg.intervention.k, ctx.cfg.intervention.pagerank);
  const std::set<std::size_t> removed(report.removed_indices.begin(), report.removed_indices.end());
  write_file(ctx.output("before.dot"), render_dot(graph, removed));
  write_file(ctx.output("after.dot"), render_dot(intervened_graph(graph, report)));
  json j = json::parse(report_to_json(report));
  j["event_id"] = event.event_id;
  j["k"] = ctx.cfg.intervention.k;
  j["threshold"] = graph.threshold;
  write_file(ctx.output("intervention.json"), j.dump(2) + '\n');

  out << "event " << event.event_id << ": removed";
  for (const std::string& id : report.removed_ids) out << ' ' << id;
  out << "\ncomponents " << report.components_before << " -> " << report.components_after << ", reachable pairs "
      << report.reachable_pairs_before << " -> " << report.reachable_pairs_after << '\n';
  ctx.write_run_json();
}

void cmd_export(const Common& c, const CheckpointOptions& o, std::ostream& out) {
  ModelState state;
  Context ctx = checkpoint_context("export", c, o, json::object(), out, state);
  std::vector<Cascade> data = load_dataset(ctx.cfg.paths.data);
  if (!o.event.empty()) data = {find_event(data, o.event)};
  ctx.start();
  ctx.add_input("checkpoint", o.checkpoint);
  ctx.add_input("data", ctx.cfg.paths.data);
  ctx.options = {{"event", o.event}};
  featurize_dataset(data, ctx.cfg.features);
  std::string lines;
  for (const Cascade& cascade : data) {
    const CausalGraph g = graph_for_event(state, cascade, ctx.cfg.intervention.threshold);
    lines += graph_json(cascade.event_id, g).dump() + '\n';
    if (!o.event.empty()) write_file(ctx.output("graph.dot"), render_dot(g));
  }
  write_file(ctx.output("graphs.jsonl"), lines);
  out << "exported " << data.size() << " causal graph(s) to " << ctx.output("graphs.jsonl").string() << '\n';
  ctx.write_run_json();
}

/// Numeric CSV; a first row that does not parse as numbers is a header.
std::pair<Tensor, std::vector<std::string>> read_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::vector<std::string> header;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto a = cell.find_first_not_of(" \t");
      const auto b = cell.find_last_not_of(" \t");
      cells.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    std::vector<double> values;
    bool numeric = true;
    for (const std::string& s : cells) {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        numeric = false;
        break;
      }
      values.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && header.empty()) {
        header = cells;
        continue;
      }
      throw Error(Errc::SchemaViolation, path + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    const std::size_t width = header.empty() ? (rows.empty() ? values.size() : rows.front().size()) : header.size();
    if (values.size() != width)
      throw Error(Errc::SchemaViolation, path + ":" + std::to_string(line_no) + ": expected " +
                                             std::to_string(width) + " columns");
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) throw Error(Errc::SchemaViolation, path + ": need at least two data rows");
  const std::size_t n = rows.front().size();
  if (header.empty())
    for (std::size_t j = 0; j < n; ++j) header.push_back("x" + std::to_string(j));
  Tensor x({rows.size(), n});
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) x(i, j) = rows[i][j];
  return {x, header};
}

struct DiscoverOptions {
  double lambda1 = 0.0, threshold = 0.0;
  CLI::Option *lambda_opt = nullptr, *threshold_opt = nullptr;
};

void cmd_discover(const Common& c, const DiscoverOptions& o, std::ostream& out) {
  json flags = json::object();
  if (o.lambda_opt->count()) flags["notears"]["lambda1"] = o.lambda1;
  if (o.threshold_opt->count()) flags["notears"]["threshold"] = o.threshold;
  Context ctx{"discover", resolve_config(c, flags), json::object(), json::object(), out, c.quiet};
  if (ctx.cfg.paths.data.empty()) throw Error(Errc::InvalidConfig, "no CSV file given (--data or paths.data)");
  auto [x, names] = read_csv(ctx.cfg.paths.data);
  ctx.start();
  ctx.add_input("data", ctx.cfg.paths.data);
  NotearsResult r = notears_fit(x, ctx.cfg.notears);
  r.graph.node_ids = names;
  json weights = json::array();
  for (std::size_t i = 0; i < r.graph.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < r.graph.size(); ++j) row.push_back(r.graph.weights(i, j));
    weights.push_back(row);
  }
  json j = graph_json(fs::path(ctx.cfg.paths.data).stem().string(), r.graph);
  j["weights"] = weights;
  j["h"] = r.h;
  j["iterations"] = r.iterations;
  j["pruned_edges"] = r.pruned_edges;
  write_file(ctx.output("discover.json"), j.dump(2) + '\n');
  write_file(ctx.output("discover.dot"), render_dot(r.graph));
  out << "samples " << x.dim(0) << ", variables " << x.dim(1) << ", edges " << r.graph.edges.size() << ", h "
      << r.h << '\n';
  for (const Edge& e : r.graph.edges)
    out << "  " << names[e.parent] << " -> " << names[e.child] << "  " << r.graph.weights(e.parent, e.child) << '\n';
  ctx.write_run_json();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rumor cascade classification with causal structure learning"};
  app.name("causalmamba");
  app.require_subcommand(1);

  Common common;

  CLI::App* defaults = app.add_subcommand("defaults", "Print the resolved configuration and exit");
  add_common(defaults, common, false);

  GenerateOptions gen;
  CLI::App* generate = app.add_subcommand("generate", "Write a synthetic (or converted Twitter15) cascade dataset");
  add_common(generate, common, false);
  gen.events_opt = generate->add_option("-n,--events", gen.events, "synthetic.num_events");
  gen.seed_opt = generate->add_option("--seed", gen.seed, "synthetic.seed");
  generate->add_option("--tree-dir", gen.tree_dir, "Convert a Twitter15-style tree directory instead");
  generate->add_option("--labels", gen.labels, "Label file for --tree-dir");

  TrainOptions tr;
  CLI::App* train = app.add_subcommand("train", "Train a model on a JSONL dataset");
  add_common(train, common);
  tr.epochs_opt = train->add_option("--epochs", tr.epochs, "train.max_epochs");
  tr.batch_opt = train->add_option("--batch-size", tr.batch_size, "train.batch_size");
  tr.patience_opt = train->add_option("--patience", tr.patience, "train.patience");
  tr.lr_opt = train->add_option("--lr", tr.lr, "train.lr");
  tr.seed_opt = train->add_option("--seed", tr.seed, "train.seed");
  tr.lambda_opt = train->add_option("--lambda", tr.lambda, "model.lambda");
  train->add_flag("--no-gcn", tr.no_gcn, "model.use_gcn = false");
  train->add_flag("--no-causal", tr.no_causal, "model.use_causal = false");

  CheckpointOptions ev;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  add_common(eval, common);
  eval->add_option("--checkpoint", ev.checkpoint, "checkpoint.json")->required();

  CheckpointOptions iv;
  CLI::App* intervene_cmd = app.add_subcommand("intervene", "Remove the top-k PageRank nodes of one event's causal graph");
  add_common(intervene_cmd, common);
  intervene_cmd->add_option("--checkpoint", iv.checkpoint, "checkpoint.json")->required();
  intervene_cmd->add_option("-e,--event", iv.event, "Event id")->required();
  iv.k_opt = intervene_cmd->add_option("-k", iv.k, "intervention.k");
  iv.threshold_opt = intervene_cmd->add_option("--threshold", iv.threshold, "intervention.threshold");

  CheckpointOptions ex;
  CLI::App* export_cmd = app.add_subcommand("export", "Write learned causal graphs as JSONL (and DOT for one event)");
  add_common(export_cmd, common);
  export_cmd->add_option("--checkpoint", ex.checkpoint, "checkpoint.json")->required();
  export_cmd->add_option("-e,--event", ex.event, "Only this event");
  ex.threshold_opt = export_cmd->add_option("--threshold", ex.threshold, "intervention.threshold");

  DiscoverOptions dc;
  CLI::App* discover = app.add_subcommand("discover", "Fit a linear NOTEARS DAG to a numeric CSV");
  add_common(discover, common);
  dc.lambda_opt = discover->add_option("--lambda1", dc.lambda1, "notears.lambda1");
  dc.threshold_opt = discover->add_option("--threshold", dc.threshold, "notears.threshold");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (defaults->parsed()) cmd_defaults(common, out);
    else if (generate->parsed()) cmd_generate(common, gen, out);
    else if (train->parsed()) cmd_train(common, tr, out);
    else if (eval->parsed()) cmd_eval(common, ev, out);
    else if (intervene_cmd->parsed()) cmd_intervene(common, iv, out);
    else if (export_cmd->parsed()) cmd_export(common, ex, out);
    else if (discover->parsed()) cmd_discover(common, dc, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace causalmamba
