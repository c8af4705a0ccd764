#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "../support/oracles.hpp"
#include "../support/temp_dir.hpp"
#include "causalmamba/batching.hpp"
#include "causalmamba/dataset_io.hpp"
#include "causalmamba/features.hpp"
#include "causalmamba/logging.hpp"
#include "causalmamba/synthetic.hpp"

using namespace causalmamba;
using testutil::TempDir;
using testutil::write_text;

namespace {

template <class F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoError;
}

RawNode node(std::string id, double t, std::optional<std::string> parent, std::string user = "u") {
  RawNode n;
  n.id = std::move(id);
  n.t = t;
  n.parent = std::move(parent);
  n.user = std::move(user);
  n.text = "text of " + n.id;
  return n;
}

Cascade small_cascade(const std::string& id, std::size_t n, Label label) {
  std::vector<RawNode> raw;
  raw.push_back(node("r", 0.0, std::nullopt));
  for (std::size_t i = 1; i < n; ++i) raw.push_back(node("n" + std::to_string(i), static_cast<double>(i), "r"));
  return build_cascade(id, raw, label);
}

Cascade featurized(const std::string& id, std::size_t n, Label label = Label::True) {
  Cascade c = small_cascade(id, n, label);
  c.features = featurize(c, TrigramEmbedding(8), 4, "salt");
  return c;
}

class QuietWarnings : public ::testing::Test {
 protected:
  void SetUp() override { set_warnings_silenced(true); }
  void TearDown() override { set_warnings_silenced(false); }
};

}  // namespace

// ------------------------------------------------------------ build_cascade

TEST(BuildCascade, SingleNodeIsTooSmall) {
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 0, std::nullopt)}, Label::True); }), Errc::TooSmall);
}

TEST(BuildCascade, SelfLoopIsDropped) {
  const Cascade c = build_cascade("e", {node("r", 0, "r"), node("a", 1, "r")}, Label::False);
  ASSERT_EQ(c.edges.size(), 1u);
  EXPECT_EQ(c.edges[0], (Edge{0, 1}));
}

TEST(BuildCascade, SortsByTimestampAndRemapsEdges) {
  const Cascade c =
      build_cascade("e", {node("a", 5, "r"), node("r", 0, std::nullopt), node("b", 9, "a")}, Label::True);
  EXPECT_EQ(c.node_ids, (std::vector<std::string>{"r", "a", "b"}));
  EXPECT_EQ(c.timestamps, (std::vector<double>{0, 5, 9}));
  EXPECT_EQ(c.edges, (std::vector<Edge>{{0, 1}, {1, 2}}));
}

TEST(BuildCascade, TimestampTiesBreakByNodeId) {
  const Cascade c =
      build_cascade("e", {node("z", 2, "r"), node("m", 2, "r"), node("r", 0, std::nullopt)}, Label::True);
  EXPECT_EQ(c.node_ids, (std::vector<std::string>{"r", "m", "z"}));
}

TEST(BuildCascade, TimestampsRebasedOnSource) {
  const Cascade c = build_cascade("e", {node("r", 100, std::nullopt), node("a", 130, "r")}, Label::True);
  EXPECT_EQ(c.timestamps, (std::vector<double>{0, 30}));
}

TEST(BuildCascade, Errors) {
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 0, std::nullopt), node("a", 1, std::nullopt)}, Label::True); }),
            Errc::MultipleRoots);
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 0, "a"), node("a", 1, "r")}, Label::True); }), Errc::NoRoot);
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 0, std::nullopt), node("a", 1, "x")}, Label::True); }),
            Errc::DanglingParent);
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 0, std::nullopt), node("a", -1, "r")}, Label::True); }),
            Errc::NegativeTimestamp);
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 5, std::nullopt), node("a", 1, "r")}, Label::True); }),
            Errc::NegativeTimestamp);
  EXPECT_EQ(error_code([] { build_cascade("e", {node("r", 0, std::nullopt), node("r", 1, "r")}, Label::True); }),
            Errc::DuplicateNode);
}

TEST(BuildCascade, InvariantsHold) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<RawNode> raw = {node("root", 0, std::nullopt)};
    const std::size_t n = 2 + rng.below(10);
    for (std::size_t i = 1; i < n; ++i)
      raw.push_back(node("n" + std::to_string(i), rng.uniform(0, 10), raw[rng.below(raw.size())].id));
    rng.shuffle(raw.begin(), raw.end());
    const Cascade c = build_cascade("e", raw, Label::Unverified);
    EXPECT_NO_THROW(validate_cascade(c));
    EXPECT_EQ(c.node_ids[0], "root");
    EXPECT_EQ(c.edges.size(), n - 1);
  }
}

TEST(Labels, ParseAndName) {
  EXPECT_EQ(parse_label("nonrumor"), Label::NonRumor);
  EXPECT_EQ(parse_label("non-rumor"), Label::NonRumor);
  EXPECT_EQ(parse_label("unverified"), Label::Unverified);
  EXPECT_EQ(label_name(Label::False), "false");
  EXPECT_EQ(error_code([] { parse_label("maybe"); }), Errc::UnknownLabelString);
}

// ------------------------------------------------------------ featurize

TEST(Featurize, LayoutAndTemporalColumn) {
  const Cascade c = small_cascade("e", 4, Label::True);
  const Tensor f = featurize(c, TrigramEmbedding(8), 4, "salt");
  ASSERT_EQ(f.shape(), (Shape{4, 13}));
  EXPECT_EQ(f(0, 8), 0.0);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(f(i, 8), std::log1p(c.timestamps[i]));
}

TEST(Featurize, PaperWidth) { EXPECT_EQ(feature_width(768, 64), 833u); }

TEST(Featurize, UserVectorsDeterministicUnitNorm) {
  const auto a = user_vector("alice", "salt", 64);
  const auto b = user_vector("alice", "salt", 64);
  ASSERT_EQ(a.size(), 64u);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0)), 1.0, 1e-12);
  EXPECT_NE(a, user_vector("alice", "pepper", 64));
  EXPECT_NE(a, user_vector("bob", "salt", 64));
}

TEST(Featurize, PureFunction) {
  const Cascade c = small_cascade("e", 5, Label::True);
  TrigramEmbedding provider(16);
  EXPECT_EQ(featurize(c, provider, 8, "s"), featurize(c, provider, 8, "s"));
}

TEST(Featurize, TrigramEmbedding) {
  TrigramEmbedding p(32);
  const auto v = p.embed("breaking news tonight");
  EXPECT_EQ(v, p.embed("breaking news tonight"));
  EXPECT_NEAR(std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)), 1.0, 1e-12);
  const auto zero = p.embed("");
  EXPECT_TRUE(std::all_of(zero.begin(), zero.end(), [](double x) { return x == 0.0; }));
}

TEST(Featurize, MissingTextAndPrecomputedEmbeddings) {
  Cascade c = small_cascade("e", 3, Label::True);
  c.texts[1].reset();
  const Tensor f = featurize(c, TrigramEmbedding(4), 2, "s");
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(f(1, j), 0.0);

  c.text_embeddings = Tensor({3, 4}, 0.25);
  const Tensor g = featurize(c, TrigramEmbedding(4), 2, "s");
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(g(i, j), 0.25);
}

// ------------------------------------------------------------ JSONL

class Jsonl : public QuietWarnings {};

TEST_F(Jsonl, EmptyFileWarns) {
  TempDir dir;
  write_text(dir / "empty.jsonl", "");
  const std::size_t before = warning_count();
  const LoadResult r = load_jsonl(dir / "empty.jsonl");
  EXPECT_TRUE(r.cascades.empty());
  EXPECT_GT(warning_count(), before);
}

TEST_F(Jsonl, OneValidLine) {
  TempDir dir;
  write_text(dir / "one.jsonl",
             R"({"event_id":"e1","label":"true","nodes":[{"id":"a","user":"u1","t":0,"parent":null,"text":"hi"},)"
             R"({"id":"b","user":"u2","t":3.5,"parent":"a","text":null}]})"
             "\n");
  const LoadResult r = load_jsonl(dir / "one.jsonl");
  ASSERT_EQ(r.cascades.size(), 1u);
  EXPECT_TRUE(r.issues.empty());
  EXPECT_EQ(r.cascades[0].size(), 2u);
  EXPECT_FALSE(r.cascades[0].texts[1].has_value());
}

TEST_F(Jsonl, MissingLabelReportsLineNumber) {
  TempDir dir;
  const std::string good =
      R"({"event_id":"e1","label":"false","nodes":[{"id":"a","user":"u","t":0,"parent":null},{"id":"b","user":"u","t":1,"parent":"a"}]})";
  const std::string bad = R"({"event_id":"e2","nodes":[{"id":"a","user":"u","t":0,"parent":null}]})";
  write_text(dir / "mixed.jsonl", good + "\n" + bad + "\n" + good + "\n");
  const LoadResult r = load_jsonl(dir / "mixed.jsonl");
  EXPECT_EQ(r.cascades.size(), 2u);
  ASSERT_EQ(r.issues.size(), 1u);
  EXPECT_EQ(r.issues[0].line, 2u);
  EXPECT_EQ(r.issues[0].code, Errc::SchemaViolation);
  EXPECT_EQ(error_code([&] { load_jsonl_strict(dir / "mixed.jsonl"); }), Errc::SchemaViolation);
}

TEST_F(Jsonl, UnknownLabelAndRejectedEventsAreIssues) {
  TempDir dir;
  write_text(dir / "bad.jsonl",
             R"({"event_id":"e1","label":"rumor","nodes":[{"id":"a","user":"u","t":0,"parent":null},{"id":"b","user":"u","t":1,"parent":"a"}]})"
             "\n"
             R"({"event_id":"e2","label":"true","nodes":[{"id":"a","user":"u","t":0,"parent":null}]})"
             "\n");
  const LoadResult r = load_jsonl(dir / "bad.jsonl");
  ASSERT_EQ(r.issues.size(), 2u);
  EXPECT_EQ(r.issues[0].code, Errc::UnknownLabelString);
  EXPECT_EQ(r.issues[1].code, Errc::TooSmall);
}

TEST_F(Jsonl, MissingFile) {
  TempDir dir;
  EXPECT_EQ(error_code([&] { load_jsonl(dir / "absent.jsonl"); }), Errc::FileNotFound);
}

TEST_F(Jsonl, RoundTrip) {
  SyntheticConfig cfg;
  cfg.num_events = 12;
  std::vector<Cascade> cascades = generate_synthetic(cfg).cascades;
  cascades[0].texts[1].reset();
  TempDir dir;
  write_jsonl(dir / "rt.jsonl", cascades);
  const std::vector<Cascade> back = load_jsonl_strict(dir / "rt.jsonl");
  ASSERT_EQ(back.size(), cascades.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], cascades[i]) << i;
}

// ------------------------------------------------------------ Twitter15 trees

class TreeParse : public QuietWarnings {};

TEST_F(TreeParse, TwoLinesFromTheSource) {
  TempDir dir;
  std::filesystem::create_directories(dir / "tree");
  write_text(dir / "tree" / "100.txt",
             "['u0', '100', '0.0']->['u1', '101', '1.5']\n['u0', '100', '0.0']->['u2', '102', '4.0']\n");
  write_text(dir / "label.txt", "true:100\n");
  const TreeParseResult r = parse_twitter15_tree(dir / "tree", dir / "label.txt");
  ASSERT_EQ(r.cascades.size(), 1u);
  EXPECT_EQ(r.cascades[0].size(), 3u);
  EXPECT_EQ(r.cascades[0].edges.size(), 2u);
  EXPECT_EQ(r.cascades[0].label, Label::True);
}

TEST_F(TreeParse, RootMarkerAndFirstParentWins) {
  TempDir dir;
  std::filesystem::create_directories(dir / "tree");
  write_text(dir / "tree" / "7.txt",
             "['ROOT', 'ROOT', '0.0']->['u0', '7', '0.0']\n"
             "['u0', '7', '0.0']->['u1', '8', '2.0']\n"
             "['u1', '8', '2.0']->['u2', '9', '3.0']\n"
             "['u0', '7', '0.0']->['u2', '9', '3.0']\n");
  write_text(dir / "label.txt", "non-rumor:7\n");
  const TreeParseResult r = parse_twitter15_tree(dir / "tree", dir / "label.txt");
  ASSERT_EQ(r.cascades.size(), 1u);
  EXPECT_EQ(r.cascades[0].edges, (std::vector<Edge>{{0, 1}, {1, 2}}));
  EXPECT_EQ(r.cascades[0].label, Label::NonRumor);
}

TEST_F(TreeParse, UnlabeledEventsAreSkippedAndCounted) {
  TempDir dir;
  std::filesystem::create_directories(dir / "tree");
  write_text(dir / "tree" / "1.txt", "['u0', '1', '0.0']->['u1', '2', '1.0']\n");
  write_text(dir / "tree" / "5.txt", "['u0', '5', '0.0']->['u1', '6', '1.0']\n");
  write_text(dir / "label.txt", "false:1\n");
  const TreeParseResult r = parse_twitter15_tree(dir / "tree", dir / "label.txt");
  EXPECT_EQ(r.cascades.size(), 1u);
  EXPECT_EQ(r.unlabeled, 1u);
}

TEST_F(TreeParse, Errors) {
  TempDir dir;
  std::filesystem::create_directories(dir / "tree");
  write_text(dir / "tree" / "1.txt", "not a triple line\n");
  write_text(dir / "label.txt", "false:1\n");
  EXPECT_EQ(error_code([&] { parse_twitter15_tree(dir / "tree", dir / "label.txt"); }), Errc::MalformedLine);
  write_text(dir / "label.txt", "sarcastic:1\n");
  EXPECT_EQ(error_code([&] { parse_twitter15_tree(dir / "tree", dir / "label.txt"); }), Errc::UnknownLabelString);
  EXPECT_EQ(error_code([&] { parse_twitter15_tree(dir / "nope", dir / "label.txt"); }), Errc::FileNotFound);
}

// ------------------------------------------------------------ synthetic

TEST(Synthetic, DeterministicInSeed) {
  SyntheticConfig cfg;
  cfg.num_events = 40;
  const SyntheticDataset a = generate_synthetic(cfg);
  const SyntheticDataset b = generate_synthetic(cfg);
  EXPECT_EQ(a.cascades, b.cascades);
  EXPECT_EQ(a.planted, b.planted);
  cfg.seed += 1;
  EXPECT_NE(generate_synthetic(cfg).cascades, a.cascades);
}

TEST(Synthetic, BalancedClasses) {
  const SyntheticDataset d = generate_synthetic(SyntheticConfig{});
  std::array<std::size_t, kNumClasses> counts{};
  for (const Cascade& c : d.cascades) ++counts[static_cast<int>(c.label)];
  for (std::size_t k : counts) EXPECT_EQ(k, 100u);

  SyntheticConfig odd;
  odd.num_events = 11;
  counts = {};
  for (const Cascade& c : generate_synthetic(odd).cascades) ++counts[static_cast<int>(c.label)];
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  EXPECT_LE(*hi - *lo, 1u);
}

TEST(Synthetic, PlantedDagsAreAcyclicAndContainTheTree) {
  const SyntheticDataset d = generate_synthetic(SyntheticConfig{});
  for (std::size_t e = 0; e < d.cascades.size(); ++e) {
    const Cascade& c = d.cascades[e];
    EXPECT_NO_THROW(validate_cascade(c));
    EXPECT_FALSE(oracle::has_cycle(d.planted[e], c.size())) << c.event_id;
    for (const Edge& edge : c.edges)
      EXPECT_NE(std::find(d.planted[e].begin(), d.planted[e].end(), edge), d.planted[e].end());
    EXPECT_GE(c.size(), 8u);
    EXPECT_LE(c.size(), 32u);
  }
}

TEST(Synthetic, InvalidConfig) {
  SyntheticConfig cfg;
  cfg.num_events = 0;
  EXPECT_EQ(error_code([&] { generate_synthetic(cfg); }), Errc::InvalidConfig);
  cfg = {};
  cfg.nodes_min = 1;
  EXPECT_EQ(error_code([&] { generate_synthetic(cfg); }), Errc::InvalidConfig);
  cfg = {};
  cfg.class_params[0].branching = 0.8;
  cfg.class_params[0].chaining = 0.5;
  EXPECT_EQ(error_code([&] { generate_synthetic(cfg); }), Errc::InvalidConfig);
}

// ------------------------------------------------------------ split

namespace {

std::vector<Cascade> labelled(const std::array<std::size_t, kNumClasses>& per_class) {
  std::vector<Cascade> out;
  for (std::size_t k = 0; k < kNumClasses; ++k)
    for (std::size_t i = 0; i < per_class[k]; ++i)
      out.push_back(small_cascade("c" + std::to_string(k) + "_" + std::to_string(i), 2, static_cast<Label>(k)));
  return out;
}

std::size_t count_label(const std::vector<Cascade>& v, Label l) {
  return static_cast<std::size_t>(std::count_if(v.begin(), v.end(), [&](const Cascade& c) { return c.label == l; }));
}

}  // namespace

TEST(Split, FloorFloorRemainderPerClass) {
  const DatasetSplit s = split_dataset(labelled({10, 10, 10, 10}), {}, 3);
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    EXPECT_EQ(count_label(s.train, static_cast<Label>(k)), 7u);
    EXPECT_EQ(count_label(s.val, static_cast<Label>(k)), 1u);
    EXPECT_EQ(count_label(s.test, static_cast<Label>(k)), 2u);
  }
}

TEST(Split, FourteenNinetyEvents) {
  // Class sizes for which the per-class floor rule yields 1043 / 223 / 224.
  const DatasetSplit s = split_dataset(labelled({380, 380, 360, 370}), {}, 1);
  EXPECT_EQ(s.train.size(), 1043u);
  EXPECT_EQ(s.val.size(), 223u);
  EXPECT_EQ(s.test.size(), 224u);
}

TEST(Split, DeterministicAndStratified) {
  const std::vector<Cascade> data = labelled({23, 31, 17, 40});
  const DatasetSplit a = split_dataset(data, {}, 5);
  const DatasetSplit b = split_dataset(data, {}, 5);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  EXPECT_NE(split_dataset(data, {}, 6).train, a.train);
  // Two floors each lose under one event, so the remainder drifts by under two.
  const std::array<std::size_t, 4> sizes = {23, 31, 17, 40};
  for (std::size_t k = 0; k < kNumClasses; ++k) {
    const double n = static_cast<double>(sizes[k]);
    EXPECT_LE(std::abs(static_cast<double>(count_label(a.train, static_cast<Label>(k))) - 0.70 * n), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(count_label(a.val, static_cast<Label>(k))) - 0.15 * n), 1.0);
    EXPECT_LE(std::abs(static_cast<double>(count_label(a.test, static_cast<Label>(k))) - 0.15 * n), 2.0);
  }
}

TEST(Split, Errors) {
  EXPECT_EQ(error_code([] { split_dataset(labelled({5, 5, 0, 5}), {}, 1); }), Errc::EmptyClass);
  EXPECT_EQ(error_code([] { split_dataset(labelled({5, 5, 5, 5}), {0.5, 0.5, 0.5}, 1); }), Errc::InvalidConfig);
}

// ------------------------------------------------------------ batching

TEST(Batching, PaddingAndMask) {
  const Cascade a = featurized("a", 3), b = featurized("b", 5, Label::False);
  const Batch batch = make_batch({&a, &b});
  EXPECT_EQ(batch.length(), 5u);
  EXPECT_EQ(batch.n_per_graph, (std::vector<std::size_t>{3, 5}));
  EXPECT_EQ(batch.y, (std::vector<int>{0, 1}));
  for (std::size_t bi = 0; bi < 2; ++bi) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(batch.mask(bi, i), i < batch.n_per_graph[bi] ? 1.0 : 0.0);
      s += batch.mask(bi, i);
    }
    EXPECT_EQ(s, static_cast<double>(batch.n_per_graph[bi]));
  }
  for (std::size_t i = 3; i < 5; ++i)
    for (std::size_t f = 0; f < batch.x.dim(2); ++f) EXPECT_EQ(batch.x(0, i, f), 0.0);
}

TEST(Batching, RealRowsAreBitIdentical) {
  const Cascade a = featurized("a", 4), b = featurized("b", 7);
  const Batch batch = make_batch({&a, &b});
  for (std::size_t i = 0; i < 7; ++i)
    for (std::size_t f = 0; f < b.features.dim(1); ++f) {
      EXPECT_EQ(batch.x(1, i, f), b.features(i, f));
      if (i < 4) EXPECT_EQ(batch.x(0, i, f), a.features(i, f));
    }
}

TEST(Batching, BatchCountsAndPartialBatch) {
  std::vector<Cascade> data;
  for (int i = 0; i < 33; ++i) data.push_back(featurized("e" + std::to_string(i), 2 + i % 3));
  const std::vector<Batch> batches = make_batches(data, 16);
  ASSERT_EQ(batches.size(), 3u);
  EXPECT_EQ(batches[0].size(), 16u);
  EXPECT_EQ(batches[1].size(), 16u);
  EXPECT_EQ(batches[2].size(), 1u);
}

TEST(Batching, MixedFeatureWidth) {
  Cascade a = featurized("a", 3);
  Cascade b = small_cascade("b", 3, Label::True);
  b.features = featurize(b, TrigramEmbedding(6), 4, "salt");
  EXPECT_EQ(error_code([&] { make_batch({&a, &b}); }), Errc::MixedFeatureWidth);
}
