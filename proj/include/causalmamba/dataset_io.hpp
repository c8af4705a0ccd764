#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "causalmamba/cascade.hpp"
#include "causalmamba/error.hpp"

namespace causalmamba {

struct LoadIssue {
  std::size_t line = 0;  // 1-based; 0 when not line-specific
  std::string file;
  Errc code = Errc::SchemaViolation;
  std::string message;
};

struct LoadResult {
  std::vector<Cascade> cascades;
  std::vector<LoadIssue> issues;
};

/// One cascade per line:
///   {"event_id": str, "label": "true"|"false"|"unverified"|"nonrumor",
///    "nodes": [{"id": str, "user": str, "t": number, "parent": str|null,
///               "text": str|null, "embedding": [number, ...] (optional)}]}
/// Invalid lines are collected as issues (with line numbers) and skipped.
/// Throws FileNotFound.
LoadResult load_jsonl(const std::filesystem::path& path);

/// Like load_jsonl but throws the first issue as an Error.
std::vector<Cascade> load_jsonl_strict(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, const std::vector<Cascade>& cascades);

/// Parses one JSONL record; throws SchemaViolation or any build_cascade error.
Cascade parse_cascade_json(const std::string& line);
std::string cascade_to_json(const Cascade& cascade);

struct TreeParseResult {
  std::vector<Cascade> cascades;
  std::vector<LoadIssue> issues;
  std::size_t unlabeled = 0;
  std::size_t rejected = 0;
};

/// Twitter15-style layout: `tree_dir/<event_id>.txt`, one edge per line,
///   ['uid', 'tweet_id', 'delay']->['uid', 'tweet_id', 'delay']
/// with a ['ROOT', 'ROOT', ...] parent marking the source. `label_file` has
/// lines "label:event_id". The first line naming a child fixes its parent; a
/// parent that never appears as a child becomes a parentless node.
/// Events missing from the label file are skipped and counted; events that
/// fail build_cascade are rejected and counted. Throws FileNotFound,
/// MalformedLine, UnknownLabelString.
TreeParseResult parse_twitter15_tree(const std::filesystem::path& tree_dir, const std::filesystem::path& label_file);

}  // namespace causalmamba
