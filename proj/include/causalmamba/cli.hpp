#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "causalmamba/cascade.hpp"
#include "causalmamba/error.hpp"

namespace causalmamba {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

/// 2 for errors caused by the inputs (bad config, missing or malformed
/// files, unknown events, k too large), 1 for everything else.
int exit_code_for(Errc code);

/// SHA-1 of "blob <size>\0<bytes>", i.e. what `git hash-object` prints.
std::string git_blob_hash(const std::string& bytes);
/// Throws FileNotFound.
std::string file_content_hash(const std::filesystem::path& path);

struct DatasetSummary {
  std::size_t events = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  std::size_t class_counts[kNumClasses] = {};
};

DatasetSummary summarize_dataset(const std::vector<Cascade>& cascades);
std::string format_summary(const DatasetSummary& summary);

/// Entry point behind the `causalmamba` executable. `args` excludes the
/// program name. Commands: defaults, generate, train, eval, discover,
/// intervene, export. Returns the exit code; never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace causalmamba
