#pragma once

// Command-line front end: run configuration and subcommand dispatch.

#include "qlab/lang.hpp"
#include "qlab/learnlab.hpp"
#include "qlab/prob.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qlab {

struct VocabularySpec {
  std::vector<std::string> constants;
  std::vector<std::string> predicates;
  std::vector<std::vector<std::string>> groups;
  std::string indexed_prefix;
};

/// Everything a run reads. Loaded from one JSON file (docs/formats.md);
/// command-line flags override individual fields.
struct RunConfig {
  /// "L", "L+" or "colors", unless `custom_vocabulary` is set.
  std::string vocabulary = "colors";
  std::optional<VocabularySpec> custom_vocabulary;
  Limits limits;

  // learning experiments
  std::string alpha = "1/4";
  std::vector<std::size_t> train_lengths{1, 2, 3};
  std::size_t test_length = 6;
  std::size_t horizon = 10;
  std::uint64_t seed = 0;
  std::string target = "universal";
  std::string model = "uniform";
  std::size_t max_k = 4;
  std::size_t n = 1;
  std::size_t m = 3;
  std::size_t samples = 1000;
  std::size_t max_length = 20;
  std::uint64_t vc_cap = 1000000;
  std::size_t universe_length = 4;

  // probe dataset
  std::size_t min_size = 2;
  std::size_t max_size = 10;
  std::string scheme = "paper_counts";
  bool underspecified = false;
  std::string colour = "blue";

  // adapter
  std::string endpoint = "stub:oracle";
  std::uint64_t timeout_ms = 10000;
  unsigned retries = 2;
  unsigned concurrency = 1;

  std::string output_dir = ".";

  /// ConfigError on unknown keys, wrong types or invalid values.
  static RunConfig from_json_text(const std::string& text);
  /// Canonical single-line JSON of every field.
  std::string to_json_text() const;
  void validate() const;

  Vocabulary make_vocabulary() const;
  ExactProb alpha_value() const;
};

/// Reads `path`; ConfigError when missing or invalid.
RunConfig load_config(const std::string& path);

/// "a..b" inclusive, "a,b,c" or a single number.
std::vector<std::size_t> parse_length_list(const std::string& text);

/// Learning target over the binary alphabet {p, n}, p good: universal,
/// existential, full, first_K, count_at_least_K, positions_I_J...,
/// clopen:<prefix>|<prefix>... (letters space-separated).
HypothesisDescriptor parse_target(const std::string& text);

/// "uniform", "coin:<p>" or "table:<path>".
ConditionalModel parse_model(const std::string& text);

/// Runs one invocation (args exclude the program name). Diagnostics go to
/// `err`; the exit status is nonzero exactly when one was written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qlab
