#pragma once

// Consistency probes for yes/no answerers: dataset generation, a
// newline-delimited JSON adapter protocol, built-in stub answerers and
// pass-fraction reports.

#include "qlab/lang.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlab {

enum class Gold { yes, no, unknown };
std::string to_string(Gold g);
Gold parse_gold(std::string_view s);

struct ProbeCase {
  std::string id;
  std::string context;
  std::string question;
  std::size_t object_count = 0;
  Gold gold = Gold::yes;
  /// 1-based position of the object contradicting the question.
  std::optional<std::size_t> inconsistency_position;
  /// "consistent", "inconsistent" or "underspecified".
  std::string family;

  friend bool operator==(const ProbeCase&, const ProbeCase&) = default;
};

enum class Scheme { paper_counts, full_positions };
std::string to_string(Scheme s);
Scheme parse_scheme(std::string_view s);

struct DatasetSpec {
  std::size_t min_size = 2;
  std::size_t max_size = 10;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::paper_counts;
  /// Adds one case whose only object has no colour (gold unknown).
  bool underspecified = false;
  std::string colour = "blue";
};

/// Per size n: one consistent case, then the inconsistent cases in position
/// order. paper_counts has a single inconsistent case (position 2) at size 2
/// and one per position above; full_positions has one per position
/// everywhere. The contradicting colour of each case is drawn from the seed.
std::vector<ProbeCase> generate_dataset(const DatasetSpec& spec,
                                        const Vocabulary& vocab = Vocabulary::colors(),
                                        const Limits& limits = {});

void write_cases(std::ostream& out, std::span<const ProbeCase> cases);
std::vector<ProbeCase> read_cases(std::istream& in);

// ---- responses -------------------------------------------------------------

enum class Answer { yes, no, unknown, unparseable };
std::string to_string(Answer a);

/// Leading whitespace and punctuation dropped, then a case-insensitive
/// "yes", "no" or "unknown" that is not followed by a letter or digit.
Answer normalize_answer(std::string_view raw);

struct ProbeResponse {
  std::string id;
  std::string raw;
  Answer normalized = Answer::unparseable;
};

void write_responses(std::ostream& out, std::span<const ProbeResponse> responses);
std::vector<ProbeResponse> read_responses(std::istream& in);

// ---- scoring -----------------------------------------------------------------

/// An unreduced fraction k/n.
struct Tally {
  std::uint64_t passed = 0;
  std::uint64_t total = 0;
  std::string str() const;
  static Tally parse(std::string_view s);
  friend bool operator==(const Tally&, const Tally&) = default;
};

struct SizeRow {
  std::size_t object_count = 0;
  Tally pass;
  friend bool operator==(const SizeRow&, const SizeRow&) = default;
};

struct PositionRow {
  std::size_t object_count = 0;
  std::size_t position = 0;
  Tally pass;
  friend bool operator==(const PositionRow&, const PositionRow&) = default;
};

struct ProbeReport {
  /// Inconsistent cases answered "no", by object count, ascending.
  std::vector<SizeRow> inconsistent;
  Tally consistent;
  Tally underspecified;
  std::vector<PositionRow> positions;
  std::uint64_t unparseable = 0;
  friend bool operator==(const ProbeReport&, const ProbeReport&) = default;
};

ProbeReport score(std::span<const ProbeCase> cases, std::span<const ProbeResponse> responses);

std::string report_to_json(const ProbeReport& r);
/// MalformedReport on anything that is not a report.
ProbeReport report_from_json(const std::string& text);

/// "Object Count<TAB>Pass Fraction" then one row per size.
std::string render_report_tsv(const ProbeReport& r);
std::string render_report_text(const ProbeReport& r);

// ---- answerers -----------------------------------------------------------------

enum class StubKind { oracle, window, bag_of_words, always_yes };

struct StubSpec {
  StubKind kind = StubKind::oracle;
  std::size_t k = 0;  // window size

  /// "oracle", "window:K" (or "window_K"), "bag_of_words" (or "bag"),
  /// "always_yes".
  static StubSpec parse(std::string_view s);
  std::string str() const;
};

/// oracle judges the whole context, window the first k literals; both answer
/// "unknown" when the verdict is open. bag_of_words answers "no" iff the
/// context's word multiset holds "not" or a colour other than the
/// question's.
std::string stub_answer(const StubSpec& stub, const std::string& context,
                        const std::string& question,
                        const Vocabulary& vocab = Vocabulary::colors());

/// Endpoint address of an in-process stub: "stub:<spec>".
std::string builtin_stub(const StubSpec& stub);

/// Answers protocol requests from `in` until end of input. Returns false on a
/// malformed request (after replying nothing to it).
bool serve_stub(const StubSpec& stub, std::istream& in, std::ostream& out,
                const Vocabulary& vocab = Vocabulary::colors());

struct AdapterOptions {
  std::chrono::milliseconds timeout{10000};
  unsigned retries = 2;
  unsigned concurrency = 1;
};

/// Endpoints: "stub:<spec>", "command:<shell command>" (one process per
/// worker, requests on stdin, responses on stdout) and "tcp:<host>:<port>".
/// Responses come back in case order. A case still unanswered after the
/// retries is recorded as unparseable with empty raw text.
std::vector<ProbeResponse> run_adapter(std::span<const ProbeCase> cases,
                                       const std::string& endpoint,
                                       const AdapterOptions& options = {},
                                       const Vocabulary& vocab = Vocabulary::colors());

/// Serves the protocol on 127.0.0.1:port, one connection at a time, until
/// `max_connections` connections have been handled (0 = forever). `ready` is
/// called with the bound port once listening.
void serve_stub_tcp(const StubSpec& stub, std::uint16_t port, std::size_t max_connections,
                    const std::function<void(std::uint16_t)>& ready = {},
                    const Vocabulary& vocab = Vocabulary::colors());

}  // namespace qlab
