#include "qlab/probe.hpp"

#include "qlab/errors.hpp"
#include "qlab/semantics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace qlab {

using ojson = nlohmann::ordered_json;

std::string to_string(Gold g) {
  switch (g) {
    case Gold::yes: return "yes";
    case Gold::no: return "no";
    case Gold::unknown: return "unknown";
  }
  return "?";
}

Gold parse_gold(std::string_view s) {
  if (s == "yes") return Gold::yes;
  if (s == "no") return Gold::no;
  if (s == "unknown") return Gold::unknown;
  throw ProtocolViolation("gold label '" + std::string(s) + "'");
}

std::string to_string(Scheme s) {
  return s == Scheme::paper_counts ? "paper_counts" : "full_positions";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "paper_counts") return Scheme::paper_counts;
  if (s == "full_positions") return Scheme::full_positions;
  throw ConfigError("scheme '" + std::string(s) + "' (paper_counts | full_positions)");
}

namespace {

Gold gold_of(TruthVerdict v) {
  switch (v) {
    case TruthVerdict::holds: return Gold::yes;
    case TruthVerdict::fails: return Gold::no;
    case TruthVerdict::undetermined: return Gold::unknown;
  }
  return Gold::unknown;
}

}  // namespace

// ---- generation --------------------------------------------------------------

std::vector<ProbeCase> generate_dataset(const DatasetSpec& spec, const Vocabulary& vocab,
                                        const Limits& limits) {
  if (spec.min_size == 0 || spec.min_size > spec.max_size)
    throw ConfigError("size range " + std::to_string(spec.min_size) + ".." +
                      std::to_string(spec.max_size));
  const auto& nouns = vocab.constants();
  if (spec.max_size > nouns.size() && vocab.indexed_prefix().empty())
    throw SizeLimitExceeded("size " + std::to_string(spec.max_size) + " needs more than " +
                            std::to_string(nouns.size()) + " objects");
  if (spec.max_size > limits.max_strings) throw SizeLimitExceeded("size above cap");
  if (!vocab.has_predicate(spec.colour))
    throw UnknownSymbol("predicate '" + spec.colour + "'");
  std::vector<std::string> rivals;
  for (const auto& p : vocab.predicates())
    if (vocab.exclusive(spec.colour, p)) rivals.push_back(p);
  if (rivals.empty())
    throw InvalidVocabulary("'" + spec.colour + "' is exclusive with no other predicate");

  const Sentence question{Quantifier::forall, spec.colour, Polarity::positive};
  const std::string question_text = "Is everything " + spec.colour + "?";
  std::mt19937_64 rng(spec.seed);

  std::vector<ProbeCase> out;
  auto emit = [&](std::string id, std::string family, std::vector<Literal> lits,
                  std::optional<std::size_t> position) {
    const AtomicDiagram d(std::move(lits));
    ProbeCase c;
    c.id = std::move(id);
    c.context = render_natural(d, vocab);
    c.question = question_text;
    c.object_count = d.size();
    c.gold = gold_of(judge(d, question, vocab));
    c.inconsistency_position = position;
    c.family = std::move(family);
    out.push_back(std::move(c));
  };

  for (std::size_t n = spec.min_size; n <= spec.max_size; ++n) {
    std::vector<Literal> base;
    for (std::size_t i = 0; i < n; ++i)
      base.push_back({spec.colour, vocab.object(i), Polarity::positive});
    emit("n" + std::to_string(n) + "-consistent", "consistent", base, std::nullopt);

    std::size_t first = 1;
    if (spec.scheme == Scheme::paper_counts && n == 2) first = 2;
    for (std::size_t p = first; p <= n; ++p) {
      auto lits = base;
      lits[p - 1].predicate = rivals[rng() % rivals.size()];
      emit("n" + std::to_string(n) + "-p" + std::to_string(p), "inconsistent", std::move(lits),
           p);
    }
  }
  if (spec.underspecified) {
    const std::string noun = vocab.has_constant("heart") ? "heart" : vocab.object(0);
    const std::string attr = vocab.has_predicate("large") ? "large" : "";
    if (attr.empty()) throw InvalidVocabulary("underspecified cases need a 'large' predicate");
    emit("u1", "underspecified", {{attr, noun, Polarity::positive}}, std::nullopt);
  }
  return out;
}

void write_cases(std::ostream& out, std::span<const ProbeCase> cases) {
  for (const auto& c : cases) {
    ojson j;
    j["id"] = c.id;
    j["context"] = c.context;
    j["question"] = c.question;
    j["object_count"] = c.object_count;
    j["gold"] = to_string(c.gold);
    j["inconsistency_position"] =
        c.inconsistency_position ? ojson(*c.inconsistency_position) : ojson(nullptr);
    j["family"] = c.family;
    out << j.dump() << '\n';
  }
}

namespace {

template <typename F>
void for_each_record(std::istream& in, const char* what, F&& f) {
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolViolation(std::string(what) + " line " + std::to_string(line_no) + ": " +
                              e.what());
    }
  }
}

}  // namespace

std::vector<ProbeCase> read_cases(std::istream& in) {
  std::vector<ProbeCase> out;
  for_each_record(in, "case", [&](const nlohmann::json& j) {
    ProbeCase c;
    c.id = j.at("id").get<std::string>();
    c.context = j.at("context").get<std::string>();
    c.question = j.at("question").get<std::string>();
    c.object_count = j.at("object_count").get<std::size_t>();
    c.gold = parse_gold(j.at("gold").get<std::string>());
    if (j.contains("inconsistency_position") && !j["inconsistency_position"].is_null())
      c.inconsistency_position = j["inconsistency_position"].get<std::size_t>();
    c.family = j.value("family", std::string(c.inconsistency_position ? "inconsistent"
                                                                      : "consistent"));
    out.push_back(std::move(c));
  });
  return out;
}

// ---- responses -------------------------------------------------------------

std::string to_string(Answer a) {
  switch (a) {
    case Answer::yes: return "yes";
    case Answer::no: return "no";
    case Answer::unknown: return "unknown";
    case Answer::unparseable: return "unparseable";
  }
  return "?";
}

Answer normalize_answer(std::string_view raw) {
  std::size_t i = 0;
  while (i < raw.size() && (std::isspace(static_cast<unsigned char>(raw[i])) ||
                            std::ispunct(static_cast<unsigned char>(raw[i]))))
    ++i;
  std::string word;
  while (i < raw.size() && std::isalnum(static_cast<unsigned char>(raw[i])))
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i++])));
  if (word == "yes") return Answer::yes;
  if (word == "no") return Answer::no;
  if (word == "unknown") return Answer::unknown;
  return Answer::unparseable;
}

void write_responses(std::ostream& out, std::span<const ProbeResponse> responses) {
  for (const auto& r : responses) {
    ojson j;
    j["id"] = r.id;
    j["answer"] = r.raw;
    j["normalized"] = to_string(r.normalized);
    out << j.dump() << '\n';
  }
}

std::vector<ProbeResponse> read_responses(std::istream& in) {
  std::vector<ProbeResponse> out;
  for_each_record(in, "response", [&](const nlohmann::json& j) {
    ProbeResponse r;
    r.id = j.at("id").get<std::string>();
    r.raw = j.at("answer").get<std::string>();
    r.normalized = normalize_answer(r.raw);
    out.push_back(std::move(r));
  });
  return out;
}

// ---- scoring -----------------------------------------------------------------

std::string Tally::str() const { return std::to_string(passed) + "/" + std::to_string(total); }

Tally Tally::parse(std::string_view s) {
  const auto slash = s.find('/');
  auto digits = [](std::string_view t) {
    return !t.empty() && std::all_of(t.begin(), t.end(),
                                     [](unsigned char c) { return std::isdigit(c) != 0; });
  };
  if (slash == std::string_view::npos || !digits(s.substr(0, slash)) ||
      !digits(s.substr(slash + 1)))
    throw MalformedReport("fraction '" + std::string(s) + "'");
  Tally t{std::stoull(std::string(s.substr(0, slash))),
          std::stoull(std::string(s.substr(slash + 1)))};
  if (t.passed > t.total) throw MalformedReport("numerator above denominator in '" + t.str() + "'");
  return t;
}

ProbeReport score(std::span<const ProbeCase> cases, std::span<const ProbeResponse> responses) {
  std::map<std::string, const ProbeResponse*> by_id;
  for (const auto& r : responses)
    if (!by_id.emplace(r.id, &r).second) throw DuplicateResponse("case '" + r.id + "'");
  std::set<std::string> case_ids;
  for (const auto& c : cases) case_ids.insert(c.id);
  for (const auto& [id, r] : by_id)
    if (!case_ids.count(id)) throw ProtocolViolation("response for unknown case '" + id + "'");

  ProbeReport report;
  std::map<std::size_t, Tally> sizes;
  std::map<std::pair<std::size_t, std::size_t>, Tally> positions;
  for (const auto& c : cases) {
    const auto it = by_id.find(c.id);
    if (it == by_id.end()) throw MissingResponse("case '" + c.id + "'");
    const Answer a = it->second->normalized;
    if (a == Answer::unparseable) ++report.unparseable;
    const bool correct = (a == Answer::yes && c.gold == Gold::yes) ||
                         (a == Answer::no && c.gold == Gold::no) ||
                         (a == Answer::unknown && c.gold == Gold::unknown);
    Tally* slot = nullptr;
    if (c.family == "underspecified") {
      slot = &report.underspecified;
    } else if (c.inconsistency_position) {
      slot = &sizes[c.object_count];
      auto& pos = positions[{c.object_count, *c.inconsistency_position}];
      ++pos.total;
      if (correct) ++pos.passed;
    } else {
      slot = &report.consistent;
    }
    ++slot->total;
    if (correct) ++slot->passed;
  }
  for (const auto& [n, t] : sizes) report.inconsistent.push_back({n, t});
  for (const auto& [key, t] : positions) report.positions.push_back({key.first, key.second, t});
  return report;
}

std::string report_to_json(const ProbeReport& r) {
  ojson j;
  j["inconsistent"] = ojson::array();
  for (const auto& row : r.inconsistent)
    j["inconsistent"].push_back({{"object_count", row.object_count}, {"pass", row.pass.str()}});
  j["consistent"] = r.consistent.str();
  j["underspecified"] = r.underspecified.str();
  j["positions"] = ojson::array();
  for (const auto& row : r.positions)
    j["positions"].push_back({{"object_count", row.object_count},
                              {"position", row.position},
                              {"pass", row.pass.str()}});
  j["unparseable"] = r.unparseable;
  return j.dump(2) + "\n";
}

ProbeReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (!j.is_object()) throw MalformedReport("report is not an object");
    ProbeReport r;
    for (const auto& row : j.at("inconsistent"))
      r.inconsistent.push_back(
          {row.at("object_count").get<std::size_t>(), Tally::parse(row.at("pass").get<std::string>())});
    r.consistent = Tally::parse(j.value("consistent", std::string("0/0")));
    r.underspecified = Tally::parse(j.value("underspecified", std::string("0/0")));
    if (j.contains("positions"))
      for (const auto& row : j["positions"])
        r.positions.push_back({row.at("object_count").get<std::size_t>(),
                               row.at("position").get<std::size_t>(),
                               Tally::parse(row.at("pass").get<std::string>())});
    r.unparseable = j.value("unparseable", std::uint64_t{0});
    std::sort(r.inconsistent.begin(), r.inconsistent.end(),
              [](const auto& a, const auto& b) { return a.object_count < b.object_count; });
    for (std::size_t i = 1; i < r.inconsistent.size(); ++i)
      if (r.inconsistent[i].object_count == r.inconsistent[i - 1].object_count)
        throw MalformedReport("object count " + std::to_string(r.inconsistent[i].object_count) +
                              " listed twice");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedReport(e.what());
  }
}

std::string render_report_tsv(const ProbeReport& r) {
  std::string out = "Object Count\tPass Fraction\n";
  for (const auto& row : r.inconsistent)
    out += std::to_string(row.object_count) + "\t" + row.pass.str() + "\n";
  return out;
}

std::string render_report_text(const ProbeReport& r) {
  const std::string h1 = "Object Count", h2 = "Pass Fraction";
  std::size_t w2 = h2.size();
  for (const auto& row : r.inconsistent) w2 = std::max(w2, row.pass.str().size());
  std::ostringstream out;
  auto line = [&](const std::string& a, const std::string& b) {
    out << std::string(h1.size() - std::min(h1.size(), a.size()), ' ') << a << " | " << b
        << '\n';
  };
  line(h1, h2);
  out << std::string(h1.size(), '-') << "-+-" << std::string(w2, '-') << '\n';
  for (const auto& row : r.inconsistent) line(std::to_string(row.object_count), row.pass.str());
  if (r.consistent.total) out << "\nConsistent accuracy: " << r.consistent.str() << '\n';
  if (r.underspecified.total)
    out << "Underspecified accuracy: " << r.underspecified.str() << '\n';
  if (r.unparseable) out << "Unparseable answers: " << r.unparseable << '\n';
  return out.str();
}

// ---- stubs -------------------------------------------------------------------

StubSpec StubSpec::parse(std::string_view s) {
  if (s == "oracle") return {StubKind::oracle, 0};
  if (s == "always_yes") return {StubKind::always_yes, 0};
  if (s == "bag" || s == "bag_of_words") return {StubKind::bag_of_words, 0};
  for (std::string_view prefix : {"window:", "window_"}) {
    if (s.starts_with(prefix)) {
      const auto num = s.substr(prefix.size());
      if (!num.empty() && std::all_of(num.begin(), num.end(),
                                      [](unsigned char c) { return std::isdigit(c) != 0; }))
        return {StubKind::window, std::stoul(std::string(num))};
    }
  }
  throw ConfigError("stub '" + std::string(s) +
                    "' (oracle | window:K | bag_of_words | always_yes)");
}

std::string StubSpec::str() const {
  switch (kind) {
    case StubKind::oracle: return "oracle";
    case StubKind::window: return "window:" + std::to_string(k);
    case StubKind::bag_of_words: return "bag_of_words";
    case StubKind::always_yes: return "always_yes";
  }
  return "?";
}

std::string builtin_stub(const StubSpec& stub) { return "stub:" + stub.str(); }

std::string stub_answer(const StubSpec& stub, const std::string& context,
                        const std::string& question, const Vocabulary& vocab) {
  if (stub.kind == StubKind::always_yes) return "yes";
  try {
    const auto phi = parse_sentence(question, vocab);
    if (stub.kind == StubKind::bag_of_words) {
      std::string cleaned;
      for (char ch : context)
        cleaned += std::isalnum(static_cast<unsigned char>(ch))
                       ? static_cast<char>(std::tolower(static_cast<unsigned char>(ch)))
                       : ' ';
      std::istringstream words(cleaned);
      for (std::string w; words >> w;)
        if (w == "not" || vocab.exclusive(phi.predicate, w)) return "no";
      return "yes";
    }
    auto d = parse_model_string(context, vocab);
    if (stub.kind == StubKind::window) d = d.prefix(stub.k);
    return to_string(gold_of(judge(d, phi, vocab)));
  } catch (const Error&) {
    return "unknown";
  }
}

bool serve_stub(const StubSpec& stub, std::istream& in, std::ostream& out,
                const Vocabulary& vocab) {
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        !j.contains("context") || !j["context"].is_string() || !j.contains("question") ||
        !j["question"].is_string())
      return false;
    ojson reply;
    reply["id"] = j["id"];
    reply["answer"] = stub_answer(stub, j["context"], j["question"], vocab);
    out << reply.dump() << '\n' << std::flush;
  }
  return true;
}

}  // namespace qlab
