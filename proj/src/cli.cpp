#include "qlab/cli.hpp"

#include "qlab/borel.hpp"
#include "qlab/errors.hpp"
#include "qlab/probe.hpp"
#include "qlab/semantics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qlab {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---- configuration ---------------------------------------------------------

namespace {

template <typename T>
void read_field(const nlohmann::json& obj, const char* key, T& into, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
      throw ConfigError("unknown key '" + where + "." + k + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  reject_unknown(doc, {"vocabulary", "caps", "experiment", "dataset", "adapter", "output"},
                 "config");
  RunConfig c;
  if (doc.contains("vocabulary")) {
    const auto& v = doc["vocabulary"];
    if (v.is_string()) {
      c.vocabulary = v.get<std::string>();
    } else {
      reject_unknown(v, {"constants", "predicates", "groups", "indexed_prefix"}, "vocabulary");
      VocabularySpec spec;
      read_field(v, "constants", spec.constants, "vocabulary");
      read_field(v, "predicates", spec.predicates, "vocabulary");
      read_field(v, "groups", spec.groups, "vocabulary");
      read_field(v, "indexed_prefix", spec.indexed_prefix, "vocabulary");
      c.custom_vocabulary = std::move(spec);
      c.vocabulary = "custom";
    }
  }
  if (doc.contains("caps")) {
    reject_unknown(doc["caps"], {"max_strings"}, "caps");
    read_field(doc["caps"], "max_strings", c.limits.max_strings, "caps");
  }
  if (doc.contains("experiment")) {
    const auto& e = doc["experiment"];
    reject_unknown(e,
                   {"alpha", "train_lengths", "test_length", "horizon", "seed", "target", "model",
                    "max_k", "n", "m", "samples", "max_length", "vc_cap", "universe_length"},
                   "experiment");
    read_field(e, "alpha", c.alpha, "experiment");
    if (e.contains("train_lengths") && e["train_lengths"].is_string())
      c.train_lengths = parse_length_list(e["train_lengths"].get<std::string>());
    else
      read_field(e, "train_lengths", c.train_lengths, "experiment");
    read_field(e, "test_length", c.test_length, "experiment");
    read_field(e, "horizon", c.horizon, "experiment");
    read_field(e, "seed", c.seed, "experiment");
    read_field(e, "target", c.target, "experiment");
    read_field(e, "model", c.model, "experiment");
    read_field(e, "max_k", c.max_k, "experiment");
    read_field(e, "n", c.n, "experiment");
    read_field(e, "m", c.m, "experiment");
    read_field(e, "samples", c.samples, "experiment");
    read_field(e, "max_length", c.max_length, "experiment");
    read_field(e, "vc_cap", c.vc_cap, "experiment");
    read_field(e, "universe_length", c.universe_length, "experiment");
  }
  if (doc.contains("dataset")) {
    const auto& d = doc["dataset"];
    reject_unknown(d, {"min_size", "max_size", "scheme", "underspecified", "colour", "seed"},
                   "dataset");
    read_field(d, "min_size", c.min_size, "dataset");
    read_field(d, "max_size", c.max_size, "dataset");
    read_field(d, "scheme", c.scheme, "dataset");
    read_field(d, "underspecified", c.underspecified, "dataset");
    read_field(d, "colour", c.colour, "dataset");
    read_field(d, "seed", c.seed, "dataset");
  }
  if (doc.contains("adapter")) {
    const auto& a = doc["adapter"];
    reject_unknown(a, {"endpoint", "timeout_ms", "retries", "concurrency"}, "adapter");
    read_field(a, "endpoint", c.endpoint, "adapter");
    read_field(a, "timeout_ms", c.timeout_ms, "adapter");
    read_field(a, "retries", c.retries, "adapter");
    read_field(a, "concurrency", c.concurrency, "adapter");
  }
  if (doc.contains("output")) {
    reject_unknown(doc["output"], {"dir"}, "output");
    read_field(doc["output"], "dir", c.output_dir, "output");
  }
  c.validate();
  return c;
}

std::string RunConfig::to_json_text() const {
  ojson j;
  if (custom_vocabulary) {
    j["vocabulary"] = {{"constants", custom_vocabulary->constants},
                       {"predicates", custom_vocabulary->predicates},
                       {"groups", custom_vocabulary->groups},
                       {"indexed_prefix", custom_vocabulary->indexed_prefix}};
  } else {
    j["vocabulary"] = vocabulary;
  }
  j["caps"] = {{"max_strings", limits.max_strings}};
  j["experiment"] = {{"alpha", alpha},         {"train_lengths", train_lengths},
                     {"test_length", test_length}, {"horizon", horizon},
                     {"seed", seed},           {"target", target},
                     {"model", model},         {"max_k", max_k},
                     {"n", n},                 {"m", m},
                     {"samples", samples},     {"max_length", max_length},
                     {"vc_cap", vc_cap},       {"universe_length", universe_length}};
  j["dataset"] = {{"min_size", min_size},
                  {"max_size", max_size},
                  {"scheme", scheme},
                  {"underspecified", underspecified},
                  {"colour", colour}};
  j["adapter"] = {{"endpoint", endpoint},
                  {"timeout_ms", timeout_ms},
                  {"retries", retries},
                  {"concurrency", concurrency}};
  j["output"] = {{"dir", output_dir}};
  return j.dump();
}

void RunConfig::validate() const {
  if (limits.max_strings == 0) throw ConfigError("caps.max_strings must be positive");
  if (vc_cap == 0) throw ConfigError("experiment.vc_cap must be positive");
  if (concurrency == 0) throw ConfigError("adapter.concurrency must be positive");
  try {
    alpha_value();
  } catch (const InvalidProbability& e) {
    throw ConfigError(std::string("experiment.alpha: ") + e.what());
  }
  parse_scheme(scheme);
  if (min_size == 0 || min_size > max_size) throw ConfigError("dataset size range is empty");
}

Vocabulary RunConfig::make_vocabulary() const {
  if (custom_vocabulary)
    return Vocabulary(custom_vocabulary->constants, custom_vocabulary->predicates,
                      custom_vocabulary->groups, custom_vocabulary->indexed_prefix);
  if (vocabulary == "L") return Vocabulary::language_l();
  if (vocabulary == "L+") return Vocabulary::language_l_plus();
  if (vocabulary == "colors") return Vocabulary::colors();
  throw ConfigError("vocabulary '" + vocabulary + "' (L | L+ | colors | object)");
}

ExactProb RunConfig::alpha_value() const { return ExactProb::parse(alpha); }

RunConfig load_config(const std::string& path) { return RunConfig::from_json_text(read_file(path)); }

std::vector<std::size_t> parse_length_list(const std::string& text) {
  auto number = [&](const std::string& s) -> std::size_t {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw ConfigError("length list '" + text + "'");
    return std::stoul(s);
  };
  std::vector<std::size_t> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto a = number(text.substr(0, dots)), b = number(text.substr(dots + 2));
    if (a > b) throw ConfigError("empty range '" + text + "'");
    for (auto i = a; i <= b; ++i) out.push_back(i);
    return out;
  }
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, ',');) out.push_back(number(part));
  if (out.empty()) throw ConfigError("empty length list");
  return out;
}

HypothesisDescriptor parse_target(const std::string& text) {
  const auto good = binary_good();
  auto suffix_number = [&](const std::string& prefix) -> std::optional<std::size_t> {
    if (!text.starts_with(prefix)) return std::nullopt;
    return parse_length_list(text.substr(prefix.size())).front();
  };
  if (text == "universal") return HypothesisDescriptor::universal(good);
  if (text == "existential") return HypothesisDescriptor::existential(good);
  if (text == "full") return HypothesisDescriptor::clopen(ClopenSet::full(2), "full");
  if (auto k = suffix_number("first_")) return HypothesisDescriptor::first_k(good, *k);
  if (auto k = suffix_number("count_at_least_"))
    return HypothesisDescriptor::count_at_least(good, *k);
  if (text.starts_with("positions_")) {
    std::set<std::size_t> positions;
    std::string rest = text.substr(10);
    std::replace(rest.begin(), rest.end(), '_', ',');
    for (auto p : parse_length_list(rest)) positions.insert(p);
    return HypothesisDescriptor::position_set(good, positions);
  }
  if (text.starts_with("clopen:")) {
    std::set<Word> prefixes;
    std::istringstream in(text.substr(7));
    const auto alphabet = Alphabet::binary();
    for (std::string part; std::getline(in, part, '|');) {
      Word w;
      std::istringstream letters(part);
      for (std::string l; letters >> l;) {
        const auto letter = alphabet.find(l);
        if (!letter) throw ConfigError("unknown letter '" + l + "' in target '" + text + "'");
        w.push_back(*letter);
      }
      prefixes.insert(std::move(w));
    }
    return HypothesisDescriptor::clopen(ClopenSet(PrefixSet(2, prefixes)), text);
  }
  throw ConfigError("target '" + text + "'");
}

ConditionalModel parse_model(const std::string& text) {
  if (text == "uniform") return ConditionalModel::uniform(Alphabet::binary());
  if (text.starts_with("coin:")) return ConditionalModel::biased_coin(parse_rational(text.substr(5)));
  if (text.starts_with("table:")) {
    std::ifstream in(text.substr(6));
    if (!in) throw ConfigError("cannot read model table '" + text.substr(6) + "'");
    return ConditionalModel::load_table(in);
  }
  throw ConfigError("model '" + text + "' (uniform | coin:<p> | table:<path>)");
}

// ---- subcommands -------------------------------------------------------------

namespace {

struct Context {
  RunConfig config;
  std::ostream& out;
  std::ostream& err;
};

void emit(Context& ctx, const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    ctx.out << content;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << content;
}

Word parse_word(const std::string& text, const Alphabet& alphabet) {
  Word w;
  std::istringstream in(text);
  for (std::string l; in >> l;) {
    const auto letter = alphabet.find(l);
    if (!letter) throw UnknownSymbol("letter '" + l + "'");
    w.push_back(*letter);
  }
  return w;
}

ojson witness_json(const Witness& w, const Alphabet& a) {
  return {{"m", w.extension},
          {"string", render_word(w.string, a)},
          {"length", w.length},
          {"value", w.value.str()},
          {"member", w.member}};
}

std::string learn_effective(const RunConfig& c) {
  const auto model = parse_model(c.model);
  const auto target = parse_target(c.target);
  LearningConfig lc{c.alpha_value(), c.train_lengths, c.test_length, c.horizon, c.limits};
  const auto run = effective_learning_test(target, default_family(binary_good(), c.max_k), model, lc);
  ojson j;
  j["experiment"] = "effective";
  j["target"] = run.target;
  j["alpha"] = run.alpha.str();
  j["train_lengths"] = run.train_lengths;
  j["test_length"] = run.test_length;
  j["windowed"] = run.windowed;
  j["posterior"] = ojson::array();
  for (const auto& snap : run.snapshots) {
    ojson weights;
    for (std::size_t i = 0; i < snap.posterior.size(); ++i)
      weights[snap.posterior.names[i]] = snap.posterior.weights[i].str();
    j["posterior"].push_back({{"length", snap.length}, {"weights", weights}});
  }
  j["map_hypotheses"] = run.map_hypotheses;
  j["member_min"] = run.member_min ? ojson(run.member_min->str()) : ojson(nullptr);
  j["nonmember_max"] = run.nonmember_max ? ojson(run.nonmember_max->str()) : ojson(nullptr);
  j["separated"] = run.separated;
  j["outcome"] = to_string(run.outcome);
  j["witness"] = run.witness ? witness_json(*run.witness, model.alphabet()) : ojson(nullptr);
  return j.dump(2) + "\n";
}

std::string learn_witness(const RunConfig& c) {
  const auto model = parse_model(c.model);
  const auto r = witness_search_univ(model, c.alpha_value(), c.n, c.horizon, binary_good(), c.limits);
  ojson j;
  j["experiment"] = "witness";
  j["alpha"] = c.alpha;
  j["n"] = c.n;
  j["horizon"] = c.horizon;
  j["monotone_verified"] = r.monotone_verified;
  j["witness"] = r.witness ? witness_json(*r.witness, model.alphabet()) : ojson(nullptr);
  return j.dump(2) + "\n";
}

std::string learn_dilution(const RunConfig& c) {
  ojson j;
  j["experiment"] = "dilution";
  j["rows"] = ojson::array();
  bool all = true;
  for (std::size_t n = 0; n <= c.n; ++n)
    for (std::size_t m = 0; m <= c.m; ++m) {
      const auto r = dilution_experiment(n, m, 2, c.limits);
      all = all && r.equal && r.cardinality_holds;
      j["rows"].push_back({{"n", n},
                           {"m", m},
                           {"family_n", r.family_size_n},
                           {"family_nm", r.family_size_nm},
                           {"mu_n", r.mu_n.str()},
                           {"counted", r.counted.str()},
                           {"formula", r.formula.str()},
                           {"factor", to_string(r.factor)},
                           {"equal", r.equal}});
    }
  j["all_equal"] = all;
  return j.dump(2) + "\n";
}

std::string learn_compactness(const RunConfig& c) {
  const auto good = binary_good();
  const auto samples = sample_violating_strings(c.seed, c.samples, c.max_length, good);
  const auto r = compactness_check(universal_family(good), good, samples, c.limits);
  ojson j;
  j["experiment"] = "compactness";
  j["seed"] = c.seed;
  j["total"] = r.total;
  j["matches"] = r.matches;
  j["mismatches"] = ojson::array();
  for (const auto& m : r.mismatches)
    j["mismatches"].push_back({{"string", render_word(m.string, Alphabet::binary())},
                               {"expected", m.expected},
                               {"observed", m.observed}});
  return j.dump(2) + "\n";
}

std::string learn_vc(const RunConfig& c) {
  const auto universe = enumerate_words(2, c.universe_length, c.limits);
  std::vector<Membership> family;
  for (std::size_t k = 1; k <= c.max_k; ++k)
    family.push_back(HypothesisDescriptor::first_k(binary_good(), k).indexed().contains);
  const auto r = vc_dimension_bruteforce(family, universe, c.vc_cap);
  ojson j;
  j["experiment"] = "vc";
  j["family"] = "first_1..first_" + std::to_string(c.max_k);
  j["universe_length"] = c.universe_length;
  j["dimension"] = r.dimension;
  j["witness"] = ojson::array();
  for (const auto& w : r.witness) j["witness"].push_back(render_word(w, Alphabet::binary()));
  j["subsets_examined"] = r.subsets_examined;
  return j.dump(2) + "\n";
}

std::string learn_word_order() {
  const auto target = negation_pairing_target();
  ojson j;
  j["experiment"] = "word-order";
  j["scorers"] = ojson::array();
  for (auto s : {Scorer::order_sensitive, Scorer::bag_of_words}) {
    const auto r = word_order_experiment(target, s);
    auto join = [](const TokenString& t) {
      std::string out;
      for (const auto& w : t.tokens) out += (out.empty() ? "" : " ") + w;
      return out;
    };
    j["scorers"].push_back({{"scorer", to_string(s)},
                            {"member", join(r.member)},
                            {"permuted", join(r.permuted)},
                            {"member_score", to_string(r.member_score)},
                            {"permuted_score", to_string(r.permuted_score)},
                            {"separated", r.separated}});
  }
  return j.dump(2) + "\n";
}

std::string learn_nondegenerate(const RunConfig& c) {
  const auto model = parse_model(c.model);
  std::vector<IndexedHypothesis> hyps;
  for (const auto& h : default_family(binary_good(), c.max_k)) hyps.push_back(h.indexed());
  const std::vector<ExactProb> grid{ExactProb(1, 2), ExactProb(1, 4), ExactProb(1, 8)};
  const auto r = check_nondegenerate(model, hyps, c.n, grid, c.horizon, c.limits);
  ojson j;
  j["experiment"] = "nondegenerate";
  j["n"] = r.n;
  j["horizon"] = r.horizon;
  j["monotone"] = r.monotone();
  j["hypotheses"] = ojson::array();
  for (const auto& h : r.hypotheses) {
    ojson drops = ojson::array();
    for (const auto& d : h.drops)
      drops.push_back({{"delta", d.delta.str()}, {"m", d.m ? ojson(*d.m) : ojson(nullptr)}});
    j["hypotheses"].push_back({{"name", h.name}, {"monotone", h.monotone}, {"drops", drops}});
  }
  return j.dump(2) + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantifier semantics, learnability experiments and consistency probes", "qlab"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (default: $QLAB_CONFIG)");

  // shared overrides
  std::string vocabulary, alpha, target, model, scheme, colour, endpoint, output_dir, sizes,
      train_lengths;
  std::uint64_t seed = 0, max_strings = 0, timeout_ms = 0, vc_cap = 0;
  std::size_t test_length = 0, horizon = 0, max_k = 0, n = 0, m = 0, samples = 0, max_length = 0,
              universe_length = 0;
  unsigned retries = 0, concurrency = 0;
  bool underspecified = false;
  std::vector<CLI::Option*> opts;
  auto opt = [&](CLI::App* sub, const std::string& name, auto& var, const std::string& help) {
    opts.push_back(sub->add_option(name, var, help));
    return opts.back();
  };
  auto add_common = [&](CLI::App* sub) {
    opt(sub, "--vocabulary", vocabulary, "L | L+ | colors");
    opt(sub, "--max-strings", max_strings, "enumeration cap");
    opt(sub, "--seed", seed, "seed for sampled runs");
  };

  std::string output, sentence, question, conclusion, families, family, prefix, external,
      input, tsv, kind, dataset, experiment = "effective", format = "text";
  std::vector<std::string> premises;
  std::size_t length = 0, stage_n = 0;
  std::optional<std::uint16_t> listen;
  std::size_t max_connections = 0;
  bool strict = false, include_empty = false;

  auto* gen = app.add_subcommand("gen", "Generate a probe dataset or a continuation set");
  add_common(gen);
  opt(gen, "--sizes", sizes, "object counts, a..b");
  opt(gen, "--scheme", scheme, "paper_counts | full_positions");
  opts.push_back(gen->add_flag("--underspecified", underspecified, "add the gold-unknown case"));
  opt(gen, "--colour", colour, "colour asked about");
  gen->add_option("--sentence", sentence, "write the continuation set of this sentence");
  gen->add_option("--length", length, "continuation set length");
  gen->add_option("-o,--output", output, "output file (default stdout)");

  auto* check = app.add_subcommand("check", "Judge a sentence on a model string");
  add_common(check);
  std::string context;
  check->add_option("context", context, "model string")->required();
  check->add_option("--question,-q", question, "sentence or question")->required();
  check->add_flag("--strict", strict, "fail on objects the string leaves open");

  auto* entail = app.add_subcommand("entail", "Finite-domain semantic consequence");
  add_common(entail);
  entail->add_option("--premise,-p", premises, "premise sentence (repeatable)");
  entail->add_option("--conclusion,-c", conclusion, "conclusion sentence")->required();
  entail->add_option("--max-length", length, "largest domain size checked")->required();
  entail->add_flag("--include-empty", include_empty, "also check the empty domain");

  auto* borel = app.add_subcommand("borel", "Classify concepts and inspect stage families");
  add_common(borel);
  borel->add_option("--sentence", sentence, "quantified sentence");
  borel->add_option("--external", external, "registered external concept");
  borel->add_option("--families", families, "family JSON config");
  borel->add_option("--family", family, "family name from --families");
  borel->add_option("--stage", stage_n, "print the words of stage N");
  borel->add_option("--prefix", prefix, "letters of a finite prefix");

  auto* learn = app.add_subcommand("learn", "Learnability experiments");
  add_common(learn);
  learn->add_option("--experiment", experiment,
                    "effective | witness | dilution | compactness | vc | word-order | nondegenerate");
  opt(learn, "--target", target, "learning target");
  opt(learn, "--alpha", alpha, "threshold, a rational in [0,1]");
  opt(learn, "--train-lengths", train_lengths, "a..b or a,b,c");
  opt(learn, "--test-length", test_length, "test length");
  opt(learn, "--horizon", horizon, "extension horizon");
  opt(learn, "--model", model, "uniform | coin:<p> | table:<path>");
  opt(learn, "--max-k", max_k, "largest k in the default family");
  opt(learn, "-n", n, "base length");
  opt(learn, "-m", m, "extension length");
  opt(learn, "--samples", samples, "compactness sample count");
  opt(learn, "--max-length", max_length, "compactness string length bound");
  opt(learn, "--universe-length", universe_length, "vc universe: all words of this length");
  opt(learn, "--vc-cap", vc_cap, "vc subset cap");
  learn->add_option("-o,--output", output, "output file (default stdout)");

  auto* probe = app.add_subcommand("probe", "Query an answerer and score it");
  add_common(probe);
  probe->add_option("--dataset", dataset, "dataset file (default: generate from config)");
  opt(probe, "--sizes", sizes, "object counts, a..b");
  opt(probe, "--scheme", scheme, "paper_counts | full_positions");
  opts.push_back(probe->add_flag("--underspecified", underspecified, "add the gold-unknown case"));
  opt(probe, "--colour", colour, "colour asked about");
  opt(probe, "--endpoint", endpoint, "stub:<kind> | command:<cmd> | tcp:<host>:<port>");
  opt(probe, "--timeout-ms", timeout_ms, "per-request timeout");
  opt(probe, "--retries", retries, "retries per request");
  opt(probe, "--concurrency", concurrency, "parallel connections");
  opt(probe, "--output-dir", output_dir, "artifact directory");

  auto* report = app.add_subcommand("report", "Render a report file");
  report->add_option("input", input, "report JSON")->required();
  report->add_option("--format", format, "text | tsv");
  report->add_option("--tsv", tsv, "also write the tab-separated table here");

  auto* stub = app.add_subcommand("stub", "Serve a built-in answerer over the wire protocol");
  add_common(stub);
  stub->add_option("--kind", kind, "oracle | window:K | bag_of_words | always_yes")->required();
  stub->add_option("--listen", listen, "serve on 127.0.0.1:PORT instead of stdio");
  stub->add_option("--max-connections", max_connections, "stop after N connections");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "qlab: error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (config_path.empty())
      if (const char* env = std::getenv("QLAB_CONFIG"); env && *env) config_path = env;
    Context ctx{config_path.empty() ? RunConfig{} : load_config(config_path), out, err};
    auto& c = ctx.config;
    auto set = [&](const std::string& name, auto apply) {
      for (auto* o : opts)
        if (o->count() > 0 && o->get_name() == name) {
          apply();
          return;
        }
    };
    set("--vocabulary", [&] {
      c.vocabulary = vocabulary;
      c.custom_vocabulary.reset();
    });
    set("--max-strings", [&] { c.limits.max_strings = max_strings; });
    set("--seed", [&] { c.seed = seed; });
    set("--scheme", [&] { c.scheme = scheme; });
    set("--underspecified", [&] { c.underspecified = underspecified; });
    set("--colour", [&] { c.colour = colour; });
    set("--sizes", [&] {
      const auto list = parse_length_list(sizes);
      c.min_size = list.front();
      c.max_size = list.back();
    });
    set("--target", [&] { c.target = target; });
    set("--alpha", [&] { c.alpha = alpha; });
    set("--train-lengths", [&] { c.train_lengths = parse_length_list(train_lengths); });
    set("--test-length", [&] { c.test_length = test_length; });
    set("--horizon", [&] { c.horizon = horizon; });
    set("--model", [&] { c.model = model; });
    set("--max-k", [&] { c.max_k = max_k; });
    set("-n", [&] { c.n = n; });
    set("-m", [&] { c.m = m; });
    set("--samples", [&] { c.samples = samples; });
    set("--max-length", [&] { c.max_length = max_length; });
    set("--universe-length", [&] { c.universe_length = universe_length; });
    set("--vc-cap", [&] { c.vc_cap = vc_cap; });
    set("--endpoint", [&] { c.endpoint = endpoint; });
    set("--timeout-ms", [&] { c.timeout_ms = timeout_ms; });
    set("--retries", [&] { c.retries = retries; });
    set("--concurrency", [&] { c.concurrency = concurrency; });
    set("--output-dir", [&] { c.output_dir = output_dir; });
    c.validate();
    err << "qlab: config " << c.to_json_text() << "\n";

    const auto vocab = c.make_vocabulary();

    if (gen->parsed()) {
      std::ostringstream buf;
      if (!sentence.empty()) {
        if (gen->count("--length") == 0) throw ConfigError("--sentence needs --length");
        const auto cs = continuation_set(parse_sentence(sentence, vocab), length, vocab, c.limits);
        write_continuation_set(buf, cs, vocab);
      } else {
        DatasetSpec spec{c.min_size, c.max_size, c.seed, parse_scheme(c.scheme), c.underspecified,
                         c.colour};
        write_cases(buf, generate_dataset(spec, vocab, c.limits));
      }
      emit(ctx, output, buf.str());
    } else if (check->parsed()) {
      const auto d = parse_model_string(context, vocab);
      const auto phi = parse_sentence(question, vocab);
      if (strict) {
        out << (satisfies(d, phi, vocab, Strictness::strict) ? "yes" : "no") << "\n";
      } else {
        const auto v = judge(d, phi, vocab);
        out << (v == TruthVerdict::holds ? "yes" : v == TruthVerdict::fails ? "no" : "unknown")
            << "\n";
      }
    } else if (entail->parsed()) {
      std::vector<Sentence> gamma;
      for (const auto& p : premises) gamma.push_back(parse_sentence(p, vocab));
      const auto r = semantic_consequence(gamma, parse_sentence(conclusion, vocab), length, vocab,
                                          c.limits, include_empty);
      out << "entailed: " << (r.holds ? "yes" : "no") << " (sizes "
          << (r.includes_empty ? 0 : 1) << ".." << r.up_to << ")\n";
      if (r.counterexample) {
        const auto d = vocab.decode(*r.counterexample);
        out << "counterexample: " << (d.empty() ? std::string("-") : render_formal(d)) << "\n";
      }
    } else if (borel->parsed()) {
      const ConceptRegistry registry;
      std::optional<BorelFamily> fam;
      if (!sentence.empty()) {
        const auto phi = parse_sentence(sentence, vocab);
        out << "level: " << to_string(classify(phi, vocab, registry)) << "\n";
        fam = sentence_family(phi, vocab);
      } else if (!external.empty()) {
        out << "level: " << to_string(classify(ExternalConcept{external}, vocab, registry))
            << "\n";
      } else if (!families.empty()) {
        if (family.empty()) throw ConfigError("--families needs --family");
        fam = FamilyRegistry::from_json_text(read_file(families), vocab).at(family);
        out << "kind: " << to_string(fam->kind) << "\n";
      } else {
        throw ConfigError("borel needs --sentence, --external or --families");
      }
      if (fam && borel->count("--stage")) {
        for (const auto& w : stage(*fam, stage_n, c.limits).stage_words(stage_n, c.limits))
          out << (w.empty() ? std::string("-") : render_word(w, vocab.alphabet())) << "\n";
      }
      if (fam && borel->count("--prefix")) {
        out << "membership: "
            << to_string(membership_at_stage(*fam, parse_word(prefix, vocab.alphabet()), c.limits))
            << "\n";
      }
    } else if (learn->parsed()) {
      std::string result;
      if (experiment == "effective") result = learn_effective(c);
      else if (experiment == "witness") result = learn_witness(c);
      else if (experiment == "dilution") result = learn_dilution(c);
      else if (experiment == "compactness") result = learn_compactness(c);
      else if (experiment == "vc") result = learn_vc(c);
      else if (experiment == "word-order") result = learn_word_order();
      else if (experiment == "nondegenerate") result = learn_nondegenerate(c);
      else throw ConfigError("experiment '" + experiment + "'");
      emit(ctx, output, result);
    } else if (probe->parsed()) {
      std::vector<ProbeCase> cases;
      const fs::path dir(c.output_dir);
      fs::create_directories(dir);
      if (!dataset.empty()) {
        std::ifstream in(dataset);
        if (!in) throw ConfigError("cannot read dataset '" + dataset + "'");
        cases = read_cases(in);
      } else {
        DatasetSpec spec{c.min_size, c.max_size, c.seed, parse_scheme(c.scheme), c.underspecified,
                         c.colour};
        cases = generate_dataset(spec, vocab, c.limits);
        std::ostringstream buf;
        write_cases(buf, cases);
        emit(ctx, (dir / "dataset.ndjson").string(), buf.str());
      }
      AdapterOptions ao{std::chrono::milliseconds(c.timeout_ms), c.retries, c.concurrency};
      const auto responses = run_adapter(cases, c.endpoint, ao, vocab);
      std::ostringstream rbuf;
      write_responses(rbuf, responses);
      emit(ctx, (dir / "responses.ndjson").string(), rbuf.str());
      const auto rep = score(cases, responses);
      emit(ctx, (dir / "report.json").string(), report_to_json(rep));
      emit(ctx, (dir / "report.tsv").string(), render_report_tsv(rep));
      emit(ctx, (dir / "report.txt").string(), render_report_text(rep));
      out << render_report_text(rep);
    } else if (report->parsed()) {
      std::ifstream in(input);
      if (!in) throw MalformedReport("cannot read '" + input + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      const auto rep = report_from_json(ss.str());
      if (format == "tsv") out << render_report_tsv(rep);
      else if (format == "text") out << render_report_text(rep);
      else throw ConfigError("format '" + format + "' (text | tsv)");
      if (!tsv.empty()) emit(ctx, tsv, render_report_tsv(rep));
    } else if (stub->parsed()) {
      const auto spec = StubSpec::parse(kind);
      if (listen) {
        serve_stub_tcp(spec, *listen, max_connections,
                       [&](std::uint16_t port) { err << "qlab: listening on 127.0.0.1:" << port << "\n" << std::flush; },
                       vocab);
      } else if (!serve_stub(spec, std::cin, out, vocab)) {
        throw ProtocolViolation("malformed request");
      }
    }
    return 0;
  } catch (const Error& e) {
    err << "qlab: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "qlab: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qlab
