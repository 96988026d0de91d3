// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "oracles.hpp"

#include "qlab/borel.hpp"
#include "qlab/cli.hpp"
#include "qlab/learnlab.hpp"
#include "qlab/probe.hpp"
#include "qlab/semantics.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace qlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int number, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " " << number << " " << title;
  if (!o.detail.empty()) std::cout << " (" << o.detail << ")";
  std::cout << "\n";
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto v = Vocabulary::language_l();
  const std::vector<Sentence> sentences{{Quantifier::forall, "blue", Polarity::positive},
                                        {Quantifier::exists, "blue", Polarity::positive},
                                        {Quantifier::forall, "blue", Polarity::negative},
                                        {Quantifier::exists, "blue", Polarity::negative}};
  std::uint64_t cases = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (const auto& d : enumerate_diagrams(n, v, {})) {
      ++cases;
      for (const auto& s : sentences)
        if (satisfies(d, s, v) != brute_force_oracle(d, s, v))
          return {false, "disagreement on " + render_formal(d)};
      if (satisfies(d, sentences[0], v) != oracle::single_predicate_truth(d, true) ||
          satisfies(d, sentences[1], v) != oracle::single_predicate_truth(d, false))
        return {false, "reference disagreement on " + render_formal(d)};
    }
  }
  const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream msg;
  msg << cases << " diagrams, " << secs << " s";
  return {secs < 10.0, msg.str()};
}

Outcome continuation_sizes() {
  const auto v = Vocabulary::language_l();
  const Sentence all{Quantifier::forall, "blue", Polarity::positive};
  const Sentence some{Quantifier::exists, "blue", Polarity::positive};
  for (std::size_t n = 1; n <= 10; ++n) {
    std::size_t want_all = 0, want_some = 0;
    for (const auto& w : oracle::binary_words(n)) {
      const bool any_blue = std::find(w.begin(), w.end(), Letter{0}) != w.end();
      const bool every_blue = std::count(w.begin(), w.end(), Letter{0}) == static_cast<long>(n);
      want_all += every_blue;
      want_some += any_blue;
    }
    if (want_all != 1 || want_some != (std::size_t{1} << n) - 1)
      return {false, "reference count mismatch at n=" + std::to_string(n)};
    if (continuation_set(all, n, v).size() != want_all ||
        continuation_set(some, n, v).size() != want_some)
      return {false, "n=" + std::to_string(n)};
  }
  return {true, "n <= 10"};
}

Outcome chain_laws() {
  std::stringstream table(
      "@alphabet p n\n@fallback uniform\n\tp\t2/3\n\tn\t1/3\np\tp\t3/4\np\tn\t1/4\n"
      "n\tp\t1/5\nn\tn\t4/5\n");
  const std::vector<ConditionalModel> models{ConditionalModel::uniform(Alphabet::binary()),
                                             ConditionalModel::biased_coin(Rational(2, 7)),
                                             ConditionalModel::load_table(table)};
  std::uint64_t identities = 0;
  for (const auto& m : models) {
    for (std::size_t k = 0; k <= 6; ++k) {
      Rational total = 0;
      for (const auto& w : oracle::binary_words(k)) {
        const auto whole = chain_probability(m, {}, w);
        total += whole.value();
        for (std::size_t split = 0; split <= k; ++split) {
          const Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(split));
          const Word tail(w.begin() + static_cast<std::ptrdiff_t>(split), w.end());
          if (!(whole == chain_probability(m, {}, head) * chain_probability(m, head, tail)))
            return {false, "split identity fails"};
          ++identities;
        }
      }
      if (total != 1) return {false, "mass at k=" + std::to_string(k) + " is " + to_string(total)};
    }
  }
  return {true, std::to_string(identities) + " split identities"};
}

Outcome dilution() {
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::size_t m = 0; m <= 6; ++m) {
      const auto r = dilution_experiment(n, m);
      if (!r.equal || r.counted.value() != r.mu_n.value() * oracle::power(Rational(1, 2), m))
        return {false, "n=" + std::to_string(n) + " m=" + std::to_string(m)};
    }
  return {true, "n <= 4, m <= 6"};
}

Outcome univ_witness() {
  const auto model = ConditionalModel::uniform(Alphabet::binary());
  const auto base = witness_search_univ(model, ExactProb(1, 4), 1, 10);
  if (!base.witness || base.witness->extension != 3 || !(base.witness->value == ExactProb(1, 8)))
    return {false, "alpha=1/4"};
  for (long den : {2L, 4L, 8L, 16L}) {
    const Rational alpha(1, den);
    const auto r = witness_search_univ(model, ExactProb(alpha), 1, 10);
    if (!r.witness || !r.monotone_verified) return {false, "no witness at 1/" + std::to_string(den)};
    const auto m = r.witness->extension;
    if (!(oracle::power(Rational(1, 2), m) < alpha && alpha <= oracle::power(Rational(1, 2), m - 1)))
      return {false, "m out of range at 1/" + std::to_string(den)};
  }
  return {true, "m=3, value 1/8"};
}

Outcome windowed_learning() {
  const auto model = ConditionalModel::uniform(Alphabet::binary());
  const auto good = binary_good();
  std::vector<HypothesisDescriptor> targets;
  for (std::size_t k = 1; k <= 3; ++k) targets.push_back(HypothesisDescriptor::first_k(good, k));
  for (std::size_t len = 1; len <= 3; ++len) {
    const auto words = oracle::binary_words(len);
    for (unsigned mask = 0; mask < (1u << words.size()); ++mask) {
      std::set<Word> pick;
      for (std::size_t i = 0; i < words.size(); ++i)
        if ((mask >> i) & 1) pick.insert(words[i]);
      targets.push_back(HypothesisDescriptor::clopen(
          ClopenSet::of_words(2, pick), "clopen_" + std::to_string(len) + "_" + std::to_string(mask)));
    }
  }
  LearningConfig config;
  config.alpha = ExactProb(1, 16);
  config.train_lengths = {1, 2, 3, 4};
  config.test_length = 6;
  for (const auto& t : targets) {
    const auto run = effective_learning_test(t, default_family(good, 3), model, config);
    if (run.outcome != LearningOutcome::learned || !run.separated) return {false, t.name()};
  }
  return {true, std::to_string(targets.size()) + " targets"};
}

Outcome compactness() {
  const auto good = binary_good();
  const auto samples = sample_violating_strings(0, 1000, 20, good);
  for (const auto& s : samples) {
    std::size_t first = 0;
    for (std::size_t i = 0; i < s.string.size() && first == 0; ++i)
      if (!good[s.string[i]]) first = i + 1;
    if (first != s.first_violation || first == 0) return {false, "sample generator"};
  }
  const auto r = compactness_check(universal_family(good), good, samples);
  return {r.matches == 1000 && r.total == 1000,
          std::to_string(r.matches) + "/" + std::to_string(r.total)};
}

Outcome vc_dimension() {
  std::vector<Membership> nested;
  std::vector<std::function<bool(const Word&)>> plain;
  for (std::size_t k = 1; k <= 4; ++k) {
    const auto h = HypothesisDescriptor::first_k(binary_good(), k);
    nested.push_back([h](const Word& w) { return h.contains(w); });
    plain.push_back(nested.back());
  }
  std::vector<std::vector<Word>> universes{oracle::binary_words(4)};
  std::vector<Word> mixed;
  for (std::size_t len = 1; len <= 3; ++len)
    for (const auto& w : oracle::binary_words(len)) mixed.push_back(w);
  universes.push_back(mixed);
  for (const auto& u : universes) {
    const auto r = vc_dimension_bruteforce(nested, u, 1000000);
    if (r.dimension != 1) return {false, "dimension " + std::to_string(r.dimension)};
    if (!oracle::shattered(plain, r.witness) || oracle::some_shattered(plain, u, 2))
      return {false, "re-verification"};
  }
  return {true, "dimension 1 on 16 and 14 strings"};
}

Outcome word_order() {
  const auto target = negation_pairing_target();
  const auto bag = word_order_experiment(target, Scorer::bag_of_words);
  const auto ord = word_order_experiment(target, Scorer::order_sensitive);
  const bool ok = bag.member_score == bag.permuted_score && !bag.separated && ord.separated &&
                  ord.member_score != ord.permuted_score && target.contains(bag.member) &&
                  !target.contains(bag.permuted);
  return {ok, "bag " + to_string(bag.member_score) + " vs " + to_string(bag.permuted_score) +
                  ", ordered " + to_string(ord.member_score) + " vs " + to_string(ord.permuted_score)};
}

Outcome probe_shape() {
  const auto cases = generate_dataset({});
  std::size_t consistent = 0, inconsistent = 0;
  for (const auto& c : cases) (c.family == "consistent" ? consistent : inconsistent)++;
  if (consistent != 9 || inconsistent != 53) return {false, "case counts"};
  const auto oracle_report = score(cases, run_adapter(cases, "stub:oracle"));
  const std::vector<std::uint64_t> denominators{1, 3, 4, 5, 6, 7, 8, 9, 10};
  if (oracle_report.inconsistent.size() != denominators.size()) return {false, "size rows"};
  for (std::size_t i = 0; i < denominators.size(); ++i) {
    const auto& row = oracle_report.inconsistent[i];
    if (row.pass.total != denominators[i] || row.pass.passed != row.pass.total)
      return {false, "oracle row " + std::to_string(row.object_count)};
  }
  DatasetSpec full;
  full.scheme = Scheme::full_positions;
  const auto fcases = generate_dataset(full);
  const auto window = score(fcases, run_adapter(fcases, "stub:window:2"));
  for (const auto& row : window.inconsistent)
    if (row.pass != Tally{std::min<std::uint64_t>(2, row.object_count), row.object_count})
      return {false, "window row " + std::to_string(row.object_count)};
  return {true, "9 consistent, 53 inconsistent"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const auto root = fs::temp_directory_path() / "qlab-acceptance";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> commands{
      {"gen", "--seed", "3", "--underspecified"},
      {"gen", "--sentence", "exists blue", "--length", "4", "--vocabulary", "L"},
      {"check", "The car is blue. The house is red.", "--question", "Is everything blue?"},
      {"learn", "--target", "universal"},
      {"learn", "--target", "first_2", "--alpha", "1/16", "--train-lengths", "1..4"},
      {"learn", "--experiment", "compactness", "--seed", "9"},
      {"learn", "--experiment", "vc"},
      {"learn", "--experiment", "dilution"},
      {"learn", "--experiment", "word-order"},
      {"learn", "--experiment", "nondegenerate"},
      {"probe", "--endpoint", "stub:window:3", "--seed", "4", "--underspecified"}};
  std::size_t artifacts = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    std::string outputs[2];
    std::vector<fs::path> dirs;
    for (int run_no = 0; run_no < 2; ++run_no) {
      const auto dir = root / (std::to_string(i) + "-" + std::to_string(run_no));
      fs::create_directories(dir);
      auto args = commands[i];
      if (args[0] == "probe") {
        args.push_back("--output-dir");
        args.push_back(dir.string());
      }
      std::ostringstream out, err;
      if (run(args, out, err) != 0) return {false, args[0] + ": " + err.str()};
      outputs[run_no] = out.str();
      dirs.push_back(dir);
    }
    if (outputs[0] != outputs[1]) return {false, "stdout of " + commands[i][0] + " differs"};
    ++artifacts;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (slurp(entry.path()) != slurp(dirs[1] / entry.path().filename()))
        return {false, entry.path().filename().string() + " differs"};
      ++artifacts;
    }
  }
  fs::remove_all(root);
  return {true, std::to_string(artifacts) + " artifacts identical"};
}

}  // namespace

int main() {
  criterion(1, "oracle equivalence", oracle_equivalence);
  criterion(2, "continuation-set sizes", continuation_sizes);
  criterion(3, "chain-rule laws", chain_laws);
  criterion(4, "Max-Ent dilution", dilution);
  criterion(5, "universal witness", univ_witness);
  criterion(6, "windowed targets learned", windowed_learning);
  criterion(7, "compactness mechanism", compactness);
  criterion(8, "VC dimension", vc_dimension);
  criterion(9, "word order", word_order);
  criterion(10, "probe protocol shape", probe_shape);
  criterion(11, "reproducibility", reproducibility);
  return failures == 0 ? 0 : 1;
}
