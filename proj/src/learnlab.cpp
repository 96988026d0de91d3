#include "qlab/learnlab.hpp"

#include "qlab/errors.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qlab {

namespace {

std::size_t count_good(const std::vector<bool>& good, const Word& w) {
  return static_cast<std::size_t>(
      std::count_if(w.begin(), w.end(), [&](Letter l) { return good.at(l); }));
}

void require_alphabet(const std::vector<bool>& good) {
  if (good.empty()) throw std::invalid_argument("empty alphabet");
}

Word slice(const Word& w, std::size_t from, std::size_t to) {
  return Word(w.begin() + static_cast<std::ptrdiff_t>(from),
              w.begin() + static_cast<std::ptrdiff_t>(to));
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::string to_string(HypothesisKind kind) {
  switch (kind) {
    case HypothesisKind::universal: return "universal";
    case HypothesisKind::existential: return "existential";
    case HypothesisKind::first_k: return "first_k";
    case HypothesisKind::count_at_least: return "count_at_least";
    case HypothesisKind::position_set: return "position_set";
    case HypothesisKind::clopen: return "clopen";
  }
  return "?";
}

// ---- HypothesisDescriptor --------------------------------------------------------

HypothesisDescriptor HypothesisDescriptor::universal(std::vector<bool> good) {
  require_alphabet(good);
  HypothesisDescriptor h;
  h.name_ = "universal";
  h.kind_ = HypothesisKind::universal;
  h.alphabet_size_ = good.size();
  h.good_ = std::move(good);
  return h;
}

HypothesisDescriptor HypothesisDescriptor::existential(std::vector<bool> good) {
  auto h = universal(std::move(good));
  h.name_ = "existential";
  h.kind_ = HypothesisKind::existential;
  return h;
}

HypothesisDescriptor HypothesisDescriptor::first_k(std::vector<bool> good, std::size_t k) {
  auto h = universal(std::move(good));
  h.name_ = "first_" + std::to_string(k);
  h.kind_ = HypothesisKind::first_k;
  h.k_ = k;
  return h;
}

HypothesisDescriptor HypothesisDescriptor::count_at_least(std::vector<bool> good, std::size_t k) {
  auto h = universal(std::move(good));
  h.name_ = "count_at_least_" + std::to_string(k);
  h.kind_ = HypothesisKind::count_at_least;
  h.k_ = k;
  return h;
}

HypothesisDescriptor HypothesisDescriptor::position_set(std::vector<bool> good,
                                                        std::set<std::size_t> positions) {
  if (positions.count(0)) throw std::invalid_argument("positions are 1-based");
  auto h = universal(std::move(good));
  h.name_ = "positions";
  for (auto p : positions) h.name_ += "_" + std::to_string(p);
  h.kind_ = HypothesisKind::position_set;
  h.positions_ = std::move(positions);
  return h;
}

HypothesisDescriptor HypothesisDescriptor::clopen(ClopenSet set, std::string name) {
  HypothesisDescriptor h;
  h.name_ = std::move(name);
  h.kind_ = HypothesisKind::clopen;
  h.alphabet_size_ = set.alphabet_size();
  h.clopen_ = std::move(set);
  return h;
}

bool HypothesisDescriptor::contains(const Word& w) const {
  for (const auto l : w)
    if (l >= alphabet_size_) throw UnknownSymbol("letter " + std::to_string(l));
  switch (kind_) {
    case HypothesisKind::universal: return count_good(good_, w) == w.size();
    case HypothesisKind::existential: return count_good(good_, w) > 0;
    case HypothesisKind::first_k:
      for (std::size_t i = 0; i < std::min(k_, w.size()); ++i)
        if (!good_[w[i]]) return false;
      return true;
    case HypothesisKind::count_at_least: return count_good(good_, w) >= k_;
    case HypothesisKind::position_set:
      for (auto p : positions_)
        if (p <= w.size() && !good_[w[p - 1]]) return false;
      return true;
    case HypothesisKind::clopen: return clopen_->decides(w).value_or(true);
  }
  return false;
}

std::optional<std::size_t> HypothesisDescriptor::window() const {
  switch (kind_) {
    case HypothesisKind::first_k: return k_;
    case HypothesisKind::position_set:
      return positions_.empty() ? 0 : *positions_.rbegin();
    case HypothesisKind::clopen: return clopen_->base().max_length();
    default: return std::nullopt;
  }
}

std::set<Word> HypothesisDescriptor::instantiate(std::size_t n, const Limits& limits) const {
  std::set<Word> out;
  for_each_word(alphabet_size_, n, limits, [&](const Word& w) {
    if (contains(w)) out.insert(w);
  });
  return out;
}

IndexedHypothesis HypothesisDescriptor::indexed() const {
  return {name_, [self = *this](const Word& w) { return self.contains(w); }};
}

std::vector<bool> binary_good() { return {true, false}; }

std::vector<HypothesisDescriptor> default_family(const std::vector<bool>& good, std::size_t max_k) {
  std::vector<HypothesisDescriptor> out{
      HypothesisDescriptor::universal(good),
      HypothesisDescriptor::existential(good),
      HypothesisDescriptor::clopen(ClopenSet::full(good.size()), "full"),
  };
  for (std::size_t k = 1; k <= max_k; ++k) out.push_back(HypothesisDescriptor::first_k(good, k));
  for (std::size_t k = 2; k <= max_k; ++k)
    out.push_back(HypothesisDescriptor::count_at_least(good, k));
  return out;
}

// ---- effective learning -----------------------------------------------------

std::string to_string(LearningOutcome o) {
  return o == LearningOutcome::learned ? "learned" : "witness_found";
}

namespace {

// Per-length instantiations and model masses, built lazily.
class LengthCache {
 public:
  LengthCache(const std::vector<HypothesisDescriptor>& family, const ConditionalModel& model,
              const Limits& limits)
      : family_(family), model_(model), limits_(limits) {}

  struct Level {
    std::vector<std::set<Word>> members;
    std::vector<Rational> mass;  // model mass of each instantiation
    Rational total;              // model mass of V^n
  };

  const Level& at(std::size_t n) {
    auto it = levels_.find(n);
    if (it != levels_.end()) return it->second;
    Level lv;
    lv.members.resize(family_.size());
    lv.mass.assign(family_.size(), Rational(0));
    lv.total = 0;
    for_each_word(model_.alphabet_size(), n, limits_, [&](const Word& w) {
      const auto p = chain_probability(model_, {}, w).value();
      lv.total += p;
      for (std::size_t i = 0; i < family_.size(); ++i)
        if (family_[i].contains(w)) {
          lv.members[i].insert(w);
          lv.mass[i] += p;
        }
    });
    return levels_.emplace(n, std::move(lv)).first->second;
  }

 private:
  const std::vector<HypothesisDescriptor>& family_;
  const ConditionalModel& model_;
  const Limits& limits_;
  std::map<std::size_t, Level> levels_;
};

}  // namespace

LearningRun effective_learning_test(const HypothesisDescriptor& target,
                                    std::vector<HypothesisDescriptor> family,
                                    const ConditionalModel& model, const LearningConfig& config) {
  if (std::none_of(family.begin(), family.end(),
                   [&](const auto& h) { return h.name() == target.name(); }))
    family.push_back(target);
  for (const auto& h : family)
    if (h.alphabet_size() != model.alphabet_size())
      throw std::invalid_argument("hypothesis '" + h.name() + "' is over " +
                                  std::to_string(h.alphabet_size()) +
                                  " letters, model over " +
                                  std::to_string(model.alphabet_size()));

  LearningRun run;
  run.target = target.name();
  run.alpha = config.alpha;
  run.train_lengths = config.train_lengths;
  std::sort(run.train_lengths.begin(), run.train_lengths.end());
  run.train_lengths.erase(std::unique(run.train_lengths.begin(), run.train_lengths.end()),
                          run.train_lengths.end());
  run.test_length = config.test_length;

  std::vector<std::string> names;
  for (const auto& h : family) names.push_back(h.name());
  auto posterior = maxent_prior(names);
  LengthCache cache(family, model, config.limits);

  for (const auto len : run.train_lengths) {
    const auto& lv = cache.at(len);
    for_each_word(model.alphabet_size(), len, config.limits, [&](const Word& w) {
      const auto p = chain_probability(model, {}, w).value();
      if (p == 0) return;  // a null event carries no evidence
      const bool in = target.contains(w);
      std::vector<ExactProb> lik;
      lik.reserve(family.size());
      for (std::size_t i = 0; i < family.size(); ++i) {
        const bool member = lv.members[i].count(w) != 0;
        const Rational mass = in ? lv.mass[i] : lv.total - lv.mass[i];
        lik.push_back(member != in ? ExactProb::zero() : ExactProb(p / mass));
      }
      posterior = bayes_update_with_likelihoods(posterior, lik);
    });
    run.snapshots.push_back({len, posterior});
  }

  ExactProb best;
  for (const auto& w : posterior.weights) best = std::max(best, w);
  for (std::size_t i = 0; i < posterior.size(); ++i)
    if (posterior.weights[i] == best) run.map_hypotheses.push_back(posterior.names[i]);

  const std::size_t trained = run.train_lengths.empty() ? 0 : run.train_lengths.back();
  const auto window = target.window();
  run.windowed = window && *window <= trained;

  // sum_h w(h) mu(x | h^{|x|})
  std::map<Word, ExactProb> learned_memo;
  auto learned = [&](const Word& x) -> ExactProb {
    auto it = learned_memo.find(x);
    if (it != learned_memo.end()) return it->second;
    const auto& lv = cache.at(x.size());
    Rational acc = 0;
    const auto px = chain_probability(model, {}, x).value();
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (posterior.weights[i] == ExactProb::zero() || !lv.members[i].count(x)) continue;
      acc += posterior.weights[i].value() * px / lv.mass[i];
    }
    return learned_memo.emplace(x, ExactProb(acc)).first->second;
  };
  auto extended = [&](const Word& s) -> ExactProb {
    if (!target.contains(s)) return ExactProb::zero();
    const Word head = slice(s, 0, trained);
    return learned(head) * chain_probability(model, head, slice(s, trained, s.size()));
  };
  auto score = [&](const Word& s) -> ExactProb {
    if (run.windowed) return learned(slice(s, 0, *window));
    if (s.size() <= trained) return learned(s);
    return extended(s);
  };

  run.separated = true;
  std::optional<Witness> violation;
  for_each_word(model.alphabet_size(), run.test_length, config.limits, [&](const Word& s) {
    const bool member = target.contains(s);
    const auto v = score(s);
    auto& slot = member ? run.member_min : run.nonmember_max;
    if (!slot || (member ? v < *slot : v > *slot)) slot = v;
    if ((v > config.alpha) != member) {
      run.separated = false;
      if (!violation)
        violation = Witness{s, s.size(), s.size() > trained ? s.size() - trained : 0, v, member};
    }
  });

  if (!run.windowed) {
    for (std::size_t ext = 1; ext <= config.horizon && !run.witness; ++ext) {
      count_words(model.alphabet_size(), trained + ext, config.limits);
      for_each_word(model.alphabet_size(), trained, config.limits, [&](const Word& head) {
        if (run.witness || learned(head) == ExactProb::zero()) return;
        for_each_word(model.alphabet_size(), ext, config.limits, [&](const Word& a) {
          if (run.witness) return;
          const Word s = concat(head, a);
          if (!target.contains(s)) return;
          const auto v = extended(s);
          if (v < config.alpha) run.witness = Witness{s, s.size(), ext, v, true};
        });
      });
    }
  }
  if (!run.witness && violation) run.witness = violation;
  run.outcome = run.witness ? LearningOutcome::witness_found : LearningOutcome::learned;
  return run;
}

UnivWitnessResult witness_search_univ(const ConditionalModel& model, const ExactProb& alpha,
                                      std::size_t n, std::size_t horizon,
                                      const std::vector<bool>& good, const Limits& limits) {
  const auto h = HypothesisDescriptor::universal(good);
  if (h.alphabet_size() != model.alphabet_size())
    throw std::invalid_argument("letter classification does not match the model alphabet");
  UnivWitnessResult out;
  const std::vector<IndexedHypothesis> hyps{h.indexed()};
  out.monotone_verified = check_nondegenerate(model, hyps, n, {}, horizon, limits).monotone();

  const auto members = h.instantiate(n, limits);
  std::vector<std::pair<Word, ExactProb>> bases;
  for (const auto& s : members) bases.emplace_back(s, conditional_given_hypothesis(model, s, members));
  const auto contains = h.indexed().contains;
  for (std::size_t m = 1; m <= horizon && !out.witness; ++m) {
    count_words(model.alphabet_size(), n + m, limits);
    for (const auto& [s, base] : bases) {
      if (out.witness) break;
      for_each_word(model.alphabet_size(), m, limits, [&](const Word& a) {
        if (out.witness) return;
        const auto v = extended_conditional(model, contains, base, s, a);
        if (contains(concat(s, a)) && v < alpha) out.witness = Witness{concat(s, a), n + m, m, v, true};
      });
    }
  }
  return out;
}

DilutionReport dilution_experiment(std::size_t n, std::size_t m, std::size_t branching,
                                   const Limits& limits) {
  if (branching < 2) throw std::invalid_argument("branching must be at least 2");
  Alphabet alphabet;
  if (branching == 2) {
    alphabet = Alphabet::binary();
  } else {
    for (std::size_t i = 0; i < branching; ++i) alphabet.names.push_back("l" + std::to_string(i));
  }
  const auto model = ConditionalModel::uniform(alphabet);

  DilutionReport r;
  r.n = n;
  r.m = m;
  r.branching = branching;

  // O({w}) for each w of the length: distinct sets, one per word.
  auto family_size = [&](std::size_t len) {
    std::set<Word> prefixes;
    for_each_word(branching, len, limits, [&](const Word& w) { prefixes.insert(w); });
    return static_cast<std::uint64_t>(prefixes.size());
  };
  r.family_size_n = family_size(n);
  r.family_size_nm = family_size(n + m);
  std::uint64_t scale = 1;
  for (std::size_t i = 0; i < m; ++i) scale *= branching;
  r.cardinality_holds =
      r.family_size_nm == r.family_size_n * scale && (m == 0 || r.family_size_n < r.family_size_nm);

  std::vector<bool> good(branching, false);
  good[0] = true;
  const auto universal = HypothesisDescriptor::universal(good);
  const Word s(n, 0);
  r.mu_n = conditional_given_hypothesis(model, s, universal.instantiate(n, limits));

  for_each_word(branching, m, limits, [&](const Word& a) {
    ++r.extensions_of_prefix;
    if (universal.contains(concat(s, a))) ++r.extensions_in_universal;
  });
  r.counted = ExactProb(r.mu_n.value() / r.extensions_of_prefix);
  r.formula = maxent_dilution(r.mu_n, m, branching);
  r.factor = r.mu_n.value() == 0 ? Rational(0) : r.counted.value() / r.mu_n.value();
  r.equal = r.counted == r.formula;
  return r;
}

std::vector<StringSample> sample_violating_strings(std::uint64_t seed, std::size_t count,
                                                   std::size_t max_length,
                                                   const std::vector<bool>& good) {
  if (max_length == 0) throw std::invalid_argument("max_length must be positive");
  std::vector<Letter> good_letters, bad_letters;
  for (Letter l = 0; l < good.size(); ++l) (good[l] ? good_letters : bad_letters).push_back(l);
  if (good_letters.empty() || bad_letters.empty())
    throw std::invalid_argument("need both good and bad letters");

  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t bound) { return static_cast<std::size_t>(rng() % bound); };
  std::vector<StringSample> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    StringSample s;
    s.first_violation = 1 + pick(max_length);
    const std::size_t len = s.first_violation + pick(max_length - s.first_violation + 1);
    for (std::size_t j = 1; j <= len; ++j) {
      if (j < s.first_violation)
        s.string.push_back(good_letters[pick(good_letters.size())]);
      else if (j == s.first_violation)
        s.string.push_back(bad_letters[pick(bad_letters.size())]);
      else
        s.string.push_back(static_cast<Letter>(pick(good.size())));
    }
    out.push_back(std::move(s));
  }
  return out;
}

CompactnessReport compactness_check(const BorelFamily& universal, const std::vector<bool>& good,
                                    std::span<const StringSample> samples, const Limits& limits) {
  if (universal.alphabet_size != good.size())
    throw std::invalid_argument("letter classification does not match the family alphabet");
  CompactnessReport r;
  for (const auto& sample : samples) {
    ++r.total;
    std::size_t observed = 0;
    bool agrees = true;
    for (std::size_t t = 1; t <= sample.string.size(); ++t) {
      const bool excluded =
          membership_at_stage(universal, slice(sample.string, 0, t), limits) ==
          StageMembership::excluded;
      if (excluded && observed == 0) observed = t;
      const bool expected = sample.first_violation != 0 && t >= sample.first_violation;
      if (excluded != expected) agrees = false;
    }
    if (agrees) {
      ++r.matches;
    } else {
      r.mismatches.push_back({sample.string, sample.first_violation, observed});
    }
  }
  return r;
}

// ---- VC dimension ----------------------------------------------------------

VCReport vc_dimension_bruteforce(std::span<const Membership> family,
                                 std::span<const Word> universe, std::uint64_t cap) {
  if (universe.size() > 64)
    throw SizeLimitExceeded("universe of " + std::to_string(universe.size()) +
                            " strings exceeds 64");
  VCReport r;
  if (family.empty()) return r;

  std::vector<std::uint64_t> masks;
  for (const auto& h : family) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < universe.size(); ++i)
      if (h(universe[i])) mask |= std::uint64_t{1} << i;
    masks.push_back(mask);
  }
  std::sort(masks.begin(), masks.end());
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());

  const std::size_t u = universe.size();
  for (std::size_t d = 1; d <= u; ++d) {
    if (d >= 64 || (std::uint64_t{1} << d) > masks.size()) break;
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    bool found = false;
    while (true) {
      if (++r.subsets_examined > cap)
        throw CapExceeded("more than " + std::to_string(cap) + " subsets examined");
      std::uint64_t subset = 0;
      for (auto i : idx) subset |= std::uint64_t{1} << i;
      std::set<std::uint64_t> patterns;
      for (auto m : masks) patterns.insert(m & subset);
      if (patterns.size() == (std::uint64_t{1} << d)) {
        found = true;
        r.dimension = d;
        r.witness.clear();
        for (auto i : idx) r.witness.push_back(universe[i]);
        break;
      }
      // next combination
      std::size_t k = d;
      while (k > 0 && idx[k - 1] == u - d + (k - 1)) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t j = k; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (!found) break;
  }
  return r;
}

// ---- word order --------------------------------------------------------------

bool TokenClopen::contains(const TokenString& ts) const {
  return std::any_of(prefixes.begin(), prefixes.end(), [&](const auto& p) {
    return p.size() <= ts.tokens.size() && std::equal(p.begin(), p.end(), ts.tokens.begin());
  });
}

TokenClopen negation_pairing_target() {
  return {{{"a1", "is", "not", "blue", "a1", "is", "A"}}};
}

std::string to_string(Scorer s) {
  return s == Scorer::order_sensitive ? "order_sensitive" : "bag_of_words";
}

Rational score_tokens(const TokenClopen& target, const TokenString& ts, Scorer scorer) {
  if (scorer == Scorer::order_sensitive) return target.contains(ts) ? 1 : 0;
  if (target.prefixes.empty()) return 0;
  std::map<std::string, std::size_t> bag;
  for (const auto& t : ts.tokens) ++bag[t];
  std::size_t hits = 0;
  for (const auto& p : target.prefixes) {
    std::map<std::string, std::size_t> need;
    for (const auto& t : p) ++need[t];
    if (std::all_of(need.begin(), need.end(),
                    [&](const auto& kv) { return bag[kv.first] >= kv.second; }))
      ++hits;
  }
  return Rational(hits) / target.prefixes.size();
}

WordOrderReport word_order_experiment(const TokenClopen& target, Scorer scorer,
                                      const Vocabulary& vocab, std::size_t max_tokens) {
  auto finish = [&](const TokenString& member, std::vector<std::size_t> perm) {
    WordOrderReport r;
    r.scorer = scorer;
    r.member = member;
    r.permuted = permute(member, perm);
    r.permutation = std::move(perm);
    r.member_score = score_tokens(target, r.member, scorer);
    r.permuted_score = score_tokens(target, r.permuted, scorer);
    r.separated = r.member_score != r.permuted_score;
    return r;
  };
  auto outside = [&](const TokenString& member, const TokenString& p) {
    return p != member && !target.contains(p);
  };

  for (const auto& prefix : target.prefixes) {
    const TokenString member{prefix};
    const std::size_t len = prefix.size();
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = 0; j < len; ++j) {
        if (i == j) continue;
        std::vector<std::size_t> perm(len);
        std::iota(perm.begin(), perm.end(), 0);
        perm.erase(perm.begin() + static_cast<std::ptrdiff_t>(i));
        perm.insert(perm.begin() + static_cast<std::ptrdiff_t>(j), i);
        const auto p = permute(member, perm);
        if (!outside(member, p)) continue;
        try {
          detokenize(p, vocab);
        } catch (const Error&) {
          continue;
        }
        return finish(member, perm);
      }
    }
  }
  for (const auto& prefix : target.prefixes) {
    if (prefix.size() > max_tokens) continue;
    const TokenString member{prefix};
    std::vector<std::size_t> perm(prefix.size());
    std::iota(perm.begin(), perm.end(), 0);
    while (std::next_permutation(perm.begin(), perm.end()))
      if (outside(member, permute(member, perm))) return finish(member, perm);
  }
  throw NoSeparatingPair("no permutation of a member of the target leaves it");
}

}  // namespace qlab
