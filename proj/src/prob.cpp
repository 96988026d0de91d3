#include "qlab/prob.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace qlab {

namespace {

std::vector<std::string> split_blank(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

Letter letter_of(const Alphabet& a, const std::string& name, std::size_t line) {
  const auto l = a.find(name);
  if (!l) throw UnknownSymbol("letter '" + name + "' on line " + std::to_string(line));
  return *l;
}

}  // namespace

// ---- ConditionalModel ------------------------------------------------------

void ConditionalModel::check_distribution(const std::vector<Rational>& d,
                                          const std::string& where) const {
  if (d.size() != alphabet_.size())
    throw InvalidProbability(where + ": distribution over " + std::to_string(d.size()) +
                             " letters, alphabet has " + std::to_string(alphabet_.size()));
  Rational sum = 0;
  for (const auto& p : d) {
    if (p < 0) throw InvalidProbability(where + ": negative mass " + to_string(p));
    sum += p;
  }
  if (sum != 1) throw InvalidProbability(where + ": masses sum to " + to_string(sum));
}

ConditionalModel ConditionalModel::uniform(Alphabet alphabet) {
  if (alphabet.size() == 0) throw InvalidProbability("empty alphabet");
  return ConditionalModel(Kind::uniform, std::move(alphabet));
}

ConditionalModel ConditionalModel::fixed(Alphabet alphabet, std::vector<Rational> distribution) {
  ConditionalModel m(Kind::fixed, std::move(alphabet));
  m.check_distribution(distribution, "fixed model");
  m.fixed_ = std::move(distribution);
  return m;
}

ConditionalModel ConditionalModel::biased_coin(const Rational& p) {
  if (p < 0 || p > 1) throw InvalidProbability("coin bias " + to_string(p));
  return fixed(Alphabet::binary(), {p, Rational(1) - p});
}

ConditionalModel ConditionalModel::table(Alphabet alphabet,
                                         std::map<Word, std::vector<Rational>> rows,
                                         Fallback fallback) {
  ConditionalModel m(Kind::table, std::move(alphabet));
  for (const auto& [ctx, dist] : rows) {
    for (const auto l : ctx)
      if (l >= m.alphabet_.size()) throw UnknownSymbol("context letter " + std::to_string(l));
    m.check_distribution(dist, "context '" + render_word(ctx, m.alphabet_) + "'");
  }
  m.rows_ = std::move(rows);
  m.fallback_ = fallback;
  return m;
}

ConditionalModel ConditionalModel::load_table(std::istream& in) {
  Alphabet alphabet;
  Fallback fallback = Fallback::uniform;
  std::map<Word, std::vector<Rational>> rows;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with('#')) continue;
    if (line.starts_with("@alphabet")) {
      alphabet.names = split_blank(line.substr(9));
      continue;
    }
    if (line.starts_with("@fallback")) {
      const auto v = split_blank(line.substr(9));
      if (v.size() != 1 || (v[0] != "uniform" && v[0] != "error"))
        throw InvalidProbability("bad @fallback on line " + std::to_string(line_no));
      fallback = v[0] == "uniform" ? Fallback::uniform : Fallback::error;
      continue;
    }
    if (alphabet.size() == 0)
      throw InvalidProbability("row before @alphabet on line " + std::to_string(line_no));
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw InvalidProbability("expected context<TAB>letter<TAB>rational on line " +
                               std::to_string(line_no));
    Word ctx;
    for (const auto& name : split_blank(line.substr(0, t1)))
      ctx.push_back(letter_of(alphabet, name, line_no));
    const auto letter_names = split_blank(line.substr(t1 + 1, t2 - t1 - 1));
    if (letter_names.size() != 1)
      throw InvalidProbability("expected one letter on line " + std::to_string(line_no));
    const auto letter = letter_of(alphabet, letter_names[0], line_no);
    auto& dist = rows[ctx];
    dist.resize(alphabet.size(), Rational(0));
    const auto fields = split_blank(line.substr(t2 + 1));
    if (fields.size() != 1)
      throw InvalidProbability("expected one rational on line " + std::to_string(line_no));
    dist[letter] += parse_rational(fields[0]);
  }
  if (alphabet.size() == 0) throw InvalidProbability("missing @alphabet");
  return table(std::move(alphabet), std::move(rows), fallback);
}

void ConditionalModel::write_table(std::ostream& out) const {
  out << "@alphabet";
  for (const auto& n : alphabet_.names) out << ' ' << n;
  out << "\n@fallback " << (fallback_ == Fallback::uniform ? "uniform" : "error") << '\n';
  const auto row = [&](const Word& ctx, const std::vector<Rational>& dist) {
    for (Letter l = 0; l < dist.size(); ++l)
      out << render_word(ctx, alphabet_) << '\t' << alphabet_.names[l] << '\t'
          << to_string(dist[l]) << '\n';
  };
  if (kind_ == Kind::table) {
    for (const auto& [ctx, dist] : rows_) row(ctx, dist);
  } else if (kind_ == Kind::fixed) {
    row({}, fixed_);
  }
}

ExactProb ConditionalModel::conditional(std::span<const Letter> context, Letter next) const {
  if (next >= alphabet_.size()) throw UnknownSymbol("letter " + std::to_string(next));
  switch (kind_) {
    case Kind::uniform:
      return ExactProb(Rational(1, alphabet_.size()));
    case Kind::fixed:
      return ExactProb(fixed_[next]);
    case Kind::table: {
      const auto it = rows_.find(Word(context.begin(), context.end()));
      if (it != rows_.end()) return ExactProb(it->second[next]);
      if (fallback_ == Fallback::error)
        throw MissingConditional("no distribution after '" + render_word(context, alphabet_) +
                                 "'");
      return ExactProb(Rational(1, alphabet_.size()));
    }
  }
  return ExactProb();
}

ExactProb chain_probability(const ConditionalModel& m, std::span<const Letter> context,
                            std::span<const Letter> continuation) {
  Word ctx(context.begin(), context.end());
  ctx.reserve(context.size() + continuation.size());
  ExactProb p = ExactProb::one();
  for (const auto l : continuation) {
    p *= m.conditional(ctx, l);
    ctx.push_back(l);
  }
  return p;
}

// ---- hypotheses ------------------------------------------------------------

std::set<Word> instantiate(const Membership& h, std::size_t alphabet_size, std::size_t n,
                           const Limits& limits) {
  std::set<Word> out;
  for_each_word(alphabet_size, n, limits, [&](const Word& w) {
    if (h(w)) out.insert(w);
  });
  return out;
}

Rational HypothesisPrior::total() const {
  Rational t = 0;
  for (const auto& w : weights) t += w.value();
  return t;
}

HypothesisPrior maxent_prior(std::vector<std::string> names) {
  if (names.empty()) throw EmptyFamily("Max-Ent prior over an empty family");
  HypothesisPrior p;
  const ExactProb each(Rational(1, names.size()));
  p.weights.assign(names.size(), each);
  p.names = std::move(names);
  return p;
}

ExactProb conditional_given_hypothesis(const ConditionalModel& m, const Word& s,
                                       const std::set<Word>& h) {
  if (!h.empty() && h.begin()->size() != s.size())
    throw std::invalid_argument("string length " + std::to_string(s.size()) +
                                " differs from hypothesis length " +
                                std::to_string(h.begin()->size()));
  if (!h.count(s)) return ExactProb::zero();
  Rational mass = 0;
  for (const auto& t : h) mass += chain_probability(m, {}, t).value();
  if (mass == 0) throw ZeroMassHypothesis("hypothesis has zero mass under the model");
  return ExactProb(chain_probability(m, {}, s).value() / mass);
}

ExactProb observation_likelihood(const ConditionalModel& m, const std::set<Word>& h,
                                 const Observation& obs) {
  const bool member = h.count(obs.string) != 0;
  if (member != obs.in) return ExactProb::zero();
  if (obs.in) return conditional_given_hypothesis(m, obs.string, h);
  Rational mass = 0;
  for_each_word(m.alphabet_size(), obs.string.size(), Limits{}, [&](const Word& w) {
    if (!h.count(w)) mass += chain_probability(m, {}, w).value();
  });
  if (mass == 0) throw ZeroMassHypothesis("complement of hypothesis has zero mass");
  return ExactProb(chain_probability(m, {}, obs.string).value() / mass);
}

HypothesisPrior bayes_update_with_likelihoods(const HypothesisPrior& prior,
                                              std::span<const ExactProb> likelihoods) {
  if (likelihoods.size() != prior.size())
    throw std::invalid_argument("one likelihood per hypothesis required");
  std::vector<Rational> joint(prior.size());
  Rational evidence = 0;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    joint[i] = prior.weights[i].value() * likelihoods[i].value();
    evidence += joint[i];
  }
  if (evidence == 0) throw InconsistentEvidence("every hypothesis gives the observation mass 0");
  HypothesisPrior post;
  post.names = prior.names;
  post.weights.reserve(prior.size());
  for (auto& j : joint) post.weights.emplace_back(j / evidence);
  return post;
}

HypothesisPrior bayes_update(const HypothesisPrior& prior,
                             std::span<const std::set<Word>> hypotheses,
                             const ConditionalModel& m, const Observation& obs) {
  if (hypotheses.size() != prior.size())
    throw std::invalid_argument("one instantiated hypothesis per prior entry required");
  std::vector<ExactProb> lik;
  lik.reserve(hypotheses.size());
  for (const auto& h : hypotheses) lik.push_back(observation_likelihood(m, h, obs));
  return bayes_update_with_likelihoods(prior, lik);
}

ExactProb maxent_dilution(const ExactProb& mu_n, std::size_t m, std::size_t branching) {
  if (branching < 2) throw std::invalid_argument("branching must be at least 2");
  Rational denom = 1;
  for (std::size_t i = 0; i < m; ++i) denom *= branching;
  return ExactProb(mu_n.value() / denom);
}

ExactProb extended_conditional(const ConditionalModel& m, const Membership& h,
                               const ExactProb& base, const Word& s, const Word& a) {
  Word sa = s;
  sa.insert(sa.end(), a.begin(), a.end());
  if (!h(sa)) return ExactProb::zero();
  return base * chain_probability(m, s, a);
}

// ---- non-degeneracy ----------------------------------------------------------

bool NondegeneracyReport::monotone() const {
  for (const auto& h : hypotheses)
    if (!h.monotone) return false;
  return true;
}

NondegeneracyReport check_nondegenerate(const ConditionalModel& m,
                                        std::span<const IndexedHypothesis> hypotheses,
                                        std::size_t n, std::span<const ExactProb> delta_grid,
                                        std::size_t horizon, const Limits& limits) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const std::size_t k = m.alphabet_size();
  NondegeneracyReport report;
  report.n = n;
  report.horizon = horizon;
  const auto prefixes = enumerate_words(k, n, limits);

  for (const auto& hyp : hypotheses) {
    HypothesisDegeneracy out;
    out.name = hyp.name;
    for (const auto& d : delta_grid) out.drops.push_back({d, std::nullopt});

    const auto members = instantiate(hyp.contains, k, n, limits);
    std::vector<ExactProb> base;
    base.reserve(prefixes.size());
    for (const auto& s : prefixes)
      base.push_back(members.empty() ? ExactProb::zero()
                                     : conditional_given_hypothesis(m, s, members));

    for (std::size_t ext = 1; ext <= horizon; ++ext) {
      count_words(k, n + ext, limits);
      std::vector<bool> exact(delta_grid.size(), true);
      for (std::size_t i = 0; i < prefixes.size(); ++i) {
        for_each_word(k, ext, limits, [&](const Word& a) {
          const auto v = extended_conditional(m, hyp.contains, base[i], prefixes[i], a);
          if (v > base[i] && out.monotone) {
            out.monotone = false;
            out.monotone_counterexample = std::make_pair(prefixes[i], a);
          }
          for (std::size_t d = 0; d < delta_grid.size(); ++d) {
            if (!exact[d]) continue;
            const Rational target = base[i].value() - delta_grid[d].value();
            exact[d] = v.value() == (target > 0 ? target : Rational(0));
          }
        });
      }
      for (std::size_t d = 0; d < delta_grid.size(); ++d)
        if (exact[d] && !out.drops[d].m) out.drops[d].m = ext;
    }
    report.hypotheses.push_back(std::move(out));
  }
  return report;
}

}  // namespace qlab
