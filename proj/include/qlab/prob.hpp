#pragma once

// Exact probability over words: next-letter conditional models, chaining of
// conditionals, Max-Ent priors over hypothesis families, Bayesian updates and
// the non-degeneracy check. Every value is an exact rational.

#include "qlab/lang.hpp"
#include "qlab/rational.hpp"

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace qlab {

enum class Fallback { uniform, error };

/// Next-letter distributions indexed by context. Immutable once built; every
/// context's distribution sums to exactly 1.
class ConditionalModel {
 public:
  static ConditionalModel uniform(Alphabet alphabet);
  /// The same distribution after every context.
  static ConditionalModel fixed(Alphabet alphabet, std::vector<Rational> distribution);
  /// Binary {p, n}; the first letter has probability p.
  static ConditionalModel biased_coin(const Rational& p);
  static ConditionalModel table(Alphabet alphabet, std::map<Word, std::vector<Rational>> rows,
                                Fallback fallback);

  /// Plain-text table: "@alphabet ..." and "@fallback ..." directives, then
  /// rows "context<TAB>letter<TAB>rational" (context letters blank-separated,
  /// empty for the empty context). Letters missing from a row have mass 0.
  static ConditionalModel load_table(std::istream& in);
  void write_table(std::ostream& out) const;

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }

  ExactProb conditional(std::span<const Letter> context, Letter next) const;

 private:
  enum class Kind { uniform, fixed, table };
  ConditionalModel(Kind kind, Alphabet alphabet) : kind_(kind), alphabet_(std::move(alphabet)) {}
  void check_distribution(const std::vector<Rational>& d, const std::string& where) const;

  Kind kind_;
  Alphabet alphabet_;
  std::vector<Rational> fixed_;
  std::map<Word, std::vector<Rational>> rows_;
  Fallback fallback_ = Fallback::uniform;
};

/// mu(continuation | context): the product of the conditionals of each letter
/// given the context and the letters before it.
ExactProb chain_probability(const ConditionalModel& m, std::span<const Letter> context,
                            std::span<const Letter> continuation);

// ---- hypotheses ------------------------------------------------------------

/// A length-indexed hypothesis: membership of a word of any length.
using Membership = std::function<bool(const Word&)>;

struct IndexedHypothesis {
  std::string name;
  Membership contains;
};

/// Members of a hypothesis among the length-n words.
std::set<Word> instantiate(const Membership& h, std::size_t alphabet_size, std::size_t n,
                           const Limits& limits = {});

struct HypothesisPrior {
  std::vector<std::string> names;
  std::vector<ExactProb> weights;

  std::size_t size() const noexcept { return names.size(); }
  Rational total() const;
};

/// Equal weights 1/|family|.
HypothesisPrior maxent_prior(std::vector<std::string> names);

/// mu(s | h): the model's mass of s renormalised over the members of h.
ExactProb conditional_given_hypothesis(const ConditionalModel& m, const Word& s,
                                       const std::set<Word>& h);

struct Observation {
  Word string;
  bool in = true;  // labelled as a member of the target
};

/// Likelihood of a labelled observation under a hypothesis instantiated at the
/// observation's length: mu(s|h) for an "in" label, mu(s|complement of h) for
/// an "out" label, 0 when h disagrees with the label.
ExactProb observation_likelihood(const ConditionalModel& m, const std::set<Word>& h,
                                 const Observation& obs);

/// Posterior proportional to prior x likelihood, normalised exactly.
HypothesisPrior bayes_update_with_likelihoods(const HypothesisPrior& prior,
                                              std::span<const ExactProb> likelihoods);
/// `hypotheses[i]` is hypothesis i instantiated at the observation's length.
HypothesisPrior bayes_update(const HypothesisPrior& prior,
                             std::span<const std::set<Word>> hypotheses,
                             const ConditionalModel& m, const Observation& obs);

/// mu_n / branching^m.
ExactProb maxent_dilution(const ExactProb& mu_n, std::size_t m, std::size_t branching);

/// The autoregressive extension of a length-n conditional:
/// mu(s.a | h) = [s.a in h] * mu(s | h) * mu(a | s).
ExactProb extended_conditional(const ConditionalModel& m, const Membership& h,
                               const ExactProb& base, const Word& s, const Word& a);

// ---- non-degeneracy ----------------------------------------------------------

struct DropResult {
  ExactProb delta;
  /// Least m <= horizon with mu(s.a|h) = max{0, mu(s|h) - delta} for every
  /// s in V^n and a in V^m; nullopt when none was found.
  std::optional<std::size_t> m;
};

struct HypothesisDegeneracy {
  std::string name;
  /// mu(s.a|h) <= mu(s|h) for every tested s and extension a.
  bool monotone = true;
  std::optional<std::pair<Word, Word>> monotone_counterexample;
  std::vector<DropResult> drops;
};

struct NondegeneracyReport {
  std::size_t n = 0;
  std::size_t horizon = 0;
  std::vector<HypothesisDegeneracy> hypotheses;

  bool monotone() const;
};

NondegeneracyReport check_nondegenerate(const ConditionalModel& m,
                                        std::span<const IndexedHypothesis> hypotheses,
                                        std::size_t n, std::span<const ExactProb> delta_grid,
                                        std::size_t horizon, const Limits& limits = {});

}  // namespace qlab
