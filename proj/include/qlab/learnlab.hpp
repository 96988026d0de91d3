#pragma once

// Effective-learning experiments over structured hypothesis families:
// threshold-alpha learning runs, the witness search against the universal
// hypothesis, Max-Ent dilution, the compactness mechanism, brute-force VC
// dimension and the word-order experiment.

#include "qlab/borel.hpp"
#include "qlab/lang.hpp"
#include "qlab/prob.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <set>
#include <string>
#include <vector>

namespace qlab {

enum class HypothesisKind { universal, existential, first_k, count_at_least, position_set, clopen };
std::string to_string(HypothesisKind kind);

/// A hypothesis defined at every length. `good` marks the letters that
/// satisfy the target predicate.
class HypothesisDescriptor {
 public:
  static HypothesisDescriptor universal(std::vector<bool> good);
  static HypothesisDescriptor existential(std::vector<bool> good);
  /// The first k objects are good (all of them when fewer than k).
  static HypothesisDescriptor first_k(std::vector<bool> good, std::size_t k);
  static HypothesisDescriptor count_at_least(std::vector<bool> good, std::size_t k);
  /// Every listed 1-based position that exists is good.
  static HypothesisDescriptor position_set(std::vector<bool> good, std::set<std::size_t> positions);
  /// Words that extend a member of the prefix set, or are a prefix of one.
  static HypothesisDescriptor clopen(ClopenSet set, std::string name);

  const std::string& name() const noexcept { return name_; }
  HypothesisKind kind() const noexcept { return kind_; }
  std::size_t alphabet_size() const noexcept { return alphabet_size_; }

  bool contains(const Word& w) const;
  /// Prefix length that decides membership at every longer length, if any.
  std::optional<std::size_t> window() const;
  std::set<Word> instantiate(std::size_t n, const Limits& limits = {}) const;
  IndexedHypothesis indexed() const;

 private:
  HypothesisDescriptor() = default;

  std::string name_;
  HypothesisKind kind_ = HypothesisKind::universal;
  std::size_t alphabet_size_ = 0;
  std::vector<bool> good_;
  std::size_t k_ = 0;
  std::set<std::size_t> positions_;
  std::optional<ClopenSet> clopen_;
};

/// universal, existential, full, first_1..first_max_k, count_at_least_2..max_k.
std::vector<HypothesisDescriptor> default_family(const std::vector<bool>& good, std::size_t max_k);

/// Binary alphabet with letter 0 good.
std::vector<bool> binary_good();

// ---- effective learning -----------------------------------------------------

struct Witness {
  Word string;
  std::size_t length = 0;
  std::size_t extension = 0;  // length beyond the trained length
  ExactProb value;
  bool member = true;  // whether the string lies in the target
};

struct PosteriorSnapshot {
  std::size_t length = 0;
  HypothesisPrior posterior;
};

enum class LearningOutcome { learned, witness_found };
std::string to_string(LearningOutcome o);

struct LearningConfig {
  ExactProb alpha;
  std::vector<std::size_t> train_lengths;
  std::size_t test_length = 0;
  /// Extension lengths searched for a member scored below alpha (non-windowed
  /// targets only); 0 disables the search.
  std::size_t horizon = 0;
  Limits limits;
};

struct LearningRun {
  std::string target;
  ExactProb alpha;
  std::vector<std::size_t> train_lengths;
  std::size_t test_length = 0;
  std::vector<PosteriorSnapshot> snapshots;
  /// Hypotheses sharing the largest posterior weight after training.
  std::vector<std::string> map_hypotheses;
  /// Target decided by a prefix no longer than the trained length.
  bool windowed = false;
  std::optional<ExactProb> member_min;
  std::optional<ExactProb> nonmember_max;
  /// score > alpha exactly for the members at the test length.
  bool separated = false;
  LearningOutcome outcome = LearningOutcome::learned;
  std::optional<Witness> witness;
};

/// Scores every test-length word by the learned conditional given the target
/// and checks threshold separation at alpha (a tie is not learned).
///
/// Training: Bayesian updates from a Max-Ent prior over `family` (the target is
/// added when absent) on every word of each training length, labelled by the
/// target. With N the largest training length, the learned conditional of a
/// word x of length L <= N is sum_h w(h) mu(x | h^L). At a test length T:
///   windowed target (window k <= N): score(s) = learned(s[:k])
///   otherwise: score(s) = [s in target] * learned(s[:N]) * mu(s[N:] | s[:N])
LearningRun effective_learning_test(const HypothesisDescriptor& target,
                                    std::vector<HypothesisDescriptor> family,
                                    const ConditionalModel& model, const LearningConfig& config);

struct UnivWitnessResult {
  bool monotone_verified = false;
  std::optional<Witness> witness;
};

/// Searches, breadth-first over the extension length m <= horizon and then
/// lexicographically, for s.a in the universal hypothesis at length n+m with
/// mu(s.a | h) < alpha, starting from the members s at length n.
UnivWitnessResult witness_search_univ(const ConditionalModel& model, const ExactProb& alpha,
                                      std::size_t n, std::size_t horizon,
                                      const std::vector<bool>& good = binary_good(),
                                      const Limits& limits = {});

struct DilutionReport {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t branching = 2;
  std::uint64_t family_size_n = 0;
  std::uint64_t family_size_nm = 0;
  bool cardinality_holds = false;  // |H^n| < |H^{n+m}| = |H^n| * branching^m (m > 0)
  std::uint64_t extensions_of_prefix = 0;
  std::uint64_t extensions_in_universal = 0;
  ExactProb mu_n;     // mu^n(s | h_forall) for the all-good s
  ExactProb counted;  // Max-Ent share over the extensions of s
  ExactProb formula;  // maxent_dilution(mu_n, m, branching)
  Rational factor;    // counted / mu_n
  bool equal = false;
};

/// Prefix-distinguishing hypotheses O({w}), w in V^len, under the uniform
/// model.
DilutionReport dilution_experiment(std::size_t n, std::size_t m, std::size_t branching = 2,
                                   const Limits& limits = {});

struct StringSample {
  Word string;
  /// 1-based position of the first bad letter; 0 when there is none.
  std::size_t first_violation = 0;
};

/// Seeded strings of length <= max_length with a known first bad letter.
std::vector<StringSample> sample_violating_strings(std::uint64_t seed, std::size_t count,
                                                   std::size_t max_length,
                                                   const std::vector<bool>& good);

struct CompactnessMismatch {
  Word string;
  std::size_t expected = 0;
  std::size_t observed = 0;  // first excluded stage, 0 for never
};

struct CompactnessReport {
  std::size_t total = 0;
  std::size_t matches = 0;
  std::vector<CompactnessMismatch> mismatches;
};

/// For each sample, the first stage at which membership_at_stage reports
/// excluded must equal the first bad position (never, for clean strings).
CompactnessReport compactness_check(const BorelFamily& universal,
                                    const std::vector<bool>& good,
                                    std::span<const StringSample> samples,
                                    const Limits& limits = {});

// ---- VC dimension ----------------------------------------------------------

struct VCReport {
  std::size_t dimension = 0;
  std::vector<Word> witness;
  std::uint64_t subsets_examined = 0;
};

/// Exact VC dimension of the family restricted to `universe` (at most 64
/// strings). An empty family has dimension 0. CapExceeded when more than `cap`
/// subsets would be examined.
VCReport vc_dimension_bruteforce(std::span<const Membership> family,
                                 std::span<const Word> universe, std::uint64_t cap);

// ---- word order --------------------------------------------------------------

/// O(A) over word-level token strings.
struct TokenClopen {
  std::vector<std::vector<std::string>> prefixes;
  bool contains(const TokenString& ts) const;
};

/// { "a1 is not blue a1 is A" }: a1 is A and not blue.
TokenClopen negation_pairing_target();

enum class Scorer { order_sensitive, bag_of_words };
std::string to_string(Scorer s);

/// order_sensitive: 1 if ts lies in O(A), else 0.
/// bag_of_words: share of members of A whose token multiset is contained in
/// the multiset of ts. Depends on the multiset only.
Rational score_tokens(const TokenClopen& target, const TokenString& ts, Scorer scorer);

struct WordOrderReport {
  Scorer scorer = Scorer::order_sensitive;
  TokenString member;
  TokenString permuted;
  std::vector<std::size_t> permutation;
  Rational member_score;
  Rational permuted_score;
  bool separated = false;
};

/// Finds a member of A and a permutation of it outside O(A), then scores both.
/// Single-token moves that keep the string well formed in `vocab` are tried
/// first, then all permutations (up to `max_tokens` tokens).
WordOrderReport word_order_experiment(const TokenClopen& target, Scorer scorer,
                                      const Vocabulary& vocab = Vocabulary::language_l_plus(),
                                      std::size_t max_tokens = 9);

}  // namespace qlab
