#pragma once

// Cantor-topology set algebra over infinite words. A ClopenSet O(A) is given
// by a finite prefix set A and denotes A.V^omega. Pi^0_1 / Sigma^0_1 sets are
// handled through rule-generated families of clopen stages; membership of an
// infinite word is never decided, only observed at a finite stage.

#include "qlab/lang.hpp"
#include "qlab/semantics.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>

namespace qlab {

class PrefixSet {
 public:
  explicit PrefixSet(std::size_t alphabet_size, std::set<Word> prefixes = {});

  std::size_t alphabet_size() const noexcept { return alphabet_size_; }
  const std::set<Word>& prefixes() const noexcept { return prefixes_; }
  std::size_t max_length() const;

  /// True iff no member extends another member.
  bool normalized() const;
  /// Drops members that extend another member; the denotation is unchanged.
  PrefixSet normalize() const;

  friend bool operator==(const PrefixSet&, const PrefixSet&) = default;

 private:
  std::size_t alphabet_size_;
  std::set<Word> prefixes_;
};

class ClopenSet {
 public:
  explicit ClopenSet(PrefixSet base) : base_(std::move(base)) {}
  static ClopenSet full(std::size_t alphabet_size);
  static ClopenSet empty(std::size_t alphabet_size);
  /// All words of one length; `words` must share that length.
  static ClopenSet of_words(std::size_t alphabet_size, std::set<Word> words);

  const PrefixSet& base() const noexcept { return base_; }
  std::size_t alphabet_size() const noexcept { return base_.alphabet_size(); }

  /// Whether every infinite word starting with w is inside (true), every one
  /// is outside (false), or w is too short to tell (nullopt).
  std::optional<bool> decides(const Word& w) const;

  /// The denotation cut at length `depth`: all length-depth words inside.
  std::set<Word> stage_words(std::size_t depth, const Limits& limits = {}) const;
  bool same_denotation(const ClopenSet& other, std::size_t depth,
                       const Limits& limits = {}) const;

 private:
  PrefixSet base_;
};

/// Complement, represented by length-depth prefixes.
ClopenSet complement_clopen(const ClopenSet& c, std::size_t depth, const Limits& limits = {});
ClopenSet intersect_clopen(const ClopenSet& a, const ClopenSet& b, std::size_t depth,
                           const Limits& limits = {});
ClopenSet union_clopen(const ClopenSet& a, const ClopenSet& b, std::size_t depth,
                       const Limits& limits = {});

// ---- families --------------------------------------------------------------

enum class BorelKind { pi01, sigma01 };
std::string to_string(BorelKind k);

struct BorelFamily {
  std::string name;
  BorelKind kind = BorelKind::pi01;
  std::size_t alphabet_size = 2;
  /// Pure, deterministic rule n -> B_n.
  std::function<ClopenSet(std::size_t)> generator;
  /// pi01: B_{n+1} inside B_n; sigma01: B_n inside B_{n+1}.
  bool monotone = true;
  /// Optional shortcut: does B_{|w|} decide w (as ClopenSet::decides would)?
  /// Lets membership queries at long stages avoid materialising B_n.
  std::function<std::optional<bool>(const Word&)> stage_decides;
};

/// B_n, with the nesting against B_{n-1} checked for monotone families.
ClopenSet stage(const BorelFamily& f, std::size_t n, const Limits& limits = {});

enum class StageMembership { excluded, possible, witnessed };
std::string to_string(StageMembership m);

StageMembership membership_at_stage(const BorelFamily& f, const Word& prefix,
                                    const Limits& limits = {});

/// Stage n: length-n words whose letters are all good. Pi^0_1.
BorelFamily universal_family(std::vector<bool> good, std::string name = "universal");
/// Stage n: length-n words with at least one good letter. Sigma^0_1.
BorelFamily existential_family(std::vector<bool> good, std::string name = "existential");
/// Stage n: length-n words with at least k good letters. Sigma^0_1.
BorelFamily counting_threshold_family(std::vector<bool> good, std::size_t k,
                                      std::string name = "counting-threshold");
/// Every stage is the same clopen set.
BorelFamily prefix_window_family(ClopenSet set, std::string name = "prefix-window",
                                 BorelKind kind = BorelKind::pi01);

/// The family of a quantified sentence over the vocabulary's alphabet.
BorelFamily sentence_family(const Sentence& phi, const Vocabulary& vocab);

/// Families by name, built from a declarative JSON config (docs/formats.md).
class FamilyRegistry {
 public:
  void add(BorelFamily f);
  const BorelFamily& at(const std::string& name) const;
  bool contains(const std::string& name) const { return families_.count(name) != 0; }
  std::vector<std::string> names() const;

  static FamilyRegistry from_json_text(const std::string& text, const Vocabulary& vocab);

 private:
  std::map<std::string, BorelFamily> families_;
};

// ---- classification --------------------------------------------------------

enum class HierarchyLevel { delta01, sigma01, pi01, higher };
std::string to_string(HierarchyLevel level);

/// Partial order of the hierarchy diagram: delta01 below sigma01 and pi01,
/// both below higher.
bool at_or_below(HierarchyLevel a, HierarchyLevel b);

struct ClopenConcept {
  std::string name;
  ClopenSet set;
};
struct ExternalConcept {
  std::string name;
};
using Concept = std::variant<Sentence, ClopenConcept, ExternalConcept>;

/// External concept descriptors carrying the static label "higher".
class ConceptRegistry {
 public:
  /// Pre-registers the conversational-coherence descriptor.
  ConceptRegistry();
  void register_external(std::string name);
  bool known(const std::string& name) const { return external_.count(name) != 0; }

 private:
  std::set<std::string> external_;
};

HierarchyLevel classify(const Concept& target, const Vocabulary& vocab,
                        const ConceptRegistry& registry = {});

}  // namespace qlab
