#pragma once

// Vocabulary, literals, atomic-diagram strings and the quantified sentence
// fragment. Two surface syntaxes are accepted (see docs/grammar.md):
//
//   formal:   blue(a3)   ¬blue(a3)   ~blue(a3)
//   natural:  The car is blue.   a1 is not blue.
//
// An AtomicDiagram is the literal-level string. For enumeration every
// vocabulary also has a per-position Alphabet: one letter fixes the status of
// one object for every predicate dimension (an exclusivity group is a single
// dimension whose choices are its members). Words over that alphabet are the
// finite strings the borel, prob and learnlab modules operate on.

#include "qlab/errors.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlab {

enum class Polarity { positive, negative };
enum class Quantifier { forall, exists };

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

struct Literal {
  std::string predicate;
  std::string constant;
  Polarity polarity = Polarity::positive;

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

class AtomicDiagram {
 public:
  AtomicDiagram() = default;
  explicit AtomicDiagram(std::vector<Literal> literals) : literals_(std::move(literals)) {}

  const std::vector<Literal>& literals() const noexcept { return literals_; }
  std::size_t size() const noexcept { return literals_.size(); }
  bool empty() const noexcept { return literals_.empty(); }
  const Literal& operator[](std::size_t i) const { return literals_[i]; }

  /// Distinct constants in order of first mention.
  std::vector<std::string> objects() const;

  AtomicDiagram prefix(std::size_t n) const;
  AtomicDiagram concat(const AtomicDiagram& tail) const;

  friend bool operator==(const AtomicDiagram&, const AtomicDiagram&) = default;
  friend auto operator<=>(const AtomicDiagram&, const AtomicDiagram&) = default;

 private:
  std::vector<Literal> literals_;
};

struct Sentence {
  Quantifier quantifier = Quantifier::forall;
  std::string predicate;
  Polarity polarity = Polarity::positive;

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct TokenString {
  std::vector<std::string> tokens;
  friend bool operator==(const TokenString&, const TokenString&) = default;
};

/// Letter names of a per-position alphabet, e.g. {"blue", "~blue"}.
struct Alphabet {
  std::vector<std::string> names;

  std::size_t size() const noexcept { return names.size(); }
  /// Two anonymous letters {"p", "n"}.
  static Alphabet binary();
  std::optional<Letter> find(std::string_view name) const;
};

class Vocabulary {
 public:
  /// `indexed_prefix` non-empty makes every `<prefix><k>` (k >= 1) a constant,
  /// modelling the countably infinite constants a1, a2, ...
  Vocabulary(std::vector<std::string> constants, std::vector<std::string> predicates,
             std::vector<std::vector<std::string>> exclusivity_groups = {},
             std::string indexed_prefix = {});

  /// Indexed constants a1, a2, ... and the single predicate `blue`.
  static Vocabulary language_l();
  /// As language_l() plus the independent predicate `A`.
  static Vocabulary language_l_plus();
  /// Everyday nouns, mutually exclusive colour terms and `large`.
  static Vocabulary colors();

  const std::vector<std::string>& constants() const noexcept { return constants_; }
  const std::vector<std::string>& predicates() const noexcept { return predicates_; }
  const std::vector<std::vector<std::string>>& exclusivity_groups() const noexcept {
    return groups_;
  }
  const std::string& indexed_prefix() const noexcept { return indexed_prefix_; }

  bool has_constant(std::string_view name) const;
  bool has_predicate(std::string_view name) const;
  /// True iff p != q and both sit in one exclusivity group.
  bool exclusive(std::string_view p, std::string_view q) const;

  /// Name of the object at 0-based canonical position `index`.
  std::string object(std::size_t index) const;

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  /// Literals written for the object at `object_index` when it carries `letter`.
  std::vector<Literal> letter_literals(Letter letter, std::size_t object_index) const;
  std::size_t literals_per_letter() const noexcept { return dimensions_.size(); }

  AtomicDiagram decode(std::span<const Letter> word) const;
  /// Inverse of decode(); nullopt when the diagram is not in canonical form.
  std::optional<Word> encode(const AtomicDiagram& diagram) const;

 private:
  struct Dimension {
    std::vector<std::string> choices;  // one predicate per choice when grouped
    bool grouped = false;
  };

  std::vector<std::string> constants_;
  std::vector<std::string> predicates_;
  std::vector<std::vector<std::string>> groups_;
  std::string indexed_prefix_;
  std::vector<Dimension> dimensions_;
  Alphabet alphabet_;
};

// ---- parsing and rendering -------------------------------------------------

Literal parse_literal(std::string_view text, const Vocabulary& vocab);
AtomicDiagram parse_model_string(std::string_view text, const Vocabulary& vocab);

/// "forall blue", "exists not blue", "∀blue", "∃¬blue", "Every object is blue".
Sentence parse_sentence(std::string_view text, const Vocabulary& vocab);

std::string render_formal(const Literal& lit);
std::string render_formal(const AtomicDiagram& d);
std::string render_natural(const Literal& lit, const Vocabulary& vocab);
std::string render_natural(const AtomicDiagram& d, const Vocabulary& vocab);
std::string render(const Sentence& s);
std::string render_word(std::span<const Letter> word, const Alphabet& alphabet);

/// Line format: one diagram per line, formal literals separated by blanks,
/// "-" for the empty diagram.
void write_diagrams(std::ostream& out, std::span<const AtomicDiagram> diagrams);
std::vector<AtomicDiagram> read_diagrams(std::istream& in, const Vocabulary& vocab);

// ---- word-level tokens -----------------------------------------------------

TokenString tokenize(const AtomicDiagram& d);
AtomicDiagram detokenize(const TokenString& ts, const Vocabulary& vocab);

/// result[i] = ts[permutation[i]].
TokenString permute(const TokenString& ts, std::span<const std::size_t> permutation);
std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> permutation);

// ---- enumeration -----------------------------------------------------------

/// k^n, or SizeLimitExceeded when it would exceed `limits`.
std::uint64_t count_words(std::size_t alphabet_size, std::size_t n, const Limits& limits);

/// Visits every word of length n in lexicographic order.
void for_each_word(std::size_t alphabet_size, std::size_t n, const Limits& limits,
                   const std::function<void(const Word&)>& visit);
std::vector<Word> enumerate_words(std::size_t alphabet_size, std::size_t n,
                                  const Limits& limits);

/// One object per position in canonical order; |alphabet|^n diagrams.
void enumerate_diagrams(std::size_t n, const Vocabulary& vocab, const Limits& limits,
                        const std::function<void(const AtomicDiagram&)>& visit);
std::vector<AtomicDiagram> enumerate_diagrams(std::size_t n, const Vocabulary& vocab,
                                              const Limits& limits);

}  // namespace qlab
