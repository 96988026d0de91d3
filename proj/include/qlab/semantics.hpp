#pragma once

#include "qlab/lang.hpp"

#include <iosfwd>
#include <optional>
#include <set>
#include <vector>

namespace qlab {

enum class TruthVerdict { holds, fails, undetermined };

/// lenient: an object whose status for the sentence's predicate is not fixed
/// by the diagram is left open. strict: such an object is an error.
enum class Strictness { lenient, strict };

/// open: the diagram is a prefix of an infinite string (more objects follow).
/// closed: the diagram is the whole finite model.
enum class Domain { open, closed };

std::string to_string(TruthVerdict v);

/// Length-n words over the vocabulary's alphabet consistent with a sentence.
struct ContinuationSet {
  std::size_t length = 0;
  std::set<Word> members;
  std::optional<Sentence> sentence;

  bool contains(const Word& w) const { return members.count(w) != 0; }
  std::size_t size() const noexcept { return members.size(); }
  std::vector<AtomicDiagram> diagrams(const Vocabulary& vocab) const;
};

/// Sorted, one diagram per line (see write_diagrams).
void write_continuation_set(std::ostream& out, const ContinuationSet& set,
                            const Vocabulary& vocab);

/// Three-valued evaluation of a sentence on a diagram.
TruthVerdict consistent_with(const AtomicDiagram& prefix, const Sentence& phi,
                             const Vocabulary& vocab, Domain domain = Domain::open);

/// Evaluation on the finite model the diagram defines (closed domain).
/// Lenient mode returns undetermined when an open object decides the outcome;
/// strict mode throws UnderdeterminedObject for any open object.
TruthVerdict judge(const AtomicDiagram& d, const Sentence& phi, const Vocabulary& vocab,
                   Strictness strictness = Strictness::lenient);

/// Two-valued model check. Throws UnderdeterminedObject when the outcome is
/// not fixed (and, in strict mode, whenever any mentioned object is open).
bool satisfies(const AtomicDiagram& d, const Sentence& phi, const Vocabulary& vocab,
               Strictness strictness = Strictness::strict);

/// Independent object-by-object re-implementation of satisfies (strict).
bool brute_force_oracle(const AtomicDiagram& d, const Sentence& phi, const Vocabulary& vocab);

/// good[l] is true iff an object carrying letter l satisfies the (signed)
/// predicate of phi.
std::vector<bool> good_letters(const Sentence& phi, const Vocabulary& vocab);

/// { d in V^n : d does not refute phi on its own finite model }.
ContinuationSet continuation_set(const Sentence& phi, std::size_t n, const Vocabulary& vocab,
                                 const Limits& limits = {});

struct ConsequenceResult {
  bool holds = true;
  std::size_t up_to = 0;        // checked every size m <= up_to
  bool includes_empty = false;  // whether m = 0 was checked
  std::optional<Word> counterexample;
};

/// Finite-domain approximation of Gamma |= phi: continuation-set inclusion at
/// every size up to n (m = 0 only when include_empty is set).
ConsequenceResult semantic_consequence(const std::vector<Sentence>& gamma, const Sentence& phi,
                                       std::size_t n, const Vocabulary& vocab,
                                       const Limits& limits = {}, bool include_empty = false);

}  // namespace qlab
