#include "qlab/semantics.hpp"

#include <map>
#include <ostream>

namespace qlab {

namespace {

enum class Status { sat, unsat, open };

// Status of every mentioned object for the signed predicate of phi, in order
// of first mention.
std::vector<std::pair<std::string, Status>> object_statuses(const AtomicDiagram& d,
                                                           const Sentence& phi,
                                                           const Vocabulary& vocab) {
  struct Acc {
    bool has = false;
    bool lacks = false;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (const auto& lit : d.literals()) {
    auto [it, fresh] = acc.try_emplace(lit.constant);
    if (fresh) order.push_back(lit.constant);
    if (lit.predicate == phi.predicate) {
      (lit.polarity == Polarity::positive ? it->second.has : it->second.lacks) = true;
    } else if (lit.polarity == Polarity::positive && vocab.exclusive(lit.predicate, phi.predicate)) {
      it->second.lacks = true;
    }
  }
  std::vector<std::pair<std::string, Status>> out;
  out.reserve(order.size());
  for (const auto& name : order) {
    const auto& a = acc[name];
    if (a.has && a.lacks)
      throw InconsistentDiagram("object '" + name + "' both is and is not " + phi.predicate);
    Status s = Status::open;
    if (a.has || a.lacks) {
      const bool holds = a.has;
      s = (holds == (phi.polarity == Polarity::positive)) ? Status::sat : Status::unsat;
    }
    out.emplace_back(name, s);
  }
  return out;
}

}  // namespace

std::string to_string(TruthVerdict v) {
  switch (v) {
    case TruthVerdict::holds:
      return "true";
    case TruthVerdict::fails:
      return "false";
    case TruthVerdict::undetermined:
      return "undetermined";
  }
  return "?";
}

std::vector<AtomicDiagram> ContinuationSet::diagrams(const Vocabulary& vocab) const {
  std::vector<AtomicDiagram> out;
  out.reserve(members.size());
  for (const auto& w : members) out.push_back(vocab.decode(w));
  return out;
}

void write_continuation_set(std::ostream& out, const ContinuationSet& set,
                            const Vocabulary& vocab) {
  const auto ds = set.diagrams(vocab);
  write_diagrams(out, ds);
}

TruthVerdict consistent_with(const AtomicDiagram& prefix, const Sentence& phi,
                             const Vocabulary& vocab, Domain domain) {
  bool any_sat = false;
  bool any_unsat = false;
  bool any_open = false;
  for (const auto& [name, s] : object_statuses(prefix, phi, vocab)) {
    any_sat |= s == Status::sat;
    any_unsat |= s == Status::unsat;
    any_open |= s == Status::open;
  }
  if (phi.quantifier == Quantifier::forall) {
    if (any_unsat) return TruthVerdict::fails;
    if (domain == Domain::open || any_open) return TruthVerdict::undetermined;
    return TruthVerdict::holds;
  }
  if (any_sat) return TruthVerdict::holds;
  if (domain == Domain::open || any_open) return TruthVerdict::undetermined;
  return TruthVerdict::fails;
}

TruthVerdict judge(const AtomicDiagram& d, const Sentence& phi, const Vocabulary& vocab,
                   Strictness strictness) {
  if (strictness == Strictness::strict) {
    for (const auto& [name, s] : object_statuses(d, phi, vocab))
      if (s == Status::open)
        throw UnderdeterminedObject("status of '" + name + "' for '" + phi.predicate +
                                    "' is not fixed");
  }
  return consistent_with(d, phi, vocab, Domain::closed);
}

bool satisfies(const AtomicDiagram& d, const Sentence& phi, const Vocabulary& vocab,
               Strictness strictness) {
  const auto v = judge(d, phi, vocab, strictness);
  if (v == TruthVerdict::undetermined)
    throw UnderdeterminedObject("'" + render(phi) + "' depends on objects left open");
  return v == TruthVerdict::holds;
}

bool brute_force_oracle(const AtomicDiagram& d, const Sentence& phi, const Vocabulary& vocab) {
  const auto& lits = d.literals();
  const bool want = phi.polarity == Polarity::positive;
  bool all = true;
  bool some = false;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const std::string& obj = lits[i].constant;
    bool first = true;
    for (std::size_t j = 0; j < i; ++j)
      if (lits[j].constant == obj) first = false;
    if (!first) continue;

    int verdict = -1;  // -1 unknown, 0 lacks predicate, 1 has predicate
    for (const auto& other : lits) {
      if (other.constant != obj) continue;
      int says = -1;
      if (other.predicate == phi.predicate)
        says = other.polarity == Polarity::positive ? 1 : 0;
      else if (other.polarity == Polarity::positive && vocab.exclusive(other.predicate, phi.predicate))
        says = 0;
      if (says < 0) continue;
      if (verdict >= 0 && verdict != says)
        throw InconsistentDiagram("object '" + obj + "' is contradictory");
      verdict = says;
    }
    if (verdict < 0) throw UnderdeterminedObject("object '" + obj + "' is open");
    const bool ok = (verdict == 1) == want;
    all = all && ok;
    some = some || ok;
  }
  return phi.quantifier == Quantifier::forall ? all : some;
}

std::vector<bool> good_letters(const Sentence& phi, const Vocabulary& vocab) {
  std::vector<bool> good(vocab.alphabet().size());
  for (Letter l = 0; l < good.size(); ++l) {
    const AtomicDiagram block(vocab.letter_literals(l, 0));
    const Sentence probe{Quantifier::forall, phi.predicate, phi.polarity};
    good[l] = judge(block, probe, vocab, Strictness::lenient) == TruthVerdict::holds;
  }
  return good;
}

ContinuationSet continuation_set(const Sentence& phi, std::size_t n, const Vocabulary& vocab,
                                 const Limits& limits) {
  if (!vocab.has_predicate(phi.predicate))
    throw UnknownSymbol("predicate '" + phi.predicate + "'");
  ContinuationSet out;
  out.length = n;
  out.sentence = phi;
  for_each_word(vocab.alphabet().size(), n, limits, [&](const Word& w) {
    if (consistent_with(vocab.decode(w), phi, vocab, Domain::closed) != TruthVerdict::fails)
      out.members.insert(w);
  });
  return out;
}

ConsequenceResult semantic_consequence(const std::vector<Sentence>& gamma, const Sentence& phi,
                                       std::size_t n, const Vocabulary& vocab,
                                       const Limits& limits, bool include_empty) {
  ConsequenceResult result;
  result.up_to = n;
  result.includes_empty = include_empty;
  for (std::size_t m = include_empty ? 0 : 1; m <= n; ++m) {
    std::vector<ContinuationSet> premises;
    premises.reserve(gamma.size());
    for (const auto& g : gamma) premises.push_back(continuation_set(g, m, vocab, limits));
    const auto conclusion = continuation_set(phi, m, vocab, limits);
    std::optional<Word> bad;
    for_each_word(vocab.alphabet().size(), m, limits, [&](const Word& w) {
      if (bad) return;
      for (const auto& p : premises)
        if (!p.contains(w)) return;
      if (!conclusion.contains(w)) bad = w;
    });
    if (bad) {
      result.holds = false;
      result.counterexample = std::move(bad);
      return result;
    }
  }
  return result;
}

}  // namespace qlab
