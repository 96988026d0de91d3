#include "qlab/borel.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace qlab {

namespace {

bool is_prefix_of(const Word& p, const Word& w) {
  return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

std::size_t count_good(const Word& w, const std::vector<bool>& good) {
  return static_cast<std::size_t>(
      std::count_if(w.begin(), w.end(), [&](Letter l) { return l < good.size() && good[l]; }));
}

void require_depth(const ClopenSet& c, std::size_t depth) {
  if (c.base().max_length() > depth)
    throw std::invalid_argument("prefix of length " + std::to_string(c.base().max_length()) +
                                " exceeds depth " + std::to_string(depth));
}

void require_same_alphabet(const ClopenSet& a, const ClopenSet& b) {
  if (a.alphabet_size() != b.alphabet_size())
    throw std::invalid_argument("clopen sets over different alphabets");
}

ClopenSet words_where(std::size_t k, std::size_t n,
                      const std::function<bool(const Word&)>& keep) {
  std::set<Word> words;
  for_each_word(k, n, Limits{}, [&](const Word& w) {
    if (keep(w)) words.insert(w);
  });
  return ClopenSet::of_words(k, std::move(words));
}

}  // namespace

// ---- PrefixSet / ClopenSet -------------------------------------------------

PrefixSet::PrefixSet(std::size_t alphabet_size, std::set<Word> prefixes)
    : alphabet_size_(alphabet_size), prefixes_(std::move(prefixes)) {
  for (const auto& p : prefixes_)
    for (const auto l : p)
      if (l >= alphabet_size_)
        throw UnknownSymbol("letter " + std::to_string(l) + " outside alphabet of size " +
                            std::to_string(alphabet_size_));
}

std::size_t PrefixSet::max_length() const {
  std::size_t m = 0;
  for (const auto& p : prefixes_) m = std::max(m, p.size());
  return m;
}

bool PrefixSet::normalized() const {
  for (const auto& p : prefixes_)
    for (const auto& q : prefixes_)
      if (p != q && is_prefix_of(p, q)) return false;
  return true;
}

PrefixSet PrefixSet::normalize() const {
  std::set<Word> kept;
  for (const auto& q : prefixes_) {
    const bool redundant = std::any_of(prefixes_.begin(), prefixes_.end(), [&](const Word& p) {
      return p != q && is_prefix_of(p, q);
    });
    if (!redundant) kept.insert(q);
  }
  return PrefixSet(alphabet_size_, std::move(kept));
}

ClopenSet ClopenSet::full(std::size_t alphabet_size) {
  return ClopenSet(PrefixSet(alphabet_size, {Word{}}));
}

ClopenSet ClopenSet::empty(std::size_t alphabet_size) {
  return ClopenSet(PrefixSet(alphabet_size));
}

ClopenSet ClopenSet::of_words(std::size_t alphabet_size, std::set<Word> words) {
  return ClopenSet(PrefixSet(alphabet_size, std::move(words)));
}

std::optional<bool> ClopenSet::decides(const Word& w) const {
  bool undecided = false;
  for (const auto& p : base_.prefixes()) {
    if (is_prefix_of(p, w)) return true;
    if (is_prefix_of(w, p)) undecided = true;
  }
  if (undecided) return std::nullopt;
  return false;
}

std::set<Word> ClopenSet::stage_words(std::size_t depth, const Limits& limits) const {
  require_depth(*this, depth);
  std::set<Word> out;
  for (const auto& p : base_.prefixes()) {
    for_each_word(alphabet_size(), depth - p.size(), limits, [&](const Word& tail) {
      Word w = p;
      w.insert(w.end(), tail.begin(), tail.end());
      out.insert(std::move(w));
    });
    if (out.size() > limits.max_strings)
      throw SizeLimitExceeded("stage words exceed cap " + std::to_string(limits.max_strings));
  }
  return out;
}

bool ClopenSet::same_denotation(const ClopenSet& other, std::size_t depth,
                                const Limits& limits) const {
  return stage_words(depth, limits) == other.stage_words(depth, limits);
}

ClopenSet complement_clopen(const ClopenSet& c, std::size_t depth, const Limits& limits) {
  const auto inside = c.stage_words(depth, limits);
  std::set<Word> out;
  for_each_word(c.alphabet_size(), depth, limits, [&](const Word& w) {
    if (!inside.count(w)) out.insert(w);
  });
  return ClopenSet::of_words(c.alphabet_size(), std::move(out));
}

ClopenSet intersect_clopen(const ClopenSet& a, const ClopenSet& b, std::size_t depth,
                           const Limits& limits) {
  require_same_alphabet(a, b);
  const auto wa = a.stage_words(depth, limits);
  const auto wb = b.stage_words(depth, limits);
  std::set<Word> out;
  std::set_intersection(wa.begin(), wa.end(), wb.begin(), wb.end(),
                        std::inserter(out, out.end()));
  return ClopenSet::of_words(a.alphabet_size(), std::move(out));
}

ClopenSet union_clopen(const ClopenSet& a, const ClopenSet& b, std::size_t depth,
                       const Limits& limits) {
  require_same_alphabet(a, b);
  auto out = a.stage_words(depth, limits);
  const auto wb = b.stage_words(depth, limits);
  out.insert(wb.begin(), wb.end());
  return ClopenSet::of_words(a.alphabet_size(), std::move(out));
}

// ---- families --------------------------------------------------------------

std::string to_string(BorelKind k) { return k == BorelKind::pi01 ? "pi01" : "sigma01"; }

std::string to_string(StageMembership m) {
  switch (m) {
    case StageMembership::excluded:
      return "excluded";
    case StageMembership::possible:
      return "possible";
    case StageMembership::witnessed:
      return "witnessed";
  }
  return "?";
}

ClopenSet stage(const BorelFamily& f, std::size_t n, const Limits& limits) {
  auto current = f.generator(n);
  if (current.alphabet_size() != f.alphabet_size)
    throw std::invalid_argument("family '" + f.name + "' produced a stage over another alphabet");
  if (f.monotone && n > 0) {
    const auto previous = f.generator(n - 1);
    const std::size_t depth = std::max(current.base().max_length(), previous.base().max_length());
    const auto now = current.stage_words(depth, limits);
    const auto before = previous.stage_words(depth, limits);
    const auto& inner = f.kind == BorelKind::pi01 ? now : before;
    const auto& outer = f.kind == BorelKind::pi01 ? before : now;
    if (!std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()))
      throw MonotonicityViolation("family '" + f.name + "' is not nested between stages " +
                                  std::to_string(n - 1) + " and " + std::to_string(n));
  }
  return current;
}

StageMembership membership_at_stage(const BorelFamily& f, const Word& prefix,
                                    const Limits& limits) {
  const auto inside =
      f.stage_decides ? f.stage_decides(prefix) : stage(f, prefix.size(), limits).decides(prefix);
  if (f.kind == BorelKind::pi01)
    return inside == false ? StageMembership::excluded : StageMembership::possible;
  return inside == true ? StageMembership::witnessed : StageMembership::possible;
}

namespace {

// Family whose stage n is { w in V^n : keep(w) }.
BorelFamily rule_family(std::string name, BorelKind kind, std::size_t k,
                        std::function<bool(const Word&)> keep) {
  BorelFamily f;
  f.name = std::move(name);
  f.kind = kind;
  f.alphabet_size = k;
  f.generator = [k, keep](std::size_t n) { return words_where(k, n, keep); };
  f.stage_decides = [keep](const Word& w) -> std::optional<bool> { return keep(w); };
  return f;
}

}  // namespace

BorelFamily universal_family(std::vector<bool> good, std::string name) {
  const std::size_t k = good.size();
  return rule_family(std::move(name), BorelKind::pi01, k, [good = std::move(good)](const Word& w) {
    return count_good(w, good) == w.size();
  });
}

BorelFamily existential_family(std::vector<bool> good, std::string name) {
  const std::size_t k = good.size();
  return rule_family(std::move(name), BorelKind::sigma01, k,
                     [good = std::move(good)](const Word& w) { return count_good(w, good) > 0; });
}

BorelFamily counting_threshold_family(std::vector<bool> good, std::size_t k, std::string name) {
  const std::size_t size = good.size();
  return rule_family(std::move(name), BorelKind::sigma01, size,
                     [good = std::move(good), k](const Word& w) { return count_good(w, good) >= k; });
}

BorelFamily prefix_window_family(ClopenSet set, std::string name, BorelKind kind) {
  BorelFamily f;
  f.name = std::move(name);
  f.kind = kind;
  f.alphabet_size = set.alphabet_size();
  f.stage_decides = [set](const Word& w) { return set.decides(w); };
  f.generator = [set = std::move(set)](std::size_t) { return set; };
  return f;
}

BorelFamily sentence_family(const Sentence& phi, const Vocabulary& vocab) {
  auto good = good_letters(phi, vocab);
  return phi.quantifier == Quantifier::forall ? universal_family(std::move(good), render(phi))
                                              : existential_family(std::move(good), render(phi));
}

// ---- registry --------------------------------------------------------------

void FamilyRegistry::add(BorelFamily f) {
  const auto name = f.name;
  if (!families_.emplace(name, std::move(f)).second)
    throw ConfigError("family '" + name + "' registered twice");
}

const BorelFamily& FamilyRegistry::at(const std::string& name) const {
  const auto it = families_.find(name);
  if (it == families_.end()) throw ConfigError("no family named '" + name + "'");
  return it->second;
}

std::vector<std::string> FamilyRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, f] : families_) out.push_back(name);
  return out;
}

FamilyRegistry FamilyRegistry::from_json_text(const std::string& text, const Vocabulary& vocab) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("family config: ") + e.what());
  }
  const auto& list = doc.contains("families") ? doc.at("families") : doc;
  if (!list.is_array()) throw ConfigError("family config must be an array of families");

  FamilyRegistry reg;
  for (const auto& entry : list) {
    try {
      const auto name = entry.at("name").get<std::string>();
      const auto gen = entry.at("generator").get<std::string>();
      Sentence phi{Quantifier::forall, entry.value("predicate", std::string("blue")),
                   entry.value("negated", false) ? Polarity::negative : Polarity::positive};
      if (!vocab.has_predicate(phi.predicate))
        throw ConfigError("unknown predicate '" + phi.predicate + "'");
      auto good = good_letters(phi, vocab);
      BorelFamily f;
      if (gen == "universal") {
        f = universal_family(good, name);
      } else if (gen == "existential") {
        f = existential_family(good, name);
      } else if (gen == "counting-threshold") {
        f = counting_threshold_family(good, entry.at("threshold").get<std::size_t>(), name);
      } else if (gen == "prefix-window") {
        std::set<Word> prefixes;
        if (entry.contains("prefixes")) {
          for (const auto& p : entry.at("prefixes")) {
            Word w;
            std::istringstream in(p.get<std::string>());
            for (std::string letter; in >> letter;) {
              const auto l = vocab.alphabet().find(letter);
              if (!l) throw ConfigError("unknown letter '" + letter + "'");
              w.push_back(*l);
            }
            prefixes.insert(std::move(w));
          }
        } else {
          const auto window = entry.at("window").get<std::size_t>();
          for_each_word(good.size(), window, Limits{}, [&](const Word& w) {
            if (count_good(w, good) == w.size()) prefixes.insert(w);
          });
        }
        const auto kind = entry.value("kind", std::string("pi01")) == "sigma01"
                              ? BorelKind::sigma01
                              : BorelKind::pi01;
        f = prefix_window_family(ClopenSet(PrefixSet(good.size(), std::move(prefixes))), name,
                                 kind);
      } else {
        throw ConfigError("unknown generator '" + gen + "'");
      }
      if (entry.contains("kind") && gen != "prefix-window" &&
          entry.at("kind").get<std::string>() != to_string(f.kind))
        throw ConfigError("family '" + name + "': generator '" + gen + "' is " +
                          to_string(f.kind));
      reg.add(std::move(f));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("family config: ") + e.what());
    }
  }
  return reg;
}

// ---- classification --------------------------------------------------------

std::string to_string(HierarchyLevel level) {
  switch (level) {
    case HierarchyLevel::delta01:
      return "delta01";
    case HierarchyLevel::sigma01:
      return "sigma01";
    case HierarchyLevel::pi01:
      return "pi01";
    case HierarchyLevel::higher:
      return "higher";
  }
  return "?";
}

bool at_or_below(HierarchyLevel a, HierarchyLevel b) {
  if (a == b || a == HierarchyLevel::delta01 || b == HierarchyLevel::higher) return true;
  return false;
}

ConceptRegistry::ConceptRegistry() { external_.insert("conversational-coherence"); }

void ConceptRegistry::register_external(std::string name) { external_.insert(std::move(name)); }

HierarchyLevel classify(const Concept& target, const Vocabulary& vocab,
                        const ConceptRegistry& registry) {
  if (const auto* s = std::get_if<Sentence>(&target)) {
    if (!vocab.has_predicate(s->predicate))
      throw UnsupportedConcept("predicate '" + s->predicate + "' not in vocabulary");
    const auto good = good_letters(*s, vocab);
    const auto n_good = std::count(good.begin(), good.end(), true);
    // All letters good or none: the set is V^omega or empty, clopen either way.
    if (n_good == 0 || static_cast<std::size_t>(n_good) == good.size())
      return HierarchyLevel::delta01;
    return s->quantifier == Quantifier::forall ? HierarchyLevel::pi01 : HierarchyLevel::sigma01;
  }
  if (std::holds_alternative<ClopenConcept>(target)) return HierarchyLevel::delta01;
  const auto& ext = std::get<ExternalConcept>(target);
  if (!registry.known(ext.name))
    throw UnsupportedConcept("no registered descriptor '" + ext.name + "'");
  return HierarchyLevel::higher;
}

}  // namespace qlab
