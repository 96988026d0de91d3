#include "qlab/lang.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace qlab {

namespace {

constexpr std::string_view kNegSign = "\xC2\xAC";  // ¬
constexpr std::string_view kForall = "\xE2\x88\x80";  // ∀
constexpr std::string_view kExists = "\xE2\x88\x83";  // ∃

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  return std::none_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isspace(c) || c == '(' || c == ')' || c == '.' || c == ',' || c == '~';
  });
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
  return s;
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

// One surface item (formal literal or natural sentence) with its offset.
struct Item {
  std::string text;
  std::size_t offset;
  bool formal;
};

std::vector<Item> split_items(std::string_view text) {
  std::vector<Item> items;
  std::size_t pos = 0;
  auto run_end = [&](std::size_t from) {
    while (from < text.size() && !is_space(text[from])) ++from;
    return from;
  };
  while (true) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = run_end(pos);
    std::string_view word = text.substr(pos, end - pos);
    if (word.find('(') != std::string_view::npos) {
      items.push_back({std::string(word), pos, true});
      pos = end;
      continue;
    }
    // Natural sentence: words up to and including one ending in '.'.
    const std::size_t start = pos;
    std::size_t stop = end;
    while (true) {
      std::string_view w = text.substr(pos, end - pos);
      stop = end;
      pos = end;
      if (!w.empty() && w.back() == '.') break;
      std::size_t next = pos;
      while (next < text.size() && is_space(text[next])) ++next;
      if (next >= text.size()) break;
      const std::size_t next_end = run_end(next);
      if (text.substr(next, next_end - next).find('(') != std::string_view::npos) break;
      pos = next;
      end = next_end;
    }
    items.push_back({std::string(text.substr(start, stop - start)), start, false});
  }
  return items;
}

Literal parse_formal(std::string_view word, const Vocabulary& vocab, std::size_t index,
                     std::size_t offset) {
  while (!word.empty() && (word.back() == '.' || word.back() == ',' || word.back() == ';'))
    word.remove_suffix(1);
  Literal lit;
  if (word.starts_with(kNegSign)) {
    lit.polarity = Polarity::negative;
    word.remove_prefix(kNegSign.size());
  } else if (word.starts_with('~') || word.starts_with('!')) {
    lit.polarity = Polarity::negative;
    word.remove_prefix(1);
  }
  const auto open = word.find('(');
  const auto close = word.find(')');
  if (open == std::string_view::npos || close != word.size() - 1 || close < open + 2 ||
      open == 0)
    throw MalformedLiteral("cannot parse formula '" + std::string(word) + "'", index, offset);
  lit.predicate = std::string(word.substr(0, open));
  lit.constant = std::string(word.substr(open + 1, close - open - 1));
  if (!vocab.has_predicate(lit.predicate))
    throw UnknownSymbol("predicate '" + lit.predicate + "' at literal " + std::to_string(index));
  if (!vocab.has_constant(lit.constant))
    throw UnknownSymbol("constant '" + lit.constant + "' at literal " + std::to_string(index));
  return lit;
}

Literal parse_natural(std::string_view sentence, const Vocabulary& vocab, std::size_t index,
                      std::size_t offset) {
  auto words = split_ws(sentence);
  if (!words.empty() && words.back().ends_with('.')) words.back().pop_back();
  if (!words.empty() && words.back().empty()) words.pop_back();
  std::size_t i = 0;
  if (words.size() >= 4) {
    const auto det = lower(words[0]);
    if (det == "the" || det == "my" || det == "a" || det == "an") i = 1;
  }
  const auto fail = [&] {
    return MalformedLiteral("cannot parse sentence '" + std::string(sentence) + "'", index,
                            offset);
  };
  if (words.size() < i + 3 || words[i + 1] != "is") throw fail();
  Literal lit;
  lit.constant = words[i];
  std::size_t p = i + 2;
  if (words[p] == "not") {
    lit.polarity = Polarity::negative;
    ++p;
  }
  if (p + 1 != words.size()) throw fail();
  lit.predicate = words[p];
  if (!vocab.has_constant(lit.constant))
    throw UnknownSymbol("constant '" + lit.constant + "' at literal " + std::to_string(index));
  if (!vocab.has_predicate(lit.predicate))
    throw UnknownSymbol("predicate '" + lit.predicate + "' at literal " + std::to_string(index));
  return lit;
}

bool is_indexed(std::string_view name, std::string_view prefix) {
  if (prefix.empty() || !name.starts_with(prefix)) return false;
  const auto digits = name.substr(prefix.size());
  if (digits.empty() || digits.front() == '0') return false;
  return std::all_of(digits.begin(), digits.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

// ---- AtomicDiagram ---------------------------------------------------------

std::vector<std::string> AtomicDiagram::objects() const {
  std::vector<std::string> out;
  std::set<std::string_view> seen;
  for (const auto& lit : literals_)
    if (seen.insert(lit.constant).second) out.push_back(lit.constant);
  return out;
}

AtomicDiagram AtomicDiagram::prefix(std::size_t n) const {
  n = std::min(n, literals_.size());
  return AtomicDiagram({literals_.begin(), literals_.begin() + static_cast<std::ptrdiff_t>(n)});
}

AtomicDiagram AtomicDiagram::concat(const AtomicDiagram& tail) const {
  auto lits = literals_;
  lits.insert(lits.end(), tail.literals_.begin(), tail.literals_.end());
  return AtomicDiagram(std::move(lits));
}

// ---- Alphabet --------------------------------------------------------------

Alphabet Alphabet::binary() { return Alphabet{{"p", "n"}}; }

std::optional<Letter> Alphabet::find(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Letter>(i);
  return std::nullopt;
}

// ---- Vocabulary ------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> constants, std::vector<std::string> predicates,
                       std::vector<std::vector<std::string>> exclusivity_groups,
                       std::string indexed_prefix)
    : constants_(std::move(constants)),
      predicates_(std::move(predicates)),
      groups_(std::move(exclusivity_groups)),
      indexed_prefix_(std::move(indexed_prefix)) {
  std::set<std::string> names;
  for (const auto* list : {&constants_, &predicates_})
    for (const auto& n : *list) {
      if (!valid_name(n)) throw InvalidVocabulary("bad name '" + n + "'");
      if (!names.insert(n).second) throw InvalidVocabulary("duplicate name '" + n + "'");
    }
  if (predicates_.empty()) throw InvalidVocabulary("no predicates");
  if (!indexed_prefix_.empty() && !valid_name(indexed_prefix_))
    throw InvalidVocabulary("bad indexed prefix '" + indexed_prefix_ + "'");
  for (const auto& c : constants_)
    if (is_indexed(c, indexed_prefix_))
      throw InvalidVocabulary("constant '" + c + "' collides with indexed constants");

  std::set<std::string> grouped;
  for (const auto& g : groups_) {
    if (g.size() < 2) throw InvalidVocabulary("exclusivity group with fewer than 2 members");
    for (const auto& p : g) {
      if (!has_predicate(p)) throw InvalidVocabulary("group member '" + p + "' is no predicate");
      if (!grouped.insert(p).second)
        throw InvalidVocabulary("predicate '" + p + "' is in two groups (or twice in one)");
    }
  }

  std::set<std::size_t> emitted_groups;
  for (const auto& p : predicates_) {
    std::optional<std::size_t> gi;
    for (std::size_t g = 0; g < groups_.size(); ++g)
      if (std::find(groups_[g].begin(), groups_[g].end(), p) != groups_[g].end()) gi = g;
    if (!gi) {
      dimensions_.push_back({{p}, false});
    } else if (emitted_groups.insert(*gi).second) {
      Dimension dim{{}, true};
      for (const auto& q : predicates_)
        if (std::find(groups_[*gi].begin(), groups_[*gi].end(), q) != groups_[*gi].end())
          dim.choices.push_back(q);
      dimensions_.push_back(std::move(dim));
    }
  }

  // Letter names in mixed radix, first dimension most significant.
  std::vector<std::string> names_out{""};
  for (const auto& dim : dimensions_) {
    std::vector<std::string> choice_names;
    if (dim.grouped) {
      choice_names = dim.choices;
    } else {
      choice_names = {dim.choices[0], "~" + dim.choices[0]};
    }
    std::vector<std::string> next;
    for (const auto& prefix : names_out)
      for (const auto& c : choice_names) next.push_back(prefix.empty() ? c : prefix + "," + c);
    names_out = std::move(next);
  }
  alphabet_.names = std::move(names_out);
}

Vocabulary Vocabulary::language_l() { return Vocabulary({}, {"blue"}, {}, "a"); }

Vocabulary Vocabulary::language_l_plus() { return Vocabulary({}, {"blue", "A"}, {}, "a"); }

Vocabulary Vocabulary::colors() {
  std::vector<std::string> colours{"blue",  "red",    "green", "purple", "yellow", "brown",
                                   "violet", "black", "white", "orange", "pink",   "gray"};
  auto preds = colours;
  preds.push_back("large");
  return Vocabulary({"car", "house", "shirt", "table", "cup", "plate", "hat", "book", "chair",
                     "lamp", "door", "bag", "box", "ball", "pen", "heart"},
                    std::move(preds), {colours});
}

bool Vocabulary::has_constant(std::string_view name) const {
  return is_indexed(name, indexed_prefix_) ||
         std::find(constants_.begin(), constants_.end(), name) != constants_.end();
}

bool Vocabulary::has_predicate(std::string_view name) const {
  return std::find(predicates_.begin(), predicates_.end(), name) != predicates_.end();
}

bool Vocabulary::exclusive(std::string_view p, std::string_view q) const {
  if (p == q) return false;
  for (const auto& g : groups_) {
    const bool hp = std::find(g.begin(), g.end(), p) != g.end();
    const bool hq = std::find(g.begin(), g.end(), q) != g.end();
    if (hp && hq) return true;
  }
  return false;
}

std::string Vocabulary::object(std::size_t index) const {
  if (!indexed_prefix_.empty()) return indexed_prefix_ + std::to_string(index + 1);
  if (index >= constants_.size())
    throw SizeLimitExceeded("vocabulary has only " + std::to_string(constants_.size()) +
                            " constants");
  return constants_[index];
}

std::vector<Literal> Vocabulary::letter_literals(Letter letter, std::size_t object_index) const {
  if (letter >= alphabet_.size()) throw UnknownSymbol("letter " + std::to_string(letter));
  const auto name = object(object_index);
  std::vector<Literal> out(dimensions_.size());
  std::size_t rest = letter;
  for (std::size_t d = dimensions_.size(); d-- > 0;) {
    const auto& dim = dimensions_[d];
    const std::size_t radix = dim.grouped ? dim.choices.size() : 2;
    const std::size_t choice = rest % radix;
    rest /= radix;
    if (dim.grouped) {
      out[d] = Literal{dim.choices[choice], name, Polarity::positive};
    } else {
      out[d] = Literal{dim.choices[0], name, choice == 0 ? Polarity::positive : Polarity::negative};
    }
  }
  return out;
}

AtomicDiagram Vocabulary::decode(std::span<const Letter> word) const {
  std::vector<Literal> lits;
  lits.reserve(word.size() * dimensions_.size());
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto block = letter_literals(word[i], i);
    lits.insert(lits.end(), block.begin(), block.end());
  }
  return AtomicDiagram(std::move(lits));
}

std::optional<Word> Vocabulary::encode(const AtomicDiagram& diagram) const {
  const std::size_t per = dimensions_.size();
  if (diagram.size() % per != 0) return std::nullopt;
  Word word;
  for (std::size_t i = 0; i * per < diagram.size(); ++i) {
    std::string name;
    try {
      name = object(i);
    } catch (const SizeLimitExceeded&) {
      return std::nullopt;
    }
    Letter letter = 0;
    for (std::size_t d = 0; d < per; ++d) {
      const auto& lit = diagram[i * per + d];
      const auto& dim = dimensions_[d];
      if (lit.constant != name) return std::nullopt;
      std::size_t choice = 0;
      if (dim.grouped) {
        const auto it = std::find(dim.choices.begin(), dim.choices.end(), lit.predicate);
        if (it == dim.choices.end() || lit.polarity != Polarity::positive) return std::nullopt;
        choice = static_cast<std::size_t>(it - dim.choices.begin());
        letter = static_cast<Letter>(letter * dim.choices.size() + choice);
      } else {
        if (lit.predicate != dim.choices[0]) return std::nullopt;
        choice = lit.polarity == Polarity::positive ? 0 : 1;
        letter = static_cast<Letter>(letter * 2 + choice);
      }
    }
    word.push_back(letter);
  }
  return word;
}

// ---- parsing ---------------------------------------------------------------

AtomicDiagram parse_model_string(std::string_view text, const Vocabulary& vocab) {
  std::vector<Literal> lits;
  std::size_t index = 0;
  for (const auto& item : split_items(text)) {
    ++index;
    lits.push_back(item.formal ? parse_formal(item.text, vocab, index, item.offset)
                               : parse_natural(item.text, vocab, index, item.offset));
  }
  return AtomicDiagram(std::move(lits));
}

Literal parse_literal(std::string_view text, const Vocabulary& vocab) {
  const auto items = split_items(text);
  if (items.size() != 1)
    throw MalformedLiteral("expected exactly one literal, found " + std::to_string(items.size()),
                           items.size() > 1 ? 2 : 0, items.size() > 1 ? items[1].offset : 0);
  const auto& item = items.front();
  return item.formal ? parse_formal(item.text, vocab, 1, item.offset)
                     : parse_natural(item.text, vocab, 1, item.offset);
}

Sentence parse_sentence(std::string_view text, const Vocabulary& vocab) {
  std::string s(text);
  s = replace_all(s, kForall, " forall ");
  s = replace_all(s, kExists, " exists ");
  s = replace_all(s, kNegSign, " not ");
  s = replace_all(s, "~", " not ");
  for (char& c : s)
    if (c == '?' || c == '.' || c == ',') c = ' ';
  auto words = split_ws(s);
  const auto fail = [&] { return MalformedLiteral("cannot parse sentence '" + std::string(text) + "'"); };
  if (words.size() < 2) throw fail();

  Sentence out;
  out.predicate = words.back();
  words.pop_back();
  if (!words.empty() && lower(words.back()) == "not") {
    out.polarity = Polarity::negative;
    words.pop_back();
  }
  std::string head;
  for (const auto& w : words) head += (head.empty() ? "" : " ") + lower(w);

  static const std::vector<std::pair<std::string, Quantifier>> forms = {
      {"forall", Quantifier::forall},
      {"every object is", Quantifier::forall},
      {"everything is", Quantifier::forall},
      {"each object is", Quantifier::forall},
      {"is everything", Quantifier::forall},
      {"is every object", Quantifier::forall},
      {"are all objects", Quantifier::forall},
      {"exists", Quantifier::exists},
      {"some object is", Quantifier::exists},
      {"something is", Quantifier::exists},
      {"is something", Quantifier::exists},
      {"is anything", Quantifier::exists},
      {"is some object", Quantifier::exists},
  };
  const auto it = std::find_if(forms.begin(), forms.end(),
                               [&](const auto& f) { return f.first == head; });
  if (it == forms.end()) throw fail();
  out.quantifier = it->second;
  if (!vocab.has_predicate(out.predicate))
    throw UnknownSymbol("predicate '" + out.predicate + "'");
  return out;
}

// ---- rendering -------------------------------------------------------------

std::string render_formal(const Literal& lit) {
  std::string out = lit.polarity == Polarity::negative ? std::string(kNegSign) : std::string();
  return out + lit.predicate + "(" + lit.constant + ")";
}

std::string render_formal(const AtomicDiagram& d) {
  std::string out;
  for (const auto& lit : d.literals()) {
    if (!out.empty()) out += ' ';
    out += render_formal(lit);
  }
  return out;
}

std::string render_natural(const Literal& lit, const Vocabulary& vocab) {
  std::string out = is_indexed(lit.constant, vocab.indexed_prefix()) ? lit.constant
                                                                      : "The " + lit.constant;
  out += lit.polarity == Polarity::negative ? " is not " : " is ";
  return out + lit.predicate + ".";
}

std::string render_natural(const AtomicDiagram& d, const Vocabulary& vocab) {
  std::string out;
  for (const auto& lit : d.literals()) {
    if (!out.empty()) out += ' ';
    out += render_natural(lit, vocab);
  }
  return out;
}

std::string render(const Sentence& s) {
  std::string out = s.quantifier == Quantifier::forall ? "forall " : "exists ";
  if (s.polarity == Polarity::negative) out += "not ";
  return out + s.predicate;
}

std::string render_word(std::span<const Letter> word, const Alphabet& alphabet) {
  std::string out;
  for (const auto l : word) {
    if (!out.empty()) out += ' ';
    out += l < alphabet.size() ? alphabet.names[l] : "?" + std::to_string(l);
  }
  return out;
}

void write_diagrams(std::ostream& out, std::span<const AtomicDiagram> diagrams) {
  for (const auto& d : diagrams) out << (d.empty() ? std::string("-") : render_formal(d)) << '\n';
}

std::vector<AtomicDiagram> read_diagrams(std::istream& in, const Vocabulary& vocab) {
  std::vector<AtomicDiagram> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.starts_with('#')) continue;
    if (line == "-") {
      out.emplace_back();
      continue;
    }
    if (split_ws(line).empty()) continue;
    out.push_back(parse_model_string(line, vocab));
  }
  return out;
}

// ---- tokens ----------------------------------------------------------------

TokenString tokenize(const AtomicDiagram& d) {
  TokenString ts;
  for (const auto& lit : d.literals()) {
    ts.tokens.push_back(lit.constant);
    ts.tokens.emplace_back("is");
    if (lit.polarity == Polarity::negative) ts.tokens.emplace_back("not");
    ts.tokens.push_back(lit.predicate);
  }
  return ts;
}

AtomicDiagram detokenize(const TokenString& ts, const Vocabulary& vocab) {
  std::vector<Literal> lits;
  const auto& t = ts.tokens;
  std::size_t i = 0;
  while (i < t.size()) {
    const std::size_t index = lits.size() + 1;
    if (i + 2 >= t.size()) throw MalformedLiteral("truncated token group", index, i);
    if (t[i + 1] != "is") throw MalformedLiteral("expected 'is'", index, i + 1);
    Literal lit;
    lit.constant = t[i];
    std::size_t p = i + 2;
    if (t[p] == "not") {
      lit.polarity = Polarity::negative;
      if (++p >= t.size()) throw MalformedLiteral("truncated token group", index, p);
    }
    lit.predicate = t[p];
    if (!vocab.has_constant(lit.constant))
      throw UnknownSymbol("constant '" + lit.constant + "' at literal " + std::to_string(index));
    if (!vocab.has_predicate(lit.predicate))
      throw UnknownSymbol("predicate '" + lit.predicate + "' at literal " + std::to_string(index));
    lits.push_back(std::move(lit));
    i = p + 1;
  }
  return AtomicDiagram(std::move(lits));
}

TokenString permute(const TokenString& ts, std::span<const std::size_t> permutation) {
  if (permutation.size() != ts.tokens.size())
    throw InvalidPermutation("permutation has " + std::to_string(permutation.size()) +
                             " entries for " + std::to_string(ts.tokens.size()) + " tokens");
  std::vector<bool> seen(permutation.size(), false);
  TokenString out;
  out.tokens.reserve(ts.tokens.size());
  for (const auto idx : permutation) {
    if (idx >= permutation.size() || seen[idx])
      throw InvalidPermutation("index " + std::to_string(idx) + " out of range or repeated");
    seen[idx] = true;
    out.tokens.push_back(ts.tokens[idx]);
  }
  return out;
}

std::vector<std::size_t> inverse_permutation(std::span<const std::size_t> permutation) {
  std::vector<std::size_t> inv(permutation.size(), permutation.size());
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (permutation[i] >= permutation.size() || inv[permutation[i]] != permutation.size())
      throw InvalidPermutation("not a bijection");
    inv[permutation[i]] = i;
  }
  return inv;
}

// ---- enumeration -----------------------------------------------------------

std::uint64_t count_words(std::size_t alphabet_size, std::size_t n, const Limits& limits) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (alphabet_size != 0 && total > limits.max_strings / alphabet_size)
      throw SizeLimitExceeded(std::to_string(alphabet_size) + "^" + std::to_string(n) +
                              " exceeds cap " + std::to_string(limits.max_strings));
    total *= alphabet_size;
  }
  if (total > limits.max_strings)
    throw SizeLimitExceeded("enumeration exceeds cap " + std::to_string(limits.max_strings));
  return total;
}

void for_each_word(std::size_t alphabet_size, std::size_t n, const Limits& limits,
                   const std::function<void(const Word&)>& visit) {
  if (count_words(alphabet_size, n, limits) == 0) return;
  Word w(n, 0);
  while (true) {
    visit(w);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++w[i] < alphabet_size) break;
      w[i] = 0;
      if (i == 0) return;
    }
    if (n == 0) return;
  }
}

std::vector<Word> enumerate_words(std::size_t alphabet_size, std::size_t n,
                                  const Limits& limits) {
  std::vector<Word> out;
  out.reserve(count_words(alphabet_size, n, limits));
  for_each_word(alphabet_size, n, limits, [&](const Word& w) { out.push_back(w); });
  return out;
}

void enumerate_diagrams(std::size_t n, const Vocabulary& vocab, const Limits& limits,
                        const std::function<void(const AtomicDiagram&)>& visit) {
  if (n > 0) (void)vocab.object(n - 1);
  for_each_word(vocab.alphabet().size(), n, limits,
                [&](const Word& w) { visit(vocab.decode(w)); });
}

std::vector<AtomicDiagram> enumerate_diagrams(std::size_t n, const Vocabulary& vocab,
                                              const Limits& limits) {
  std::vector<AtomicDiagram> out;
  enumerate_diagrams(n, vocab, limits, [&](const AtomicDiagram& d) { out.push_back(d); });
  return out;
}

}  // namespace qlab
