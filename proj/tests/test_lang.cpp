#include "qlab/errors.hpp"
#include "qlab/lang.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace qlab;

TEST_SUITE("lang") {

TEST_CASE("preset alphabets") {
  CHECK(Vocabulary::language_l().alphabet().names == std::vector<std::string>{"blue", "~blue"});
  CHECK(Vocabulary::language_l_plus().alphabet().names ==
        std::vector<std::string>{"blue,A", "blue,~A", "~blue,A", "~blue,~A"});
  CHECK(Vocabulary::colors().alphabet().size() == 24);
  CHECK(Vocabulary::colors().exclusive("blue", "red"));
  CHECK_FALSE(Vocabulary::colors().exclusive("blue", "large"));
  CHECK_FALSE(Vocabulary::colors().exclusive("blue", "blue"));
}

TEST_CASE("vocabulary validation") {
  CHECK_THROWS_AS(Vocabulary({"a", "a"}, {"p"}), InvalidVocabulary);
  CHECK_THROWS_AS(Vocabulary({"a"}, {"p", "q"}, {{"p"}}), InvalidVocabulary);
  CHECK_THROWS_AS(Vocabulary({"a"}, {"p", "q", "r"}, {{"p", "q"}, {"q", "r"}}), InvalidVocabulary);
  CHECK_THROWS_AS(Vocabulary({"a"}, {"p"}, {{"p", "zz"}}), InvalidVocabulary);
}

TEST_CASE("indexed constants") {
  const auto v = Vocabulary::language_l();
  CHECK(v.has_constant("a1"));
  CHECK(v.has_constant("a42"));
  CHECK_FALSE(v.has_constant("a0"));
  CHECK_FALSE(v.has_constant("b1"));
  CHECK(v.object(0) == "a1");
  CHECK(v.object(9) == "a10");
  CHECK_THROWS_AS(Vocabulary::colors().object(16), SizeLimitExceeded);
}

TEST_CASE("formal literal syntax") {
  const auto v = Vocabulary::language_l();
  CHECK(parse_literal("blue(a1)", v) == Literal{"blue", "a1", Polarity::positive});
  CHECK(parse_literal("~blue(a2)", v) == Literal{"blue", "a2", Polarity::negative});
  CHECK(parse_literal("!blue(a2)", v) == Literal{"blue", "a2", Polarity::negative});
  CHECK(parse_literal("¬blue(a3)", v) == Literal{"blue", "a3", Polarity::negative});
  CHECK_THROWS_AS(parse_literal("red(a1)", v), UnknownSymbol);
  CHECK_THROWS_AS(parse_literal("blue(b1)", v), UnknownSymbol);
  CHECK_THROWS_AS(parse_literal("blue a1", v), MalformedLiteral);
}

TEST_CASE("malformed literal reports its position") {
  const auto v = Vocabulary::language_l();
  try {
    parse_model_string("blue(a1) ~blue(a2) blue[a3]", v);
    FAIL("expected MalformedLiteral");
  } catch (const MalformedLiteral& e) {
    CHECK(e.literal_index() == 3);
  }
}

TEST_CASE("natural syntax") {
  const auto v = Vocabulary::colors();
  const auto d = parse_model_string("The car is blue. The house is not red. My hat is large.", v);
  REQUIRE(d.size() == 3);
  CHECK(d[0] == Literal{"blue", "car", Polarity::positive});
  CHECK(d[1] == Literal{"red", "house", Polarity::negative});
  CHECK(d[2] == Literal{"large", "hat", Polarity::positive});
  CHECK(render_natural(d.prefix(2), v) == "The car is blue. The house is not red.");
  CHECK(parse_model_string(render_natural(d, v), v) == d);
  CHECK(parse_model_string("a1 is blue. a2 is not blue.", Vocabulary::language_l()).size() == 2);
}

TEST_CASE("formal rendering round trip") {
  const auto v = Vocabulary::language_l_plus();
  for (const auto& d : enumerate_diagrams(3, v, {})) {
    CHECK(parse_model_string(render_formal(d), v) == d);
  }
}

TEST_CASE("sentences") {
  const auto v = Vocabulary::colors();
  CHECK(parse_sentence("Is everything blue?", v) ==
        Sentence{Quantifier::forall, "blue", Polarity::positive});
  CHECK(parse_sentence("Is something red?", v) ==
        Sentence{Quantifier::exists, "red", Polarity::positive});
  CHECK(parse_sentence("∀ ¬ blue", v) == Sentence{Quantifier::forall, "blue", Polarity::negative});
  CHECK(parse_sentence("exists not large", v) ==
        Sentence{Quantifier::exists, "large", Polarity::negative});
  CHECK(render(parse_sentence("forall ~blue", v)) == "forall not blue");
  CHECK_THROWS_AS(parse_sentence("Is everything teal?", v), UnknownSymbol);
  CHECK_THROWS_AS(parse_sentence("Maybe blue", v), MalformedLiteral);
}

TEST_CASE("decode and encode are inverse") {
  for (const auto& v : {Vocabulary::language_l(), Vocabulary::language_l_plus()}) {
    for (const auto& w : enumerate_words(v.alphabet().size(), 3, {})) {
      const auto d = v.decode(w);
      CHECK(d.size() == 3 * v.literals_per_letter());
      const auto back = v.encode(d);
      REQUIRE(back);
      CHECK(*back == w);
    }
  }
  const auto v = Vocabulary::language_l();
  CHECK_FALSE(v.encode(parse_model_string("blue(a2)", v)));
}

TEST_CASE("diagram line format") {
  const auto v = Vocabulary::language_l();
  std::vector<AtomicDiagram> ds{AtomicDiagram{}, parse_model_string("blue(a1) ~blue(a2)", v)};
  std::stringstream ss;
  write_diagrams(ss, ds);
  CHECK(ss.str() == "-\nblue(a1) ¬blue(a2)\n");
  CHECK(read_diagrams(ss, v) == ds);
}

TEST_CASE("tokens") {
  const auto v = Vocabulary::language_l_plus();
  const auto d = parse_model_string("~blue(a1) A(a1)", v);
  const auto ts = tokenize(d);
  CHECK(ts.tokens == std::vector<std::string>{"a1", "is", "not", "blue", "a1", "is", "A"});
  CHECK(detokenize(ts, v) == d);
  CHECK_THROWS_AS(detokenize(TokenString{{"a1", "is"}}, v), MalformedLiteral);
  CHECK_THROWS_AS(detokenize(TokenString{{"a1", "was", "blue"}}, v), MalformedLiteral);
}

TEST_CASE("permutations preserve the token multiset") {
  std::mt19937_64 rng(7);
  const TokenString ts{{"a1", "is", "not", "blue", "a1", "is", "A"}};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> perm(ts.tokens.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto p = permute(ts, perm);
    auto a = ts.tokens, b = p.tokens;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(permute(p, inverse_permutation(perm)) == ts);
  }
  CHECK_THROWS_AS(permute(ts, std::vector<std::size_t>{0, 0, 1, 2, 3, 4, 5}), InvalidPermutation);
  CHECK_THROWS_AS(permute(ts, std::vector<std::size_t>{0, 1}), InvalidPermutation);
}

TEST_CASE("enumeration order and caps") {
  const auto ws = enumerate_words(2, 3, {});
  REQUIRE(ws.size() == 8);
  CHECK(std::is_sorted(ws.begin(), ws.end()));
  CHECK(ws.front() == Word{0, 0, 0});
  CHECK(count_words(24, 4, {}) == 331776);
  CHECK_THROWS_AS(count_words(2, 30, Limits{1000}), SizeLimitExceeded);
  CHECK_THROWS_AS(count_words(24, 40, {}), SizeLimitExceeded);
  CHECK(enumerate_words(2, 0, {}) == std::vector<Word>{Word{}});
}

}
