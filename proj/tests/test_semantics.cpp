#include "oracles.hpp"

#include "qlab/errors.hpp"
#include "qlab/semantics.hpp"

#include <doctest.h>

#include <sstream>

using namespace qlab;

namespace {

const Sentence kForallBlue{Quantifier::forall, "blue", Polarity::positive};
const Sentence kExistsBlue{Quantifier::exists, "blue", Polarity::positive};

}  // namespace

TEST_SUITE("semantics") {

TEST_CASE("satisfies matches the reference on single-predicate diagrams") {
  const auto v = Vocabulary::language_l();
  for (std::size_t n = 1; n <= 10; ++n) {
    for (const auto& d : enumerate_diagrams(n, v, {})) {
      CHECK(satisfies(d, kForallBlue, v) == oracle::single_predicate_truth(d, true));
      CHECK(satisfies(d, kExistsBlue, v) == oracle::single_predicate_truth(d, false));
      // forall not blue is the negation of exists blue
      CHECK(satisfies(d, {Quantifier::forall, "blue", Polarity::negative}, v) ==
            !oracle::single_predicate_truth(d, false));
    }
  }
}

TEST_CASE("brute force scan agrees on two predicates") {
  const auto v = Vocabulary::language_l_plus();
  for (std::size_t n = 1; n <= 4; ++n)
    for (const auto& d : enumerate_diagrams(n, v, {}))
      for (const auto& pred : {"blue", "A"})
        for (auto q : {Quantifier::forall, Quantifier::exists})
          for (auto pol : {Polarity::positive, Polarity::negative}) {
            const Sentence s{q, pred, pol};
            CHECK(satisfies(d, s, v) == brute_force_oracle(d, s, v));
          }
}

TEST_CASE("continuation set sizes") {
  const auto v = Vocabulary::language_l();
  for (std::size_t n = 1; n <= 10; ++n) {
    std::size_t expected_exists = 0;
    for (const auto& w : oracle::binary_words(n))
      if (std::count(w.begin(), w.end(), 0)) ++expected_exists;
    CHECK(continuation_set(kForallBlue, n, v).size() == 1);
    CHECK(continuation_set(kExistsBlue, n, v).size() == expected_exists);
    CHECK(expected_exists == (std::size_t{1} << n) - 1);
  }
  const auto lp = Vocabulary::language_l_plus();
  CHECK(continuation_set(kForallBlue, 3, lp).size() == 8);
}

TEST_CASE("continuation set members are all-good words") {
  const auto v = Vocabulary::language_l();
  const auto cs = continuation_set(kForallBlue, 4, v);
  CHECK(cs.contains(Word{0, 0, 0, 0}));
  CHECK_FALSE(cs.contains(Word{0, 1, 0, 0}));
  std::ostringstream out;
  write_continuation_set(out, cs, v);
  CHECK(out.str() == "blue(a1) blue(a2) blue(a3) blue(a4)\n");
}

TEST_CASE("exclusive colours refute a universal") {
  const auto v = Vocabulary::colors();
  const auto q = parse_sentence("Is everything blue?", v);
  CHECK(judge(parse_model_string("The car is blue. The house is blue.", v), q, v) ==
        TruthVerdict::holds);
  CHECK(judge(parse_model_string("The car is blue. The house is red.", v), q, v) ==
        TruthVerdict::fails);
  CHECK(judge(parse_model_string("The heart is large.", v), q, v) == TruthVerdict::undetermined);
  CHECK_THROWS_AS(satisfies(parse_model_string("The heart is large.", v), q, v),
                  UnderdeterminedObject);
  CHECK_THROWS_AS(judge(parse_model_string("The car is red. The heart is large.", v), q, v,
                        Strictness::strict),
                  UnderdeterminedObject);
  // lenient: one refuting object settles it
  CHECK(judge(parse_model_string("The car is red. The heart is large.", v), q, v) ==
        TruthVerdict::fails);
}

TEST_CASE("contradictory diagrams") {
  const auto v = Vocabulary::colors();
  CHECK_THROWS_AS(judge(parse_model_string("The car is blue. The car is not blue.", v),
                        parse_sentence("Is everything blue?", v), v),
                  InconsistentDiagram);
  CHECK_THROWS_AS(judge(parse_model_string("The car is blue. The car is red.", v),
                        parse_sentence("Is everything blue?", v), v),
                  InconsistentDiagram);
}

TEST_CASE("prefix consistency in the open and closed readings") {
  const auto v = Vocabulary::language_l();
  const auto all_blue = parse_model_string("blue(a1) blue(a2)", v);
  const auto one_not = parse_model_string("blue(a1) ~blue(a2)", v);
  CHECK(consistent_with(all_blue, kForallBlue, v) == TruthVerdict::undetermined);
  CHECK(consistent_with(one_not, kForallBlue, v) == TruthVerdict::fails);
  CHECK(consistent_with(one_not, kExistsBlue, v) == TruthVerdict::holds);
  CHECK(consistent_with(parse_model_string("~blue(a1)", v), kExistsBlue, v) ==
        TruthVerdict::undetermined);
  CHECK(consistent_with(all_blue, kForallBlue, v, Domain::closed) == TruthVerdict::holds);
  CHECK(consistent_with(parse_model_string("~blue(a1)", v), kExistsBlue, v, Domain::closed) ==
        TruthVerdict::fails);
  // the empty prefix settles nothing in the open reading
  CHECK(consistent_with(AtomicDiagram{}, kForallBlue, v) == TruthVerdict::undetermined);
}

TEST_CASE("good letters") {
  CHECK(good_letters(kForallBlue, Vocabulary::language_l()) == std::vector<bool>{true, false});
  CHECK(good_letters({Quantifier::forall, "A", Polarity::negative}, Vocabulary::language_l_plus()) ==
        std::vector<bool>{false, true, false, true});
  const auto colours = good_letters(kForallBlue, Vocabulary::colors());
  CHECK(std::count(colours.begin(), colours.end(), true) == 2);
}

TEST_CASE("finite-domain consequence") {
  const auto v = Vocabulary::language_l();
  const auto up = semantic_consequence({kForallBlue}, kExistsBlue, 6, v);
  CHECK(up.holds);
  CHECK(up.up_to == 6);
  const auto with_empty = semantic_consequence({kForallBlue}, kExistsBlue, 6, v, {}, true);
  CHECK_FALSE(with_empty.holds);
  REQUIRE(with_empty.counterexample);
  CHECK(with_empty.counterexample->empty());
  const auto down = semantic_consequence({kExistsBlue}, kForallBlue, 4, v);
  CHECK_FALSE(down.holds);
  REQUIRE(down.counterexample);
  CHECK(down.counterexample->size() == 2);
  CHECK(semantic_consequence({}, kExistsBlue, 3, v).holds == false);
  CHECK(semantic_consequence({kForallBlue, kExistsBlue}, kForallBlue, 5, v).holds);
}

}
