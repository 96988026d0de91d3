#include "oracles.hpp"

#include "qlab/errors.hpp"
#include "qlab/prob.hpp"

#include <doctest.h>

#include <sstream>

using namespace qlab;

namespace {

// Depends on the previous letter; contexts absent from the table fall back to
// uniform.
ConditionalModel markov() {
  std::stringstream in(
      "@alphabet p n\n"
      "@fallback uniform\n"
      "\tp\t2/3\n"
      "\tn\t1/3\n"
      "p\tp\t3/4\n"
      "p\tn\t1/4\n"
      "n\tp\t1/5\n"
      "n\tn\t4/5\n");
  return ConditionalModel::load_table(in);
}

Word cat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

TEST_SUITE("prob") {

TEST_CASE("exact probabilities") {
  CHECK(ExactProb::parse("1/8").str() == "1/8");
  CHECK(ExactProb::parse("2/4").str() == "1/2");
  CHECK(ExactProb::parse("1").str() == "1");
  CHECK_THROWS_AS(ExactProb::parse("3/2"), InvalidProbability);
  CHECK_THROWS_AS(ExactProb::parse("-1/2"), InvalidProbability);
  CHECK_THROWS_AS(ExactProb::parse("0.5"), InvalidProbability);
  CHECK_THROWS_AS(ExactProb::parse("1/0"), InvalidProbability);
  CHECK(ExactProb(1, 2) * ExactProb(1, 4) == ExactProb(1, 8));
  CHECK(ExactProb(1, 3) < ExactProb(1, 2));
}

TEST_CASE("models validate their distributions") {
  CHECK_THROWS_AS(ConditionalModel::fixed(Alphabet::binary(), {Rational(1, 2), Rational(1, 3)}),
                  InvalidProbability);
  CHECK_THROWS_AS(ConditionalModel::fixed(Alphabet::binary(), {Rational(1)}), InvalidProbability);
  CHECK_THROWS_AS(ConditionalModel::biased_coin(Rational(3, 2)), InvalidProbability);
  std::stringstream bad("@alphabet p n\n\tp\t1/2\n");
  CHECK_THROWS_AS(ConditionalModel::load_table(bad), InvalidProbability);
  std::stringstream unknown("@alphabet p n\n\tq\t1\n");
  CHECK_THROWS_AS(ConditionalModel::load_table(unknown), UnknownSymbol);
}

TEST_CASE("missing contexts") {
  std::stringstream strict("@alphabet p n\n@fallback error\n\tp\t1/2\n\tn\t1/2\n");
  const auto m = ConditionalModel::load_table(strict);
  CHECK(m.conditional(Word{}, 0) == ExactProb(1, 2));
  CHECK_THROWS_AS(m.conditional(Word{0}, 0), MissingConditional);
  CHECK(markov().conditional(Word{0, 1, 0}, 0) == ExactProb(1, 2));
}

TEST_CASE("table round trip") {
  const auto m = markov();
  std::stringstream out;
  m.write_table(out);
  const auto back = ConditionalModel::load_table(out);
  for (std::size_t k = 0; k <= 3; ++k)
    for (const auto& w : oracle::binary_words(k))
      CHECK(chain_probability(back, {}, w) == chain_probability(m, {}, w));
}

TEST_CASE("continuation masses sum to one and the chain rule splits") {
  for (const auto& m : {ConditionalModel::uniform(Alphabet::binary()),
                        ConditionalModel::biased_coin(Rational(1, 3)), markov()}) {
    for (std::size_t k = 0; k <= 6; ++k) {
      for (const auto& ctx : oracle::binary_words(k % 3)) {
        Rational total = 0;
        for (const auto& w : oracle::binary_words(k)) {
          const auto whole = chain_probability(m, ctx, w);
          total += whole.value();
          for (std::size_t split = 0; split <= k; ++split) {
            const Word head(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(split));
            const Word tail(w.begin() + static_cast<std::ptrdiff_t>(split), w.end());
            CHECK(whole == chain_probability(m, ctx, head) * chain_probability(m, cat(ctx, head), tail));
          }
        }
        CHECK(total == 1);
      }
    }
  }
}

TEST_CASE("uniform chain is a power of one half") {
  const auto m = ConditionalModel::uniform(Alphabet::binary());
  for (std::size_t k = 0; k <= 8; ++k)
    CHECK(chain_probability(m, {}, Word(k, 1)).value() == oracle::power(Rational(1, 2), k));
}

TEST_CASE("hypothesis-conditional mass") {
  const auto m = ConditionalModel::uniform(Alphabet::binary());
  const std::set<Word> h{Word{0, 0}, Word{0, 1}, Word{1, 1}};
  CHECK(conditional_given_hypothesis(m, Word{0, 0}, h) == ExactProb(1, 3));
  CHECK(conditional_given_hypothesis(m, Word{1, 0}, h) == ExactProb::zero());
  const auto coin = ConditionalModel::biased_coin(Rational(1));
  CHECK_THROWS_AS(conditional_given_hypothesis(coin, Word{1}, {Word{1}}), ZeroMassHypothesis);
  CHECK(instantiate([](const Word& w) { return w.empty() || w[0] == 0; }, 2, 2) ==
        std::set<Word>{Word{0, 0}, Word{0, 1}});
}

TEST_CASE("Max-Ent prior") {
  const auto p = maxent_prior({"a", "b", "c"});
  CHECK(p.total() == 1);
  for (const auto& w : p.weights) CHECK(w == ExactProb(1, 3));
  CHECK_THROWS_AS(maxent_prior({}), EmptyFamily);
}

TEST_CASE("Bayesian update") {
  const auto m = ConditionalModel::uniform(Alphabet::binary());
  const std::vector<std::set<Word>> hyps{{Word{0, 0}}, {Word{0, 0}, Word{0, 1}},
                                         {Word{1, 0}}};
  const auto prior = maxent_prior({"tight", "loose", "other"});
  const auto post = bayes_update(prior, hyps, m, {Word{0, 0}, true});
  CHECK(post.total() == 1);
  // size principle: the tighter hypothesis gains twice the weight
  CHECK(post.weights[0] == ExactProb(2, 3));
  CHECK(post.weights[1] == ExactProb(1, 3));
  CHECK(post.weights[2] == ExactProb::zero());
  const auto out = bayes_update(prior, hyps, m, {Word{1, 1}, false});
  CHECK(out.total() == 1);
  CHECK(observation_likelihood(m, hyps[0], {Word{1, 1}, false}) == ExactProb(1, 3));
  CHECK(observation_likelihood(m, hyps[0], {Word{0, 0}, false}) == ExactProb::zero());
  const std::vector<std::set<Word>> none{{Word{1, 0}}};
  CHECK_THROWS_AS(bayes_update(maxent_prior({"x"}), none, m, {Word{0, 0}, true}),
                  InconsistentEvidence);
}

TEST_CASE("dilution and extension") {
  CHECK(maxent_dilution(ExactProb(1, 2), 3, 2) == ExactProb(1, 16));
  CHECK(maxent_dilution(ExactProb::one(), 0, 2) == ExactProb::one());
  CHECK_THROWS(maxent_dilution(ExactProb::one(), 1, 1));
  const auto m = ConditionalModel::uniform(Alphabet::binary());
  const Membership all_p = [](const Word& w) { return std::all_of(w.begin(), w.end(), [](Letter l) { return l == 0; }); };
  CHECK(extended_conditional(m, all_p, ExactProb::one(), Word{0}, Word{0, 0}) == ExactProb(1, 4));
  CHECK(extended_conditional(m, all_p, ExactProb::one(), Word{0}, Word{0, 1}) == ExactProb::zero());
}

TEST_CASE("chain-rule models are monotone but never drop by an exact delta") {
  const auto m = ConditionalModel::uniform(Alphabet::binary());
  const std::vector<IndexedHypothesis> hyps{
      {"universal", [](const Word& w) { return std::count(w.begin(), w.end(), 1) == 0; }},
      {"full", [](const Word&) { return true; }}};
  const std::vector<ExactProb> grid{ExactProb(1, 2), ExactProb(1, 4)};
  const auto r = check_nondegenerate(m, hyps, 2, grid, 4);
  CHECK(r.monotone());
  REQUIRE(r.hypotheses.size() == 2);
  for (const auto& h : r.hypotheses)
    for (const auto& d : h.drops) CHECK_FALSE(d.m.has_value());
}

}
