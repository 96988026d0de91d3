#include "qlab/errors.hpp"
#include "qlab/probe.hpp"

#include <doctest.h>

#include <algorithm>
#include <future>
#include <regex>
#include <sstream>
#include <thread>

using namespace qlab;

namespace {

// Gold by reading the sentences directly: "yes" when every object carries the
// asked colour, "no" when one carries another colour, else "unknown".
Gold read_gold(const ProbeCase& c, const std::string& colour) {
  static const std::vector<std::string> colours{"blue", "red", "green", "yellow", "orange",
                                                "purple", "violet", "black", "white", "brown",
                                                "pink", "gray"};
  static const std::regex sentence(R"(The (\w+) is (\w+)\.)");
  bool all = true;
  for (auto it = std::sregex_iterator(c.context.begin(), c.context.end(), sentence);
       it != std::sregex_iterator(); ++it) {
    const std::string adj = (*it)[2];
    if (adj == colour) continue;
    if (std::find(colours.begin(), colours.end(), adj) != colours.end()) return Gold::no;
    all = false;
  }
  return all ? Gold::yes : Gold::unknown;
}

std::string qlab_binary() { return QLAB_BINARY; }

std::vector<ProbeResponse> answers(std::span<const ProbeCase> cases, const std::string& raw) {
  std::vector<ProbeResponse> out;
  for (const auto& c : cases) out.push_back({c.id, raw, normalize_answer(raw)});
  return out;
}

}  // namespace

TEST_SUITE("probe") {

TEST_CASE("paper_counts dataset shape") {
  DatasetSpec spec;
  const auto cases = generate_dataset(spec);
  std::size_t expected = 0;
  for (std::size_t n = 2; n <= 10; ++n) expected += 1 + (n == 2 ? 1 : n);
  CHECK(cases.size() == expected);
  CHECK(cases.size() == 62);
  CHECK(cases[0].id == "n2-consistent");
  CHECK(cases[1].id == "n2-p2");
  CHECK(cases[1].inconsistency_position == 2);
  for (const auto& c : cases) {
    CHECK(c.question == "Is everything blue?");
    CHECK(c.gold == read_gold(c, "blue"));
    if (c.family == "inconsistent") CHECK(c.gold == Gold::no);
  }
}

TEST_CASE("full_positions and the underspecified case") {
  DatasetSpec spec;
  spec.scheme = Scheme::full_positions;
  spec.underspecified = true;
  spec.colour = "red";
  spec.max_size = 4;
  const auto cases = generate_dataset(spec);
  CHECK(cases.size() == (1 + 2) + (1 + 3) + (1 + 4) + 1);
  CHECK(cases.back().id == "u1");
  CHECK(cases.back().gold == Gold::unknown);
  for (const auto& c : cases) CHECK(c.gold == read_gold(c, "red"));
}

TEST_CASE("datasets are deterministic and seed dependent") {
  DatasetSpec a;
  DatasetSpec b;
  b.seed = 99;
  CHECK(generate_dataset(a) == generate_dataset(a));
  CHECK_FALSE(generate_dataset(a) == generate_dataset(b));
}

TEST_CASE("case file round trip") {
  DatasetSpec spec;
  spec.underspecified = true;
  const auto cases = generate_dataset(spec);
  std::stringstream io;
  write_cases(io, cases);
  CHECK(read_cases(io) == cases);
  std::stringstream bad("{\"id\": 3}\n");
  CHECK_THROWS_AS(read_cases(bad), ProtocolViolation);
}

TEST_CASE("answer normalization") {
  CHECK(normalize_answer("yes") == Answer::yes);
  CHECK(normalize_answer("  Yes.") == Answer::yes);
  CHECK(normalize_answer("NO, it is not") == Answer::no);
  CHECK(normalize_answer("\"unknown\"") == Answer::unknown);
  CHECK(normalize_answer("yesterday") == Answer::unparseable);
  CHECK(normalize_answer("maybe") == Answer::unparseable);
  CHECK(normalize_answer("") == Answer::unparseable);
}

TEST_CASE("scoring") {
  const auto cases = generate_dataset({});
  const auto yes = score(cases, answers(cases, "yes"));
  CHECK(yes.consistent == Tally{9, 9});
  for (const auto& row : yes.inconsistent) CHECK(row.pass.passed == 0);
  const auto no = score(cases, answers(cases, "No."));
  CHECK(no.consistent == Tally{0, 9});
  CHECK(no.inconsistent.front().pass == Tally{1, 1});
  CHECK(no.inconsistent.back().pass == Tally{10, 10});
  const auto junk = score(cases, answers(cases, "perhaps"));
  CHECK(junk.unparseable == cases.size());

  auto dup = answers(cases, "yes");
  dup.push_back(dup.front());
  CHECK_THROWS_AS(score(cases, dup), DuplicateResponse);
  auto missing = answers(cases, "yes");
  missing.pop_back();
  CHECK_THROWS_AS(score(cases, missing), MissingResponse);
  auto stray = answers(cases, "yes");
  stray.back().id = "nope";
  CHECK_THROWS_AS(score(cases, stray), ProtocolViolation);
}

TEST_CASE("report round trip and rendering") {
  DatasetSpec spec;
  spec.underspecified = true;
  const auto cases = generate_dataset(spec);
  const auto r = score(cases, run_adapter(cases, "stub:oracle"));
  CHECK(report_from_json(report_to_json(r)) == r);
  CHECK(r.underspecified == Tally{1, 1});
  const auto tsv = render_report_tsv(r);
  CHECK(tsv.rfind("Object Count\tPass Fraction\n2\t1/1\n3\t3/3\n", 0) == 0);
  CHECK_THROWS_AS(report_from_json("[]"), MalformedReport);
  CHECK_THROWS_AS(report_from_json("{"), MalformedReport);
  CHECK_THROWS_AS(Tally::parse("3/x"), MalformedReport);
  CHECK(Tally::parse("2/4") == Tally{2, 4});
}

TEST_CASE("stub answerers") {
  const std::string q = "Is everything blue?";
  const std::string ctx = "The car is blue. The house is blue. The shirt is red.";
  CHECK(stub_answer(StubSpec::parse("oracle"), ctx, q) == "no");
  CHECK(stub_answer(StubSpec::parse("window:2"), ctx, q) == "yes");
  CHECK(stub_answer(StubSpec::parse("window_3"), ctx, q) == "no");
  CHECK(stub_answer(StubSpec::parse("bag"), ctx, q) == "no");
  CHECK(stub_answer(StubSpec::parse("always_yes"), ctx, q) == "yes");
  CHECK(stub_answer(StubSpec::parse("oracle"), "The heart is large.", q) == "unknown");
  CHECK(StubSpec::parse("window_4").str() == "window:4");
  CHECK_THROWS(StubSpec::parse("psychic"));

  std::stringstream in("{\"id\":\"a\",\"context\":\"The car is blue.\",\"question\":\"Is everything blue?\"}\n");
  std::stringstream out;
  CHECK(serve_stub(StubSpec{}, in, out));
  CHECK(out.str() == "{\"id\":\"a\",\"answer\":\"yes\"}\n");
  std::stringstream bad("not json\n");
  std::stringstream sink;
  CHECK_FALSE(serve_stub(StubSpec{}, bad, sink));
}

TEST_CASE("window stubs fail past their window") {
  DatasetSpec spec;
  spec.scheme = Scheme::full_positions;
  const auto cases = generate_dataset(spec);
  const auto r = score(cases, run_adapter(cases, "stub:window:2"));
  for (const auto& row : r.inconsistent)
    CHECK(row.pass == Tally{2, row.object_count});
}

TEST_CASE("command endpoint agrees with the in-process stub") {
  DatasetSpec spec;
  spec.max_size = 5;
  const auto cases = generate_dataset(spec);
  const auto local = run_adapter(cases, "stub:oracle");
  AdapterOptions opts;
  opts.concurrency = 3;
  const auto remote = run_adapter(cases, "command:" + qlab_binary() + " stub --kind oracle", opts);
  REQUIRE(remote.size() == local.size());
  for (std::size_t i = 0; i < local.size(); ++i) {
    CHECK(remote[i].id == local[i].id);
    CHECK(remote[i].raw == local[i].raw);
  }
}

TEST_CASE("tcp endpoint") {
  DatasetSpec spec;
  spec.max_size = 4;
  const auto cases = generate_dataset(spec);
  std::promise<std::uint16_t> bound;
  std::thread server([&] {
    serve_stub_tcp(StubSpec::parse("window:2"), 0, 1, [&](std::uint16_t p) { bound.set_value(p); });
  });
  const auto port = bound.get_future().get();
  const auto got = run_adapter(cases, "tcp:127.0.0.1:" + std::to_string(port));
  server.join();
  const auto want = run_adapter(cases, "stub:window:2");
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].raw == want[i].raw);
}

TEST_CASE("adapter failures") {
  DatasetSpec spec;
  spec.max_size = 2;
  const auto cases = generate_dataset(spec);
  AdapterOptions opts;
  opts.timeout = std::chrono::milliseconds(150);
  opts.retries = 0;

  const auto slow = run_adapter(cases, "command:sleep 5", opts);
  for (const auto& r : slow) {
    CHECK(r.normalized == Answer::unparseable);
    CHECK(r.raw.empty());
  }
  CHECK_THROWS_AS(run_adapter(cases, "command:true", opts), AdapterUnreachable);
  CHECK_THROWS_AS(run_adapter(cases, "tcp:127.0.0.1:1", opts), AdapterUnreachable);
  CHECK_THROWS_AS(
      run_adapter(cases, R"(command:while read l; do echo '{"id":"zzz","answer":"yes"}'; done)", opts),
      ProtocolViolation);
  CHECK_THROWS_AS(run_adapter(cases, "command:while read l; do echo garbage; done", opts),
                  ProtocolViolation);
  CHECK_THROWS(run_adapter(cases, "smoke-signal:here", opts));
}

}
