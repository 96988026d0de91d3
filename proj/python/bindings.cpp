#include "qlab/cli.hpp"
#include "qlab/errors.hpp"
#include "qlab/learnlab.hpp"
#include "qlab/probe.hpp"
#include "qlab/semantics.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace qlab;

namespace {

Vocabulary vocabulary(const std::string& name) {
  RunConfig c;
  c.vocabulary = name;
  return c.make_vocabulary();
}

py::dict case_dict(const ProbeCase& c) {
  py::dict d;
  d["id"] = c.id;
  d["context"] = c.context;
  d["question"] = c.question;
  d["object_count"] = c.object_count;
  d["gold"] = to_string(c.gold);
  d["inconsistency_position"] =
      c.inconsistency_position ? py::object(py::int_(*c.inconsistency_position)) : py::none();
  d["family"] = c.family;
  return d;
}

}  // namespace

PYBIND11_MODULE(_qlab, m) {
  m.doc() = "Bindings for the qlab C++ library";

  py::register_exception<Error>(m, "QlabError", PyExc_ValueError);

  m.def(
      "judge",
      [](const std::string& model, const std::string& sentence, const std::string& vocab, bool strict) {
        const auto v = vocabulary(vocab);
        const auto verdict = judge(parse_model_string(model, v), parse_sentence(sentence, v), v,
                                   strict ? Strictness::strict : Strictness::lenient);
        return to_string(verdict);
      },
      py::arg("model"), py::arg("sentence"), py::arg("vocabulary") = "colors",
      py::arg("strict") = false, "Truth of a sentence on a model string.");

  m.def(
      "continuation_set",
      [](const std::string& sentence, std::size_t n, const std::string& vocab) {
        const auto v = vocabulary(vocab);
        const auto set = continuation_set(parse_sentence(sentence, v), n, v);
        std::vector<std::string> out;
        for (const auto& d : set.diagrams(v)) out.push_back(render_formal(d));
        return out;
      },
      py::arg("sentence"), py::arg("n"), py::arg("vocabulary") = "L");

  m.def(
      "chain_probability",
      [](const std::vector<Letter>& context, const std::vector<Letter>& continuation,
         const std::string& model) {
        return chain_probability(parse_model(model), context, continuation).str();
      },
      py::arg("context"), py::arg("continuation"), py::arg("model") = "uniform",
      "Exact probability as a 'num/den' string.");

  m.def(
      "witness_search_univ",
      [](const std::string& alpha, std::size_t n, std::size_t horizon) -> py::object {
        const auto r = witness_search_univ(ConditionalModel::uniform(Alphabet::binary()),
                                           ExactProb::parse(alpha), n, horizon);
        if (!r.witness) return py::none();
        py::dict d;
        d["m"] = r.witness->extension;
        d["string"] = r.witness->string;
        d["value"] = r.witness->value.str();
        return d;
      },
      py::arg("alpha"), py::arg("n") = 1, py::arg("horizon") = 10);

  m.def(
      "generate_dataset",
      [](std::size_t min_size, std::size_t max_size, std::uint64_t seed, const std::string& scheme,
         bool underspecified) {
        DatasetSpec spec;
        spec.min_size = min_size;
        spec.max_size = max_size;
        spec.seed = seed;
        spec.scheme = parse_scheme(scheme);
        spec.underspecified = underspecified;
        py::list out;
        for (const auto& c : generate_dataset(spec)) out.append(case_dict(c));
        return out;
      },
      py::arg("min_size") = 2, py::arg("max_size") = 10, py::arg("seed") = 0,
      py::arg("scheme") = "paper_counts", py::arg("underspecified") = false);

  m.def(
      "stub_answer",
      [](const std::string& stub, const std::string& context, const std::string& question) {
        return stub_answer(StubSpec::parse(stub), context, question);
      },
      py::arg("stub"), py::arg("context"), py::arg("question"));

  m.def(
      "normalize_answer", [](const std::string& raw) { return to_string(normalize_answer(raw)); },
      py::arg("raw"));

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int status;
        {
          py::gil_scoped_release release;
          status = run(args, out, err);
        }
        return py::make_tuple(status, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (status, stdout, stderr).");
}
