import json
import os
import subprocess

import pytest

import qlab


def test_judge():
    assert qlab.judge("The car is blue. The house is blue.", "Is everything blue?") == "true"
    assert qlab.judge("The car is blue. The house is red.", "Is everything blue?") == "false"
    assert qlab.judge("The heart is large.", "Is everything blue?") == "undetermined"


def test_continuation_sets():
    for n in range(1, 7):
        assert len(qlab.continuation_set("forall blue", n)) == 1
        assert len(qlab.continuation_set("exists blue", n)) == 2**n - 1


def test_chain_probability_is_exact():
    assert qlab.chain_probability([], [0, 0, 0]) == "1/8"
    assert qlab.chain_probability([0], [1], "coin:1/3") == "2/3"


def test_witness():
    w = qlab.witness_search_univ("1/4")
    assert w["m"] == 3
    assert w["value"] == "1/8"


def test_dataset_shape():
    cases = qlab.generate_dataset()
    assert len(cases) == 62
    assert sum(c["family"] == "consistent" for c in cases) == 9
    assert all(qlab.stub_answer("oracle", c["context"], c["question"]) == c["gold"] for c in cases)


def test_normalize():
    assert qlab.normalize_answer(" Yes!") == "yes"
    assert qlab.normalize_answer("nope") == "unparseable"


def test_errors_raise():
    with pytest.raises(qlab.QlabError):
        qlab.judge("The car is mauve.", "Is everything blue?")
    with pytest.raises(ValueError):
        qlab.chain_probability([], [0], "coin:3/2")


def test_run_in_process():
    status, out, _ = qlab.run(["learn", "--target", "universal"])
    assert status == 0
    assert json.loads(out)["witness"]["m"] == 3


def test_cli_binary_matches():
    binary = os.environ.get("QLAB_BINARY")
    if not binary:
        pytest.skip("QLAB_BINARY not set")
    proc = subprocess.run([binary, "learn", "--experiment", "dilution"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == qlab.run(["learn", "--experiment", "dilution"])[1]
