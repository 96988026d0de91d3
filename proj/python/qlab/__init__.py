"""Python access to the qlab library."""

from ._qlab import (
    QlabError,
    chain_probability,
    continuation_set,
    generate_dataset,
    judge,
    normalize_answer,
    run,
    stub_answer,
    witness_search_univ,
)

__all__ = [
    "QlabError",
    "chain_probability",
    "continuation_set",
    "generate_dataset",
    "judge",
    "normalize_answer",
    "run",
    "stub_answer",
    "witness_search_univ",
]
