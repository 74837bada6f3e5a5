"""Entity-sentiment prompting experiment harness (C++ core bindings)."""

from ._core import (
    bucket_score,
    dataset_stats,
    dump_transcripts,
    evaluate,
    extract_label,
    extract_rationale,
    majority_vote,
    mock_completion,
    run_experiment,
    sha256_hex,
    truncate_document,
    validate_config,
)

__all__ = [
    "bucket_score",
    "dataset_stats",
    "dump_transcripts",
    "evaluate",
    "extract_label",
    "extract_rationale",
    "majority_vote",
    "mock_completion",
    "run_experiment",
    "sha256_hex",
    "truncate_document",
    "validate_config",
]
