"""End-to-end smoke tests for the python bindings."""

import json
from pathlib import Path

import pytest

import sentgrid

REPO = Path(__file__).resolve().parents[2]


def test_sha256_known_vector():
    assert (
        sentgrid.sha256_hex("abc")
        == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    )


def test_extract_label_marker_and_fallback():
    parsed = sentgrid.extract_label("The tone is friendly.\nSentiment: Positive")
    assert parsed["label"] == "Positive"
    assert parsed["rationale"] == "The tone is friendly."

    prose = sentgrid.extract_label("Could be positive early on, but overall negative.")
    assert prose["label"] == "Negative"

    assert sentgrid.extract_label("no stance here")["failure"] == "no_label_found"
    assert sentgrid.extract_label("   \n ")["failure"] == "empty_response"
    assert (
        sentgrid.extract_label("Sentiment: Positive or Negative")["failure"] == "ambiguous"
    )


def test_extract_rationale_strips_echoes():
    echo = "Reply with a short explanation in plain prose."
    text = f"{echo}\n{echo}\nThe coverage praises the rollout.\n"
    assert sentgrid.extract_rationale(text, echo) == "The coverage praises the rollout."
    assert sentgrid.extract_rationale(f"{echo}\n   ", echo) == ""


def test_majority_vote_tie_rules():
    vote = sentgrid.majority_vote(["Positive", "Positive", "Negative"])
    assert vote["winner"] == "Positive" and not vote["tie_broken"]

    # Without a fallback the fixed priority applies: Neutral is absent from
    # the tie, so Positive wins over Negative.
    tied = sentgrid.majority_vote(["Positive", "Negative"])
    assert tied["winner"] == "Positive" and tied["tie_broken"]

    backed = sentgrid.majority_vote(["Positive", "Negative"], greedy_fallback="Negative")
    assert backed["winner"] == "Negative" and backed["tie_broken"]

    with pytest.raises(ValueError):
        sentgrid.majority_vote([])
    with pytest.raises(ValueError):
        sentgrid.majority_vote(["Sideways"])


def test_evaluate_scores_and_policies():
    pairs = [
        ("Positive", "Positive"),
        ("Positive", "Neutral"),
        ("Neutral", "Neutral"),
        ("Negative", None),
    ]
    wrong = sentgrid.evaluate(pairs, "count_as_wrong")
    assert wrong["n_docs"] == 4
    assert wrong["n_parse_failures"] == 1
    assert wrong["per_class"]["Positive"]["recall"] == pytest.approx(0.5)
    assert wrong["per_class"]["Negative"]["f1"] == 0.0

    neutral = sentgrid.evaluate(pairs, "fallback_neutral")
    assert neutral["accuracy"] == pytest.approx(2 / 4)

    excluded = sentgrid.evaluate(pairs, "exclude")
    assert excluded["accuracy"] == pytest.approx(2 / 3)

    with pytest.raises(ValueError):
        sentgrid.evaluate(pairs, "ignore")


def test_bucket_score_ranges():
    assert sentgrid.bucket_score(0.6) == "Positive"
    assert sentgrid.bucket_score(-0.05) == "Neutral"
    assert sentgrid.bucket_score(-1.0) == "Negative"
    assert sentgrid.bucket_score(0.4) is None
    with pytest.raises(ValueError):
        sentgrid.bucket_score(1.5)


def test_dataset_stats_match_fixture():
    stats = sentgrid.dataset_stats(
        str(REPO / "data/fixtures/persent_test_std.csv"), "persent", "test-std"
    )
    assert stats["n_positive"] == 293
    assert stats["n_neutral"] == 213
    assert stats["n_negative"] == 73
    assert stats["n_total"] == 579
    assert stats["n_unique_entities"] == 426
    assert stats["n_rejected"] == 0

    mock = sentgrid.dataset_stats(str(REPO / "data/fixtures/mock60.jsonl"), "wpan")
    assert (mock["n_positive"], mock["n_neutral"], mock["n_negative"]) == (20, 20, 20)
    assert mock["n_unique_entities"] == 6


def test_truncate_document_budget():
    text = "Orbit Labs leads.\n\n" + "filler paragraph. " * 400 + "\n\nOrbit Labs closes."
    short = sentgrid.truncate_document(text, "Orbit Labs", 200)
    assert len(short) <= 200
    assert "Orbit Labs" in short
    assert sentgrid.truncate_document("tiny", "x", 100) == "tiny"


def test_mock_completion_is_deterministic_and_parseable():
    digest = sentgrid.sha256_hex("some prompt")
    first = sentgrid.mock_completion(digest, 0, "alpha")
    assert first == sentgrid.mock_completion(digest, 0, "alpha")
    assert first != sentgrid.mock_completion(digest, 1, "alpha")

    labels = set()
    for index in range(40):
        parsed = sentgrid.extract_label(sentgrid.mock_completion(digest, index, "alpha"))
        labels.add(parsed.get("label", "failure"))
    assert {"Positive", "Neutral", "Negative"} <= labels


def test_validate_config():
    assert sentgrid.validate_config(str(REPO / "configs/fixture_experiment.json")) == []
    problems = sentgrid.validate_config(str(REPO / "configs/does_not_exist.json"))
    assert problems and "cannot open" in problems[0]


def _tiny_config(tmp_path):
    config = {
        "templates_dir": str(REPO / "templates/default"),
        "n_runs": 1,
        "seeds": [5],
        "parallelism": 2,
        "datasets": [
            {
                "name": "mock60",
                "path": str(REPO / "data/fixtures/mock60.jsonl"),
                "format": "wpan",
            }
        ],
        "backends": [{"id": "mock-a", "script": str(REPO / "data/mock/mock_a.jsonl")}],
        "strategies": [
            {
                "kind": "zero_shot_std",
                "table_column": "zero_shot_std",
                "sampling": {"mode": "greedy"},
            }
        ],
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config, indent=2))
    return path


def test_run_experiment_round_trip(tmp_path):
    config_path = _tiny_config(tmp_path)
    out_dir = tmp_path / "out"

    outcome = sentgrid.run_experiment(str(config_path), output_dir=str(out_dir))
    assert outcome["exit_code"] == 0
    assert not outcome["interrupted"]
    assert outcome["failed_cells"] == []
    assert outcome["backend_calls"] == 60

    report = json.loads(
        (out_dir / "runs/run-1/mock60/mock-a/zero_shot_std/report.json").read_text()
    )
    assert report["n_docs"] == 60
    assert 0.0 <= report["macro_f1"] <= 1.0
    assert (out_dir / "summary/mock60.txt").exists()

    rerun = sentgrid.run_experiment(str(config_path), output_dir=str(out_dir))
    assert rerun["exit_code"] == 0
    assert rerun["backend_calls"] == 0  # every cell resumed from its report

    dump = sentgrid.dump_transcripts(str(out_dir))
    assert "=== run-1/mock60/mock-a/zero_shot_std doc " in dump
    assert "gold: " in dump


def test_run_experiment_rejects_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    with pytest.raises(ValueError):
        sentgrid.run_experiment(str(bad))
