import json

import pytest

import cli
from conftest import MOVIES


@pytest.fixture
def run_yaml(tmp_path):
    """Three users who each rated eight movies, plus a config pointing at them."""
    movies = tmp_path / "movies.dat"
    movies.write_text("".join(f"{item_id}::{title}::{'|'.join(genres)}\n"
                              for item_id, title, genres in MOVIES))
    rows = []
    for u in range(3):
        for j in range(8):
            item = (u * 4 + j) % 12 + 1
            rows.append(f"{u + 1}::{item}::{j % 5 + 1}::{1000 + 3 * j + u}\n")
    rows.append("broken row\n")
    ratings = tmp_path / "ratings.dat"
    ratings.write_text("".join(rows))
    config = tmp_path / "run.yaml"
    config.write_text(
        f"seed: 21\n"
        f"out_dir: {tmp_path / 'run'}\n"
        f"workers: 1\n"
        f"data:\n  interactions: {ratings}\n  catalog: {movies}\n  min_interactions: 2\n"
        f"agent:\n  max_steps: 4\n  sessions_per_agent: 1\n"
        f"lifesim:\n  horizon_days: 1\n"
        f"env:\n  page_size: 4\n"
        f"persona:\n  candidates: 2\n"
        f"thoughts:\n  cap: 3\n")
    return str(config)


def test_full_pipeline(run_yaml, tmp_path):
    out = tmp_path / "run"
    assert cli.run(["--config", run_yaml, "ingest"]) == 0
    assert (out / "split").is_dir()
    assert json.loads((out / "stats.json").read_text())["users"] == 3
    assert len((out / "catalog.jsonl").read_text().splitlines()) == 12

    assert cli.run(["--config", run_yaml, "--agents", "2", "init-personas"]) == 0
    assert len((out / "personas.jsonl").read_text().splitlines()) == 2

    assert cli.run(["--config", run_yaml, "simulate", "--interview"]) == 0
    trajectories = (out / "trajectories.jsonl").read_text().splitlines()
    assert len(trajectories) == 2
    for name in ("memory.jsonl", "engagements.jsonl", "interviews.jsonl"):
        assert (out / name).exists()

    assert cli.run(["--config", run_yaml, "export-thoughts"]) == 0
    manifest = json.loads((out / "thoughts.manifest.json").read_text())
    assert manifest["ta_sources_reconstructed"] is True
    assert manifest["per_task"]["ID"] == 6

    assert cli.run(["--config", run_yaml, "eval", "temporal"]) == 0
    assert (out / "reports" / "temporal.json").exists()
    assert cli.run(["--config", run_yaml, "eval", "judge-prompts", "--kind", "human_likeness"]) == 0
    assert len((out / "judge_human_likeness.jsonl").read_text().splitlines()) == 2

    assert cli.run(["--config", run_yaml, "report"]) == 0
    merged = json.loads((out / "report.json").read_text())
    assert {"temporal", "judge_prompts"} <= set(merged["experiments"])
    assert merged["audit"]["failed_runs"] == 0

    saved = (out / "run_config.yaml").read_text()
    assert "seed: 21" in saved
    artifacts = json.loads((out / "manifest.json").read_text())["artifacts"]
    assert "trajectories.jsonl" in artifacts and "audit.log" not in artifacts


def test_simulation_is_reproducible(run_yaml, tmp_path):
    out = tmp_path / "run"
    assert cli.run(["--config", run_yaml, "ingest"]) == 0
    assert cli.run(["--config", run_yaml, "--agents", "1", "init-personas"]) == 0
    assert cli.run(["--config", run_yaml, "simulate"]) == 0
    first = (out / "trajectories.jsonl").read_text()
    assert cli.run(["--config", run_yaml, "simulate"]) == 0
    assert (out / "trajectories.jsonl").read_text() == first


def test_flags_override_config(run_yaml, tmp_path):
    other = tmp_path / "other"
    assert cli.run(["--config", run_yaml, "--out", str(other), "--seed", "5", "ingest"]) == 0
    assert "seed: 5" in (other / "run_config.yaml").read_text()


def test_missing_seed_is_an_error(tmp_path, capsys):
    assert cli.run(["--out", str(tmp_path / "run"), "ingest"]) == 2
    assert "seed is mandatory" in capsys.readouterr().err


def test_missing_inputs_fail_cleanly(run_yaml, tmp_path):
    out = tmp_path / "run"
    assert cli.run(["--config", run_yaml, "simulate"]) == 2
    assert "FAIL stage=simulate" in (out / "audit.log").read_text()
    assert cli.run(["--config", run_yaml, "report"]) == 2


def test_rating_predictions_without_a_run(run_yaml, tmp_path):
    predictions = tmp_path / "predictions.csv"
    predictions.write_text("prediction,truth\n3,4\n5,5\n")
    assert cli.run(["--config", run_yaml, "eval", "rating", "--predictions", str(predictions)]) == 0
    report = json.loads((tmp_path / "run" / "reports" / "rating.json").read_text())
    assert report["metrics"]["mae"] == 0.5
