"""End-to-end CLI pipeline on small runs: exit codes, files, determinism."""
import json
from pathlib import Path

import pytest

from policylens.cli import main, parse_evidence, DataError

from policylens.query import Theory, action_likelihood


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_usage_error_exit_code(capsys):
    assert main(["simulate"]) == 1  # missing --out
    assert main(["nope"]) == 1


def test_demo_compile_query_validate(tmp_path, capsys):
    code, out, _ = run(capsys, "demo", "--out", str(tmp_path))
    assert code == 0
    traces = json.loads(out)["traces"]

    code, out, _ = run(
        capsys, "compile", "--traces", traces, "--out", str(tmp_path / "carkey.nnf"), "--stats"
    )
    assert code == 0
    assert json.loads(out)["model_count"] == "3"
    assert (tmp_path / "carkey.stats.json").exists()
    assert (tmp_path / "carkey.manifest.json").exists()

    code, out, err = run(
        capsys,
        "query",
        "--theory", str(tmp_path / "carkey.nnf"),
        "--evidence", "Key_inside_car=1",
        "--target", "actions",
        "--pretty",
    )
    assert code == 0
    result = json.loads(out)
    assert result["likelihoods"]["drive"]["p"] == "0.5000"
    assert result["likelihoods"]["insert_key"]["p"] == "0"
    assert "drive" in err  # pretty table on stderr

    code, out, _ = run(capsys, "validate", "--theory", str(tmp_path / "carkey.nnf"))
    assert code == 0
    report = json.loads(out)
    assert report["ok"] and report["round_trip_identical"]


def test_query_action_conditioning(tmp_path, capsys):
    run(capsys, "demo", "--out", str(tmp_path))
    run(capsys, "compile", "--traces", str(tmp_path / "carkey.jsonl"),
        "--out", str(tmp_path / "t.nnf"))
    code, out, _ = run(
        capsys, "query", "--theory", str(tmp_path / "t.nnf"),
        "--evidence", "action=drive", "--target", "state",
    )
    assert code == 0
    result = json.loads(out)
    assert result["likelihoods"]["Drive_mode_on"]["p"] == "1.000"

    code, out, _ = run(
        capsys, "query", "--theory", str(tmp_path / "t.nnf"),
        "--evidence", "Key_inside_car=1", "--target", "var:Drive_mode_on",
    )
    assert json.loads(out)["likelihoods"]["Drive_mode_on"]["num"] == "1"
    assert json.loads(out)["likelihoods"]["Drive_mode_on"]["den"] == "2"


def test_query_no_supporting_observations(tmp_path, capsys):
    run(capsys, "demo", "--out", str(tmp_path))
    run(capsys, "compile", "--traces", str(tmp_path / "carkey.jsonl"),
        "--out", str(tmp_path / "t.nnf"))
    # drive mode on with key outside: never observed
    code, out, _ = run(
        capsys, "query", "--theory", str(tmp_path / "t.nnf"),
        "--evidence", "Drive_mode_on=1,Key_inside_car=0", "--target", "actions",
    )
    assert code == 0
    assert json.loads(out)["no_supporting_observations"] is True


def test_query_unknown_variable_is_data_error(tmp_path, capsys):
    run(capsys, "demo", "--out", str(tmp_path))
    run(capsys, "compile", "--traces", str(tmp_path / "carkey.jsonl"),
        "--out", str(tmp_path / "t.nnf"))
    code, _, err = run(
        capsys, "query", "--theory", str(tmp_path / "t.nnf"),
        "--evidence", "Bogus=1", "--target", "actions",
    )
    assert code == 2
    assert "Bogus" in err


def test_validate_broken_file_exit_code(tmp_path, capsys):
    bad = tmp_path / "broken.nnf"
    bad.write_text("nnf 4 4 2\nL 1\nL 2\nO 0 2 0 1\nA 2 0 2\n")
    (tmp_path / "broken.schema.json").write_text(
        json.dumps({"state_variables": ["x"], "actions": ["A", "B"], "selector_count": 0})
    )
    code, out, _ = run(capsys, "validate", "--theory", str(bad))
    assert code == 3


def test_simulate_deterministic_and_pipelines(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    for out in (a, b):
        code, stdout, _ = run(
            capsys, "simulate", "--episodes", "1", "--depth", "1",
            "--seed", "11", "--out", str(out),
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()  # byte-identical under fixed seed

    code, out, _ = run(
        capsys, "compile", "--traces", str(a), "--out", str(tmp_path / "t.nnf")
    )
    assert code == 0

    code, out, _ = run(
        capsys, "query", "--theory", str(tmp_path / "t.nnf"), "--target", "actions"
    )
    assert code == 0
    result = json.loads(out)
    total = sum(
        int(v["num"]) / int(v["den"]) for v in result["likelihoods"].values()
    )
    assert abs(total - 1) < 1e-12


def test_simulate_rejects_bad_depth(tmp_path, capsys):
    code, _, err = run(
        capsys, "simulate", "--episodes", "1", "--depth", "99",
        "--seed", "1", "--out", str(tmp_path / "x.jsonl"),
    )
    assert code == 2


def test_train_writes_policy_and_rewards(tmp_path, capsys):
    code, out, _ = run(
        capsys, "train", "--episodes", "2", "--depth", "1", "--seed", "3",
        "--out", str(tmp_path / "policy.json"),
    )
    assert code == 0
    payload = json.loads(out)
    policy = json.loads((tmp_path / "policy.json").read_text())
    assert payload["states"] == len(policy)
    rewards = (tmp_path / "policy.rewards.csv").read_text().splitlines()
    assert rewards[0] == "episode,total_reward"
    assert len(rewards) == 3

    # trained policy file feeds simulate
    code, out, _ = run(
        capsys, "simulate", "--episodes", "1", "--depth", "1", "--seed", "5",
        "--out", str(tmp_path / "t.jsonl"), "--policy", str(tmp_path / "policy.json"),
    )
    assert code == 0


def test_cli_results_match_engine(tmp_path, capsys):
    run(capsys, "demo", "--out", str(tmp_path))
    run(capsys, "compile", "--traces", str(tmp_path / "carkey.jsonl"),
        "--out", str(tmp_path / "t.nnf"))
    code, out, _ = run(
        capsys, "query", "--theory", str(tmp_path / "t.nnf"),
        "--evidence", "Key_inside_car=1", "--target", "actions",
    )
    theory = Theory.load(tmp_path / "t.nnf")
    engine = action_likelihood(theory, {"Key_inside_car": True}).as_dict()
    assert json.loads(out)["likelihoods"] == engine["likelihoods"]


def test_parse_evidence():
    assert parse_evidence("x=1,y=0") == {"x": True, "y": False}
    assert parse_evidence("action=EW") == {"action=EW": True}
    assert parse_evidence("E-G0_0-7=1") == {"E-G0_0-7": True}
    assert parse_evidence("") == {}
    with pytest.raises(DataError):
        parse_evidence("x=2")
    with pytest.raises(DataError):
        parse_evidence("x")
    with pytest.raises(DataError):
        parse_evidence("x=1,x=0")
