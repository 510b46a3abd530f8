import json

import pytest

from recipx.cli import main
from recipx.explain import ExplainedRecommendation
from recipx.model import load_dataset

TWO_CONDITIONS = {
    "conditions": [{"mode": "one-sided"}, {"mode": "reciprocal"}],
    "cost": {"acceptance-cost": 1},
    "policy": {"explanation-confidence": {"one-sided": 0.7, "reciprocal": 0.9}, "tremble": 0.05},
    "recs-per-user": 5,
    "seed": 21,
}


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "pop.jsonl"
    assert main(["generate", "--out", str(path), "--users", "40", "--seed", "3", "--views", "10", "15",
                 "--messages", "3", "6"]) == 0
    return path


def test_generate_round_trip(tmp_path, capsys):
    out = tmp_path / "d.jsonl"
    assert main(["generate", "--out", str(out), "--users", "118", "--seed", "7"]) == 0
    assert "118 users" in capsys.readouterr().out
    assert len(load_dataset(out).users) == 118


def test_generate_deterministic(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for p in (a, b):
        assert main(["generate", "--out", str(p), "--users", "20", "--seed", "5"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_generate_rejects_one_user(tmp_path, capsys):
    assert main(["generate", "--out", str(tmp_path / "x.jsonl"), "--users", "1"]) == 1
    assert "n-users must be >= 2" in capsys.readouterr().err


def test_generate_unwritable(tmp_path):
    assert main(["generate", "--out", str(tmp_path / "missing" / "x.jsonl"), "--users", "4"]) == 2


def test_generate_with_schema_file(tmp_path):
    schema = tmp_path / "schema.json"
    schema.write_text(json.dumps({"attributes": [{"id": "pets", "kind": "categorical", "values": ["cat", "dog"]}]}))
    out = tmp_path / "d.jsonl"
    assert main(["generate", "--out", str(out), "--users", "6", "--schema", str(schema)]) == 0
    assert load_dataset(out).schema.ids == ("pets",)


def test_explain_correlation(capsys):
    assert main(["explain", "--from", "bob", "--to", "alice", "--method", "correlation", "-k", "1"]) == 0
    assert "slim body" in capsys.readouterr().out


def test_explain_transparent(capsys):
    assert main(["explain", "--from", "bob", "--to", "alice", "--method", "transparent", "-k", "1"]) == 0
    out = capsys.readouterr().out
    assert "never smokes" in out.splitlines()[1]


def test_explain_one_sided_privacy(capsys):
    assert main(["explain", "--from", "bob", "--to", "alice", "--mode", "one-sided", "--style", "privacy"]) == 0
    out = capsys.readouterr().out
    assert "may like you" not in out and "We believe" not in out
    assert len(out.splitlines()) == 2


def test_explain_json_round_trip(capsys):
    assert main(["explain", "--from", "bob", "--to", "alice", "--format", "json"]) == 0
    er = ExplainedRecommendation.from_dict(json.loads(capsys.readouterr().out))
    assert er.mode == "reciprocal" and er.backward is not None
    assert er.forward.items[0].value == "slim"


@pytest.mark.parametrize("argv, code", [
    (["explain", "--from", "bob", "--to", "carol"], 1),
    (["explain", "--from", "bob", "--to", "alice", "--method", "vibes"], 1),
    (["explain", "--from", "bob", "--to", "alice", "--data", "/nonexistent/d.jsonl"], 2),
    (["explain", "--from", "bob"], 1),
])
def test_explain_errors(argv, code):
    assert main(argv) == code


def test_recommend_json(capsys):
    assert main(["recommend", "--user", "bob", "--count", "3", "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert [r["recommendation"]["recommended"] for r in out][0] == "alice"
    assert len(out) == 3


def test_recommend_text(capsys, dataset):
    assert main(["recommend", "--data", str(dataset), "--user", "u000", "--count", "2", "--style", "privacy"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("1. ") and "\n2. " in out


def _simulate(tmp_path, dataset, config, name="r.csv", workers=1):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(config))
    out = tmp_path / name
    code = main(["simulate", "--data", str(dataset), "--config", str(cfg), "--out", str(out),
                 "--workers", str(workers)])
    return code, out


def test_simulate_shape_and_rerun(tmp_path, dataset, capsys):
    code, out = _simulate(tmp_path, dataset, TWO_CONDITIONS)
    assert code == 0
    rows = out.read_text().splitlines()
    assert [r.split(",")[0] for r in rows[1:]] == ["condition", "condition", "pair"]
    assert "±" in capsys.readouterr().out
    code, again = _simulate(tmp_path, dataset, TWO_CONDITIONS, "r2.csv", workers=3)
    assert code == 0 and again.read_bytes() == out.read_bytes()


def test_simulate_zero_conditions(tmp_path, dataset, capsys):
    code, _ = _simulate(tmp_path, dataset, {"conditions": []})
    assert code == 1
    assert "conditions" in capsys.readouterr().err


def test_simulate_missing_config(tmp_path, dataset):
    assert main(["simulate", "--data", str(dataset), "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o.csv")]) == 2


def test_report(tmp_path, dataset, capsys):
    _, out = _simulate(tmp_path, dataset, TWO_CONDITIONS)
    capsys.readouterr()
    assert main(["report", "--csv", str(out), "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["conditions"]) == 2 and len(data["pairs"]) == 1


def test_log_env(monkeypatch, capsys):
    monkeypatch.setenv("RECIPX_LOG", "debug")
    assert main(["explain", "--from", "bob", "--to", "alice"]) == 0
