import json

import pytest

from dialogue_acts.cli import run
from dialogue_acts.corpus import default_schema, parse_corpus

from conftest import DATA_DIR

SAMPLE = str(DATA_DIR / "sample_corpus.jsonl")


def test_no_command_is_usage_error(capsys):
    assert run([]) == 1


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        run(["train", "--no-such-flag"])
    assert exc.value.code == 1


def test_missing_corpus_is_usage_error(tmp_path, capsys):
    assert run(["train", "--output", str(tmp_path / "m.json")]) == 1
    assert "--corpus is required" in capsys.readouterr().err


def test_missing_corpus_file_is_data_error(tmp_path, capsys):
    code = run(["train", "--corpus", str(tmp_path / "nope.jsonl"),
                "--output", str(tmp_path / "m.json")])
    assert code == 2


def test_malformed_corpus_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{not json\n", encoding="utf-8")
    code = run(["train", "--corpus", str(bad),
                "--output", str(tmp_path / "m.json")])
    assert code == 2
    assert "line 1" in capsys.readouterr().err


def test_gen_deterministic(tmp_path):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    assert run(["gen", "--seed", "5", "--n-dialogues", "8",
                "--output", str(a)]) == 0
    assert run(["gen", "--seed", "5", "--n-dialogues", "8",
                "--output", str(b)]) == 0
    assert a.read_text(encoding="utf-8") == b.read_text(encoding="utf-8")
    corpus = parse_corpus(a, default_schema())
    assert len(corpus.dialogues) == 8


def test_train_predict_eval_roundtrip(tmp_path, capsys):
    model = tmp_path / "model.json"
    pred = tmp_path / "pred.jsonl"
    report = tmp_path / "report.json"
    assert run(["train", "--corpus", SAMPLE, "--output", str(model)]) == 0
    assert model.exists()

    assert run(["predict", "--model", str(model), "--corpus", SAMPLE,
                "--output", str(pred)]) == 0
    labeled = parse_corpus(pred, default_schema())
    assert labeled.n_utterances == 15
    for d in labeled.dialogues:
        for _, u in d.utterances():
            assert u.act is not None and u.category is not None

    assert run(["eval", "--model", str(model), "--corpus", SAMPLE,
                "--output", str(report)]) == 0
    doc = json.loads(report.read_text(encoding="utf-8"))
    assert set(doc) == {"category", "act"}
    assert 0.0 <= doc["act"]["macro_f"] <= 1.0
    assert "macro-F" in capsys.readouterr().err


def test_predict_schema_mismatch_names_both_hashes(tmp_path, capsys):
    model = tmp_path / "model.json"
    assert run(["train", "--corpus", SAMPLE, "--output", str(model)]) == 0
    other_schema = tmp_path / "schema.json"
    other_schema.write_text(json.dumps({
        "categories": ["X", "Y"],
        "acts": [{"name": "x1", "category": "X"},
                 {"name": "y1", "category": "Y"}]}), encoding="utf-8")
    code = run(["predict", "--model", str(model), "--corpus", SAMPLE,
                "--schema", str(other_schema)])
    assert code == 2
    err = capsys.readouterr().err
    assert "schema mismatch" in err
    from dialogue_acts.corpus import load_schema
    assert load_schema(other_schema).hash() in err
    assert default_schema().hash() in err


def test_cv_smoke(tmp_path):
    corpus = tmp_path / "synth.jsonl"
    out = tmp_path / "cv.json"
    assert run(["gen", "--seed", "2", "--n-dialogues", "9",
                "--output", str(corpus)]) == 0
    assert run(["cv", "--corpus", str(corpus), "--k", "3", "--tol", "1e-2",
                "--output", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert doc["k"] == 3
    assert len(doc["per_fold"]) == 3
    assert "pooled" in doc


def test_bench_smoke(tmp_path):
    corpus = tmp_path / "synth.jsonl"
    out = tmp_path / "bench.json"
    assert run(["gen", "--seed", "2", "--n-dialogues", "6",
                "--output", str(corpus)]) == 0
    assert run(["bench", "--corpus", str(corpus), "--tol", "1e-2",
                "--output", str(out)]) == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert [r["structure"] for r in doc] == ["binary", "ovo", "ova"]


def test_dump_config_and_file_overrides(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k": 7, "seed": 3}), encoding="utf-8")
    assert run(["cv", "--config", str(cfg), "--seed", "9",
                "--dump-config"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["k"] == 7  # from the file
    assert doc["seed"] == 9  # flag wins over the file
    assert doc["structure"] == "ovo"  # default


def test_unknown_config_key_is_data_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}), encoding="utf-8")
    assert run(["cv", "--config", str(cfg), "--corpus", SAMPLE]) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_bad_parameter_is_data_error(tmp_path, capsys):
    assert run(["gen", "--noise", "2.0",
                "--output", str(tmp_path / "x.jsonl")]) == 2
