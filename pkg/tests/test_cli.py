import json

import pytest

from adapterqa.cli import main

TABLE_OBJ = {
    "title": "Films",
    "header_rows": [[{"text": "Year"}, {"text": "Film"}]],
    "body_rows": [[{"text": "2013"}, {"text": "Padhe Padhe"}]],
}


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_no_arguments_prints_usage_and_exits_2(capsys):
    code, _out, err = run(capsys, [])
    assert code == 2
    assert "usage" in err.lower()


def test_unknown_subcommand_exits_2(capsys):
    code, _, _ = run(capsys, ["frobnicate"])
    assert code == 2


def test_linearize_roundtrip(tmp_path, capsys):
    table_path = tmp_path / "table.json"
    table_path.write_text(json.dumps(TABLE_OBJ), encoding="utf-8")
    out_path = tmp_path / "flat.txt"
    code, _, _ = run(capsys, ["linearize", "--in", str(table_path), "--out", str(out_path)])
    assert code == 0
    assert out_path.read_text(encoding="utf-8") == "Year: 2013, Film: Padhe Padhe\n"


def test_linearize_validation_error_is_machine_readable(tmp_path, capsys):
    bad = {
        "title": "t",
        "header_rows": [[{"text": "a"}, {"text": "b"}]],
        "body_rows": [[{"text": "x", "colspan": 3}]],
    }
    table_path = tmp_path / "table.json"
    table_path.write_text(json.dumps(bad), encoding="utf-8")
    code, out, err = run(capsys, ["linearize", "--in", str(table_path)])
    assert code == 2
    assert out == ""
    payload = json.loads(err.strip().split("\n")[-1])
    assert payload["error"] == "SpanOutOfBounds"


def test_assemble_single(capsys):
    code, out, _ = run(
        capsys,
        ["assemble", "--question", "who won", "--title", "Final",
         "--context", "Year: 2013"],
    )
    assert code == 0
    assert out == "<question> who won <title> Final <context> Year: 2013\n"


def test_assemble_batch_with_budget(tmp_path, capsys):
    batch = tmp_path / "batch.jsonl"
    batch.write_text(
        json.dumps({"question": "q one", "title": "t", "context": "c1 c2 c3 c4"}) + "\n"
        + json.dumps({"question": "q two", "context": "c"}) + "\n",
        encoding="utf-8",
    )
    code, out, _ = run(capsys, ["assemble", "--batch", str(batch), "--max-tokens", "7"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "<question> q one <title> t <context> c1"
    assert lines[1] == "<question> q two <title> <context> c"


def test_assemble_empty_question_exits_2(capsys):
    code, _, err = run(capsys, ["assemble", "--question", "   "])
    assert code == 2
    assert json.loads(err.strip())["error"] == "EmptyQuestion"


def test_eval_writes_report(tmp_path, capsys):
    pred = tmp_path / "pred.txt"
    ref = tmp_path / "ref.txt"
    pred.write_text("the cat sat\n", encoding="utf-8")
    ref.write_text("the cat sat\n", encoding="utf-8")
    out = tmp_path / "report.json"
    code, stdout, _ = run(
        capsys, ["eval", "--pred", str(pred), "--ref", str(ref), "--out", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text(encoding="utf-8"))
    assert report["rouge1"]["f"] == 1.0
    assert report["bleu"] == pytest.approx(100.0)
    assert report["n"] == 1
    assert json.loads(stdout) == report


def test_count_params_reference_default(capsys):
    code, out, err = run(capsys, ["count-params"])
    assert code == 0
    payload = json.loads(out)
    assert payload["trainable"] == 6_343_680
    assert payload["percent"] == 1.56
    assert "6,343,680" in err and "1.56" in err


def test_count_params_with_ablation(tmp_path, capsys):
    ablation = tmp_path / "ablation.json"
    ablation.write_text(
        json.dumps({"removed_encoder": list(range(0, 3)),
                    "removed_decoder": list(range(12, 15))}),
        encoding="utf-8",
    )
    code, out, _ = run(capsys, ["count-params", "--ablation", str(ablation)])
    assert code == 0
    payload = json.loads(out)
    assert payload["trainable"] == 4_757_760
    assert payload["percent"] == 1.17


def test_count_params_custom_dims(tmp_path, capsys):
    dims = tmp_path / "dims.json"
    dims.write_text(
        json.dumps({"d_model": 32, "bottleneck": 8, "n_encoder_layers": 2,
                    "n_decoder_layers": 2, "base_total_params": 100_000}),
        encoding="utf-8",
    )
    code, out, _ = run(capsys, ["count-params", "--config", str(dims)])
    assert code == 0
    payload = json.loads(out)
    assert payload["trainable"] == 4 * 2 * (2 * 32 * 8 + 8 + 32)


def test_plan_ablation_grid_jsonl(tmp_path, capsys):
    out = tmp_path / "plan.jsonl"
    code, _, _ = run(capsys, ["plan-ablation", "--mode", "grid", "--out", str(out)])
    assert code == 0
    lines = out.read_text(encoding="utf-8").strip().split("\n")
    assert len(lines) == 36
    first = json.loads(lines[0])
    assert first["label"] == "(0-6, 12-18)"
    assert first["trainable"] == 2_643_200


def test_plan_ablation_uniform_stdout(capsys):
    code, out, _ = run(capsys, ["plan-ablation", "--mode", "uniform"])
    assert code == 0
    assert len(out.strip().split("\n")) == 12


def test_identical_invocations_are_byte_identical(capsys):
    _, out_a, _ = run(capsys, ["plan-ablation", "--mode", "grid"])
    _, out_b, _ = run(capsys, ["plan-ablation", "--mode", "grid"])
    assert out_a == out_b


def test_gradcheck_small_model(capsys):
    code, out, _ = run(
        capsys,
        ["gradcheck", "--d-model", "8", "--bottleneck", "4", "--enc-layers", "1",
         "--dec-layers", "1", "--vocab", "16", "--seq-len", "4"],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["max_rel_error"] < 1e-4


def test_train_toy_copy_task(tmp_path, capsys):
    out = tmp_path / "log.json"
    code, stdout, _ = run(
        capsys,
        ["train-toy", "--task", "copy", "--steps", "5", "--out", str(out)],
    )
    assert code == 0
    log = json.loads(out.read_text(encoding="utf-8"))
    assert len(log["losses"]) == 5
    assert log["initial_loss"] == log["losses"][0]


def test_train_toy_unknown_task(capsys):
    code, _, err = run(capsys, ["train-toy", "--task", "reverse", "--steps", "1"])
    assert code == 2
    assert json.loads(err.strip())["error"] == "InputError"


def test_stats_and_prepare(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    record = {
        "id": "r1",
        "question": "what year",
        "title": "Films",
        "context": {"table": TABLE_OBJ},
        "answers": ["2013"],
    }
    data.write_text(json.dumps(record) + "\n", encoding="utf-8")

    code, out, _ = run(capsys, ["stats", "--in", str(data), "--modality", "table"])
    assert code == 0
    stats = json.loads(out)
    assert stats["n_samples"] == 1
    assert stats["max_table_cols"] == 2

    prepared = tmp_path / "prepared.jsonl"
    code, _, _ = run(
        capsys,
        ["prepare", "--in", str(data), "--modality", "table", "--out", str(prepared)],
    )
    assert code == 0
    example = json.loads(prepared.read_text(encoding="utf-8"))
    assert example["input"].startswith("<question> what year <title> Films <context>")
    assert example["target"] == "2013"


def test_stats_schema_error_exits_2(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    data.write_text("{\"id\": \"r\"}\n", encoding="utf-8")
    code, _, err = run(capsys, ["stats", "--in", str(data), "--modality", "text"])
    assert code == 2
    assert json.loads(err.strip())["error"] == "SchemaError"


def test_missing_file_is_internal_error(capsys):
    code, _, err = run(capsys, ["linearize", "--in", "/nonexistent/table.json"])
    assert code == 1
    assert "message" in json.loads(err.strip())


def test_module_entry_point_runs():
    import os
    import pathlib
    import subprocess
    import sys

    root = pathlib.Path(__file__).resolve().parents[1]
    env = dict(os.environ, PYTHONPATH=str(root / "src"))
    proc = subprocess.run(
        [sys.executable, "-m", "adapterqa", "count-params"],
        capture_output=True, text=True, env=env, cwd=str(root),
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["trainable"] == 6_343_680
