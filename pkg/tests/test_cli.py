import json
import shutil
import subprocess
import sys

import pytest

from htk.cli import main
from htk.embed import EmbeddingMatrix
from htk.taxonomy import default_taxonomy_path, example_taxonomy_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_mixture_and_simple(capsys):
    code, out, _ = run(capsys, "parse", "Ah-Bv", "ilC")
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines()]
    assert lines[0] == {"kind": "mixture", "first": "Ah", "second": "Bv"}
    assert lines[1] == {"kind": "simple", "prefix": "il", "main": "C", "suffix": ""}


def test_parse_bad_label(capsys):
    code, _, err = run(capsys, "parse", "--taxonomy", str(default_taxonomy_path()), "ah")
    assert code == 1
    assert "main symbol" in err


def test_parse_all_default_labels(capsys, tmp_path, default_taxonomy):
    f = tmp_path / "labels.txt"
    f.write_text("\n".join(default_taxonomy.labels) + "\n")
    code, out, err = run(capsys, "parse", "--file", str(f))
    assert code == 0 and not err
    assert len(out.splitlines()) == 99


def test_missing_taxonomy_exits_2(capsys, tmp_path):
    code, _, _ = run(capsys, "parse", "--taxonomy", str(tmp_path / "nope.json"), "Ah")
    assert code == 2


@pytest.mark.parametrize("path,shape", [(example_taxonomy_path(), "9 x 10"), (default_taxonomy_path(), "61 x 99")])
def test_embed_shapes(capsys, tmp_path, path, shape):
    out_file = tmp_path / "m.csv"
    code, out, _ = run(capsys, "embed", "--taxonomy", str(path), "--out", str(out_file), "--verify")
    assert code == 0
    assert f"shape: {shape}" in out
    assert "verify: ok" in out
    m = EmbeddingMatrix.load(out_file)
    assert m.shape_text == shape


def test_embed_single_label(capsys, tmp_path):
    t = tmp_path / "t.json"
    t.write_text(json.dumps({"schema": "htk.taxonomy/1", "labels": ["Ah"]}))
    code, out, _ = run(capsys, "embed", "--taxonomy", str(t))
    assert code == 0
    assert "shape: 1 x 1" in out


def test_embed_verify_fails_on_impossible_tolerance(capsys):
    code, _, err = run(capsys, "embed", "--taxonomy", str(default_taxonomy_path()), "--verify", "--tol", "0")
    # exact zero deviation is not achievable in floating point for every pair
    assert code in (0, 3)
    if code == 3:
        assert "worst pair" in err


def test_cluster(capsys, tmp_path):
    counts = tmp_path / "c.csv"
    counts.write_text("label,count\nAh,50\nBv,40\nAxh,3\nGro,20\nrGo-Gro,2\n")
    over = tmp_path / "o.csv"
    over.write_text("rGo-Gro,Ah\n")
    out = tmp_path / "map.json"
    code, stdout, _ = run(capsys, "cluster", "--counts", str(counts), "--overrides", str(over), "--out", str(out))
    assert code == 0
    assert "retained 3" in stdout
    data = json.loads(out.read_text())
    assert data["mapping"]["Axh"] == "Ah"
    assert data["mapping"]["rGo-Gro"] == "Ah"
    empty = tmp_path / "e.csv"
    empty.write_text("Ah,1\n")
    assert run(capsys, "cluster", "--counts", str(empty))[0] == 3


def test_generate_split_baseline_evaluate(capsys, tmp_path, monkeypatch):
    monkeypatch.delenv("HTK_SEED", raising=False)
    rec = tmp_path / "rec.jsonl"
    assert run(capsys, "generate", "--count", "60", "--out", str(rec))[0] == 0
    split = tmp_path / "split.json"
    code, out, _ = run(capsys, "split", "--records", str(rec), "--out", str(split))
    assert code == 0 and "36/12/12" in out
    emb = tmp_path / "m.json"
    assert run(capsys, "embed", "--out", str(emb))[0] == 0
    samples = tmp_path / "s.jsonl"
    args = ["baseline", "--records", str(rec), "--split", str(split), "--embeddings", str(emb)]
    assert run(capsys, *args, "--out", str(samples))[0] == 0
    report = tmp_path / "r.json"
    code, _, _ = run(capsys, "evaluate", "--samples", str(samples), "--embeddings", str(emb),
                     "--k", "1", "--k", "5", "--out", str(report))
    assert code == 0
    r = json.loads(report.read_text())
    assert r["horizon"]["acc@5"] >= r["horizon"]["acc@1"]
    assert set(r["categorical"]) == {"carbonate", "humus", "rooting", "soil_color", "soil_type"}

    # raw vectors decoded by the evaluator give the same report
    samples_v = tmp_path / "sv.jsonl"
    assert run(capsys, *args, "--vectors", "--out", str(samples_v))[0] == 0
    report_v = tmp_path / "rv.json"
    run(capsys, "evaluate", "--samples", str(samples_v), "--embeddings", str(emb), "--k", "1,5",
        "--jobs", "4", "--out", str(report_v))
    assert report_v.read_text() == report.read_text()


def test_perfect_predictions_report(capsys, tmp_path):
    emb = tmp_path / "m.csv"
    run(capsys, "embed", "--taxonomy", str(example_taxonomy_path()), "--out", str(emb))
    m = EmbeddingMatrix.load(emb)
    lines = []
    for i, lab in enumerate(m.labels):
        lines.append(json.dumps({
            "id": f"p{i}", "truth_depths": [0.4, 1.0], "pred_depths": [0.4, 0.995],
            "truth_labels": [lab, lab], "pred_vectors": [m.column(lab).tolist()] * 2,
            "truth_stones": [1, 2], "pred_stones": [1, 2],
        }))
    samples = tmp_path / "s.jsonl"
    samples.write_text("\n".join(lines) + "\n")
    # at k > 1 every top-k list holds k - 1 wrong classes, so only k = 1 can reach 100
    code, out, _ = run(capsys, "evaluate", "--samples", str(samples), "--embeddings", str(emb),
                       "--taxonomy", str(example_taxonomy_path()), "--k", "1")
    assert code == 0
    r = json.loads(out)
    assert r["depth"]["iou"] == 100.0
    assert r["stones"]["mse"] == 0.0
    assert all(v == 100.0 for v in r["horizon"].values())


def test_evaluate_dimension_mismatch_exit_3(capsys, tmp_path):
    emb = tmp_path / "m.csv"
    run(capsys, "embed", "--taxonomy", str(example_taxonomy_path()), "--out", str(emb))
    samples = tmp_path / "s.jsonl"
    samples.write_text(json.dumps({"id": "bad7", "truth_depths": [1.0], "pred_depths": [1.0],
                                   "truth_labels": ["Al"], "pred_vectors": [[1.0, 0.0]]}) + "\n")
    code, _, err = run(capsys, "evaluate", "--samples", str(samples), "--embeddings", str(emb))
    assert code == 3
    assert "bad7" in err


def test_generate_invalid_config_exit_2(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"label_skew": -1}))
    assert run(capsys, "generate", "--config", str(cfg))[0] == 2


def test_htk_seed_overrides(capsys, monkeypatch):
    run(capsys, "generate", "--count", "3", "--seed", "1")
    monkeypatch.setenv("HTK_SEED", "99")
    _, a, _ = run(capsys, "generate", "--count", "3", "--seed", "1")
    _, b, _ = run(capsys, "generate", "--count", "3", "--seed", "99")
    monkeypatch.delenv("HTK_SEED")
    _, c, _ = run(capsys, "generate", "--count", "3", "--seed", "1")
    assert a == b != c
    monkeypatch.setenv("HTK_SEED", "x")
    assert run(capsys, "generate", "--count", "3")[0] == 2


def test_decode_command(capsys, tmp_path):
    emb = tmp_path / "m.csv"
    run(capsys, "embed", "--taxonomy", str(example_taxonomy_path()), "--out", str(emb))
    m = EmbeddingMatrix.load(emb)
    vec = tmp_path / "v.jsonl"
    vec.write_text(json.dumps(m.column("Bv").tolist()) + "\n")
    code, out, _ = run(capsys, "decode", "--embeddings", str(emb), "--vectors", str(vec), "--top", "3")
    assert code == 0
    assert json.loads(out)["ranked"][0] == "Bv"
    assert len(json.loads(out)["ranked"]) == 3


@pytest.mark.skipif(shutil.which("htk") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["htk", "parse", "Ah+Bv"], capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["second"] == "Bv"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "htk.cli", "parse", "aB"], capture_output=True, text=True)
    assert res.returncode == 1
