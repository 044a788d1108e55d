import csv
import io
import json

import pytest

from coordrepr.cli import main

SMALL = ["--n-train", "300", "--n-test", "100", "--epochs", "3"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_bounds_examples(capsys):
    code, out, _ = run(capsys, "bounds", "--k", "2", "--lambda", "4", "--dims", "256x192")
    assert code == 0
    bound, cost = rows(out)
    assert (bound["simdr"], bound["heatmap"]) == ("0.25", "2.0")
    assert (cost["simdr"], cost["heatmap"]) == ("896", "3072")
    code, out, _ = run(capsys, "bounds", "--k", "1", "--lambda", "1", "--dims", "64x64")
    bound, cost = rows(out)
    assert (bound["simdr"], bound["heatmap"], cost["simdr"], cost["heatmap"]) == ("0.5", "0.5", "128", "4096")


def test_bounds_indivisible(capsys):
    code, _, err = run(capsys, "bounds", "--lambda", "3", "--dims", "64x64")
    assert code != 0 and "divisible" in err


def test_bounds_json(capsys):
    _, out, _ = run(capsys, "bounds", "--format", "json")
    data = json.loads(out)
    assert data[1]["simdr"] == 896


def test_audit(capsys, tmp_path):
    out_file = tmp_path / "a.csv"
    code, _, _ = run(capsys, "audit", "--scheme", "simdr", "--k", "2", "--dims", "256x192",
                     "--n", "100000", "--seed", "1", "--out", str(out_file))
    assert code == 0
    (row,) = rows(out_file.read_text())
    assert float(row["max_err"]) <= 0.25
    code, out, _ = run(capsys, "audit", "--scheme", "heatmap", "--lambda", "4", "--n", "20000")
    assert code == 0 and float(rows(out)[0]["max_err"]) <= 2.0


def test_audit_exit_code_on_violation(capsys):
    code, out, err = run(capsys, "audit", "--scheme", "heatmap", "--lambda", "4", "--dims", "64x64",
                         "--n", "20000", "--edge-inclusive")
    assert code == 1 and "bound" in err and out.startswith("scheme,")


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("COORDREPR_OUTPUT_DIR", str(tmp_path / "outdir"))
    assert run(capsys, "bounds", "--out", "sub/b.csv")[0] == 0
    assert (tmp_path / "outdir" / "sub" / "b.csv").exists()


def test_sweep_k(capsys):
    code, out, _ = run(capsys, "sweep-k", "--k", "1,2,3", *SMALL)
    assert code == 0
    table = rows(out)
    assert [r["k"] for r in table] == ["1", "2", "3"]
    assert set(table[0]) == {"k", "mean_px_error", "pckh@0.1", "oks_ap", "quant_floor"}
    floors = [float(r["quant_floor"]) for r in table]
    assert floors[0] > floors[1] > floors[2]
    code, out, _ = run(capsys, "sweep-k", "--k", "2", *SMALL)
    assert len(rows(out)) == 1


def test_gen_train_eval_pipeline(capsys, tmp_path):
    data = tmp_path / "train.kpds"
    assert run(capsys, "gen", "--n", "200", "--dims", "16x16", "--out", str(data))[0] == 0
    model = tmp_path / "m.kpmd"
    assert run(capsys, "train", "--data", str(data), "--epochs", "2", "--out", str(model))[0] == 0
    curve = rows((tmp_path / "m.kpmd.loss.csv").read_text())
    assert [c["epoch"] for c in curve] == ["1", "2"]
    code, out, _ = run(capsys, "eval", "--model", str(model), "--data", str(data))
    assert code == 0
    report = rows(out)[0]
    for key in ("ap", "ar", "ap50", "ap75", "pckh@0.1", "pckh@0.5", "mean_px_error"):
        assert float(report[key]) == float(report[key])  # finite, parseable


def test_lr_zero_matches_untrained(capsys, tmp_path):
    data = tmp_path / "d.kpds"
    run(capsys, "gen", "--n", "100", "--out", str(data))
    reports = []
    for epochs in ("0", "3"):
        m = tmp_path / f"m{epochs}.kpmd"
        run(capsys, "train", "--data", str(data), "--lr", "0", "--epochs", epochs, "--head", "heatmap",
            "--out", str(m))
        reports.append(run(capsys, "eval", "--model", str(m), "--data", str(data))[1])
    assert reports[0] == reports[1]


def test_missing_and_corrupt_files(capsys, tmp_path):
    code, _, err = run(capsys, "eval", "--model", str(tmp_path / "nope"), "--data", str(tmp_path / "nope"))
    assert code == 2 and "no such file" in err
    bad = tmp_path / "bad.kpds"
    bad.write_bytes(b"KPDS\x07\x00\x00\x00" + bytes(20))
    code, _, err = run(capsys, "train", "--data", str(bad), "--out", str(tmp_path / "m"))
    assert code == 2 and "version" in err


def test_compare_small(capsys):
    code, out, _ = run(capsys, "compare", "--dims", "16x16", "--k", "2", "--lambda", "4", "--seed", "1", *SMALL)
    assert code == 0
    simdr_row, heat_row = rows(out)
    assert (simdr_row["scheme"], heat_row["scheme"]) == ("simdr", "heatmap")
