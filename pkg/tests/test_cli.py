import json

import pytest

from torops.cli import main
from torops.grid import TorusGrid, write_function_csv
from torops.probes import weierstrass


def _config(tmp_path, experiments):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({
        "grid": {"n": 1, "size": 256},
        "seed": 5,
        "experiments": experiments,
    }))
    return str(path)


def test_run_bounded_exits_zero(tmp_path, capsys):
    cfg = _config(tmp_path, [
        {"id": "flat", "kind": "holder", "symbol": "1", "s": 0.5,
         "bands": [2, 6], "probes": 2},
    ])
    code = main(["run", cfg, "--out", str(tmp_path / "out"), "--no-figures"])
    out = capsys.readouterr().out
    assert code == 0
    assert "flat: BOUNDED" in out
    assert "artifacts in" in out


def test_run_growth_exits_two(tmp_path, capsys):
    cfg = _config(tmp_path, [
        {"id": "bad", "kind": "holder", "symbol": "angle(xi1)^0.5", "s": 0.5,
         "bands": [2, 6], "probes": 2},
    ])
    code = main(["run", cfg, "--out", str(tmp_path / "out"), "--no-figures"])
    assert code == 2
    assert "SUSPECT-GROWTH" in capsys.readouterr().out


def test_run_reports_config_errors(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")
    code = main(["run", str(path), "--no-figures"])
    err = capsys.readouterr().err
    assert code == 1
    assert "invalid JSON" in err


def test_run_empty_experiment_list(tmp_path, capsys):
    cfg = _config(tmp_path, [])
    code = main(["run", cfg, "--out", str(tmp_path / "out"), "--no-figures"])
    assert code == 0


def test_gallery_list(capsys):
    code = main(["gallery", "list"])
    out = capsys.readouterr().out
    assert code == 0
    assert "kolmogorov" in out and "mumford" in out and "laplacian" in out
    assert "1/3" in out  # kolmogorov eps0


def test_norms_command(tmp_path, capsys):
    grid = TorusGrid(1, 256)
    f = weierstrass(grid, 0.5)
    path = tmp_path / "w.csv"
    write_function_csv(f, str(path))
    code = main(["norms", str(path), "--s", "0.5"])
    out = capsys.readouterr().out
    assert code == 0
    assert "sup norm" in out and "besov norm" in out
    assert "size=256" in out


def test_norms_missing_file(tmp_path, capsys):
    code = main(["norms", str(tmp_path / "absent.csv"), "--s", "0.5"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_axioms_flat_metric(capsys):
    code = main(["axioms", "flat", "--trials", "2000"])
    out = capsys.readouterr().out
    records = json.loads(out)
    assert code == 0
    names = [r["axiom"] for r in records]
    assert names == ["continuity", "temperance", "uncertainty"]
    assert all(r["verdict"] == "PASS" for r in records)


def test_axioms_gallery_model_includes_weight(capsys):
    code = main(["axioms", "kolmogorov", "--trials", "2000"])
    records = json.loads(capsys.readouterr().out)
    assert code == 0
    names = [r["axiom"] for r in records]
    assert "weight-admissibility" in names
    lam = next(r for r in records if r["axiom"] == "uncertainty")
    assert lam["constants"]["min_lambda"] >= 1.0 - 1e-12


def test_axioms_unknown_metric(capsys):
    code = main(["axioms", "nonsense"])
    assert code == 1
    assert "unknown model" in capsys.readouterr().err
