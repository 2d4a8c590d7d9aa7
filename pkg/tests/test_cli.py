import json
import subprocess
import sys

import numpy as np
import pytest

from fpuwave.cli import digest, main

FAST = ["--L", "64", "--h", "0.0078125"]


def run(tmp_path, *args):
    # later flags win, so the fast grid goes first
    return main([args[0], *FAST, *args[1:], "--out", str(tmp_path)])


def test_base(tmp_path):
    assert run(tmp_path, "base", "--c", "0.95") == 0
    meta = json.loads((tmp_path / "base_meta.json").read_text())
    assert meta["config"]["c"] == 0.95 and meta["residual"] <= 1e-5
    assert (tmp_path / "base_profile.csv").exists()


def test_solve_biased_records_shift(tmp_path):
    assert run(tmp_path, "solve", "--delta", "0.02", "--potential", "biased:0.3") == 0
    meta = json.loads((tmp_path / "solve_meta.json").read_text())
    assert meta["I_delta"] == pytest.approx(8 * 0.3 * 0.02 / 15, rel=1e-15)
    assert meta["iterations"] <= 25
    log = (tmp_path / "iterations.log").read_text().splitlines()
    assert len(log) == meta["iterations"] and log[0].startswith("iter")


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"c": 0.9, "delta": 0.01}))
    assert run(tmp_path, "base", "--config", str(cfg), "--c", "0.95") == 0
    meta = json.loads((tmp_path / "base_meta.json").read_text())
    assert meta["config"]["c"] == 0.95 and meta["config"]["delta"] == 0.01


@pytest.mark.parametrize("args", [["base", "--c", "0.5"], ["solve", "--delta", "-1"],
                                  ["solve", "--potential", "quartic"],
                                  ["solve", "--h", "0.3"], ["base", "--threads", "0"]])
def test_validation_exit_code(tmp_path, args):
    assert run(tmp_path, *args) == 2


def test_bad_config_file(tmp_path):
    assert run(tmp_path, "base", "--config", str(tmp_path / "nope.json")) == 2


def test_argparse_error_exit_code(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--bogus"])
    assert exc.value.code == 2


def test_numerical_failure_exit_code(tmp_path):
    # a spinodal wider than the monotone core makes the start inadmissible
    assert run(tmp_path, "solve", "--delta", "0.2", "--alpha", "0.25") == 3


def test_sweep_table(tmp_path):
    assert run(tmp_path, "sweep", "--deltas", "0.04,0.02", "--svg") == 0
    lines = (tmp_path / "sweep_table.csv").read_text().splitlines()
    assert lines[0] == "delta,normS,normS1,normS2,upsilon"
    assert lines[-1].startswith("slope,") and len(lines) == 4
    assert (tmp_path / "sweep.svg").exists()
    assert (tmp_path / "series_normS.csv").exists()
    rows = [list(map(float, r.split(","))) for r in lines[1:-1]]
    d = np.log([r[0] for r in rows])
    slope = [float(v) for v in lines[-1].split(",")[1:]]
    for i, got in enumerate(slope, start=1):
        assert got == pytest.approx(np.polyfit(d, np.log([r[i] for r in rows]), 1)[0], rel=1e-12)


def test_kinetics_table_append(tmp_path):
    table = tmp_path / "k.csv"
    for _ in range(2):
        assert run(tmp_path, "kinetics", "--delta", "0.02", "--table", str(table)) == 0
    rows = table.read_text().splitlines()
    assert len(rows) == 3 and rows[1] == rows[2]


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "fpuwave", "base", *FAST, "--out",
                          str(tmp_path)], capture_output=True, text=True)
    assert out.returncode == 0 and "residual" in out.stdout


def test_digest_changes_with_content(tmp_path):
    (tmp_path / "a").write_text("1")
    d1 = digest(tmp_path)
    (tmp_path / "a").write_text("2")
    assert digest(tmp_path) != d1
