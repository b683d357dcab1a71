import csv
import math
import os
import subprocess
import sys

import pytest

from cattaneo4.cli import main

RUN = [sys.executable, "-m", "cattaneo4"]


def run_cli(args, cwd, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(RUN + list(args), cwd=cwd, env=env,
                          capture_output=True, text=True)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_spectrum_roundtrip(tmp_path):
    out = tmp_path / "spec.csv"
    rc = main(["spectrum", "--L", "pi", "--N", "4", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert rows[0] == ["index", "multi_index", "lambda_sq"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4"]
    assert float(rows[1][2]) == 1.0
    assert float(rows[4][2]) == 16.0


def test_exceptional_subcommand(tmp_path):
    out = tmp_path / "exc.csv"
    rc = main(["exceptional", "--N", "4", "--kind", "sigma",
               "--gamma-rho", "4", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    vals = sorted(float(r[1]) for r in rows[1:])
    assert vals == [0.25, 4.0 / 9.0, 1.0, 4.0]


def test_limit3_schema(tmp_path):
    out = tmp_path / "l3.csv"
    rc = main(["limit3", "--t", "0.1", "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert rows[0] == ["k", "sigma", "coeff1", "exp1", "coeff2", "exp2",
                       "logvalue", "flag"]
    assert len(rows) == 13
    assert float(rows[1][1]) == 5.0
    assert float(rows[1][3]) == 2.0  # growth rate, not rate * t
    assert float(rows[1][5]) == -0.4
    assert all(r[7] in ("ok", "saturated", "exceptional") for r in rows[1:])


def test_exit_codes(tmp_path):
    # usage error
    assert main(["solve", "--a", "2"]) == 1
    # exceptional c without override
    rc = main(["solve", "--a", "2", "--b", "1", "--c", "0.25", "--N", "4",
               "--mode", "1", "--t", "0.5",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    # override with incompatible data: the degenerate mode is unsolvable
    rc = main(["solve", "--a", "2", "--b", "1", "--c", "0.25", "--N", "4",
               "--mode", "2", "--alpha", "1", "--beta", "0", "--t", "0.5",
               "--override", "--out", str(tmp_path / "y.csv")])
    assert rc == 3
    # singular whole-line frequency
    rc = main(["wholeline", "--a", "1", "--b", "1", "--c", "0.25",
               "--t", "1", "--side", "above", "--j-min", "0", "--j-max", "0",
               "--out", str(tmp_path / "z.csv")])
    assert rc == 0  # offset 1 clears the singular frequency
    assert main(["nosuchcommand"]) == 1


def test_solve_writes_values(tmp_path):
    out = tmp_path / "solve.csv"
    rc = main(["solve", "--a", "2", "--b", "1", "--c", "0.003", "--N", "4",
               "--mode", "2", "--alpha", "0.5", "--t", "0.25",
               "--out", str(out)])
    assert rc == 0
    rows = read_csv(out)
    assert rows[0][0] == "n"
    assert len(rows) == 5


def test_out_default_naming(tmp_path):
    rc = run_cli(["spectrum", "--N", "3"], cwd=tmp_path)
    assert rc.returncode == 0
    assert (tmp_path / "spectrum.csv").exists()
    assert "spectrum.csv" in rc.stdout


def test_verify_battery(tmp_path):
    rc = run_cli(["verify", "--quick", "--seed", "3"], cwd=tmp_path)
    assert rc.returncode == 0, rc.stderr
    rows = read_csv(tmp_path / "verify.csv")
    assert rows[0] == ["check", "max_error", "tol", "status"]
    assert len(rows) > 5
    assert all(r[3] == "ok" for r in rows[1:])


@pytest.mark.parametrize("args", [
    ["solve", "--a", "2", "--b", "1", "--c", "0.003", "--N", "24",
     "--mode", "3", "--t", "0.6"],
    ["boundary", "--a", "2", "--b", "1", "--c", "0.003", "--N", "16",
     "--g0", "1", "--g1", "0", "--signal", "sin", "--omega", "3",
     "--T", "2", "--t", "1.1"],
    ["limit2", "--a", "1", "--b", "1", "--gamma", "1", "--t", "1"],
])
def test_byte_identical_across_threads_and_reruns(tmp_path, args):
    blobs = []
    for tag, threads in (("r1", "1"), ("r2", "1"), ("r3", "4")):
        d = tmp_path / tag
        d.mkdir()
        rc = run_cli(args, cwd=d, env_extra={"CATTANEO4_THREADS": threads})
        assert rc.returncode == 0, rc.stderr
        name = args[0] + ".csv"
        blobs.append((d / name).read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]


def test_csv_is_utf8_lf(tmp_path):
    out = tmp_path / "w.csv"
    rc = main(["wholeline", "--a", "1", "--b", "1", "--c", "0.01",
               "--t", "1", "--out", str(out)])
    assert rc == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    raw.decode("utf-8")
    txt = raw.decode()
    # 17 significant digits survive the round trip
    lam_cell = txt.splitlines()[1].split(",")[1]
    assert float(lam_cell) == 1.0 / math.sqrt(0.01) + 0.5


def test_help_exits_zero():
    assert main(["--help"]) == 0
    assert main(["solve", "--help"]) == 0
