import json
import subprocess
import sys

import pytest

from conftest import random_tu
from triunitary import cli
from triunitary.csvio import body, parse_csv
from triunitary.serialize import dump_gate, gate_hash


def run(capsys, *args):
    code = cli.main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_gate_swap(capsys):
    code, out, _ = run(capsys, "verify-gate", "--preset", "swap")
    rep = json.loads(out)
    assert code == 0 and rep["tri_unitary"] is True and rep["perfect"] is False
    assert set(rep["residuals"]) == {"U", "tilde", "breve"}


def test_verify_gate_perfect_and_haar(capsys):
    assert json.loads(run(capsys, "verify-gate", "--preset", "perfect")[1])["perfect"] is True
    rep = json.loads(run(capsys, "verify-gate", "--preset", "haar", "--seed", "4")[1])
    assert rep["unitary"] is True and rep["tri_unitary"] is False


def test_classify(capsys):
    code, out, _ = run(capsys, "classify", "--preset", "appendix", "--phi", "1.5708", "--g", "0")
    rep = json.loads(out)
    assert code == 0 and rep["label"] == "InteractingNonErgodic"
    assert sum(len(v) for v in rep["eigenvalues"].values()) == 9
    assert json.loads(run(capsys, "classify", "--preset", "perfect")[1])["label"] == "Bernoulli"


def test_classify_rejects_non_triunitary(capsys):
    code, _, err = run(capsys, "classify", "--preset", "haar")
    assert code == 1 and "tri-unitary" in err


def test_gate_file(tmp_path, capsys):
    g = random_tu(3)
    path = tmp_path / "g.json"
    dump_gate(g, path)
    rep = json.loads(run(capsys, "verify-gate", "--gate-file", str(path))[1])
    assert rep["tri_unitary"] and rep["gate_hash"] == gate_hash(g)
    path.write_text("{}")
    assert run(capsys, "verify-gate", "--gate-file", str(path))[0] == 1


def test_validation_errors(capsys):
    assert run(capsys, "verify-gate")[0] == 1
    assert run(capsys, "verify-gate", "--preset", "appendix", "--phi", "1")[0] == 1
    code, _, err = run(capsys, "correlations", "--preset", "swap", "--L", "12", "--tmax", "1", "--a", "Q")
    assert code == 1 and "operator" in err


def test_resource_errors(capsys):
    code, _, err = run(capsys, "correlations", "--preset", "swap", "--L", "16", "--tmax", "1")
    assert code == 2 and "L=16" in err
    code, _, err = run(capsys, "correlations", "--preset", "swap", "--L", "8", "--tmax", "2")
    assert code == 2 and "window" in err
    assert run(capsys, "entanglement", "--preset", "swap", "--L", "24", "--tmax", "1")[0] == 2
    assert run(capsys, "kagome-correlations", "--preset", "swap", "--n1", "2", "--n2", "3")[0] == 2
    assert run(capsys, "kagome-correlations", "--preset", "swap")[0] == 2  # torus wrap


def test_correlations_csv(tmp_path, capsys):
    path = tmp_path / "c.csv"
    code, out, _ = run(capsys, "correlations", "--preset", "random", "--seed", "2", "--L", "8",
                       "--tmax", "1", "-o", str(path))
    assert code == 0 and out == ""
    header, cols, rows = parse_csv(path.read_text())
    assert cols == ["site", "x", "t", "re", "im", "on_ray"]
    assert header["L"] == 8 and header["seed"] == 2 and header["boundary"] == "periodic"
    assert header["config"]["preset"] == "random" and len(header["gate_hash"]) == 16
    off = [abs(complex(r[3], r[4])) for r in rows if r[5] == 0]
    assert max(off) < 1e-10


def test_correlations_perfect_tensor(capsys):
    _, out, _ = run(capsys, "correlations", "--preset", "perfect", "--L", "12", "--tmax", "2")
    _, _, rows = parse_csv(out)
    for s, x, t, re, im, _ in rows:
        # only operators that have not yet met a gate (idle at t = 1) survive
        if t == 2 or x != 0 or s % 4 != 3:
            assert abs(re) < 1e-10 and abs(im) < 1e-10


def test_correlations_kicked_ising(capsys):
    code, out, _ = run(capsys, "correlations", "--preset", "kicked-ising", "--L", "8", "--tmax", "1",
                       "--J-prime", "0.4", "--disorder", "0.3", "--seed", "5")
    header, _, rows = parse_csv(out)
    assert code == 0 and header["config"]["ki"]["J_prime"] == 0.4
    assert max(abs(r[3]) + abs(r[4]) for r in rows if r[5] == 0) < 1e-9


def test_entanglement_csv(capsys):
    code, out, _ = run(capsys, "entanglement", "--preset", "random", "--phi", "0.3", "--L", "12",
                       "--tmax", "2", "--boundary", "open", "--seeds", "0:2", "--region", "0:6")
    header, cols, rows = parse_csv(out)
    assert code == 0
    assert cols == ["t", "seed", "phi", "S2_bits", "SvN_bits", "flatness_residual"]
    assert header["region"] == list(range(6)) and set(header["gate_hash"]) == {"0", "1"}
    assert [r[1] for r in rows] == [0, 0, 0, 1, 1, 1]
    assert all(abs(r[3] - [0, 2, 2][r[0]]) < 1e-8 for r in rows)


def test_kagome_csv(capsys):
    code, out, _ = run(capsys, "kagome-correlations", "--preset", "swap", "--allow-wrap")
    header, cols, rows = parse_csv(out)
    assert code == 0 and header["n1"] == 2 and header["wraps"] is True
    assert cols == ["b_sublattice", "i1", "i2", "sublattice", "cycles", "re", "im", "on_ray"]
    assert len(rows) == 36
    assert all(abs(r[5] - r[7]) < 1e-12 for r in rows)  # SWAP: 1 on the ray, 0 elsewhere


@pytest.mark.parametrize("args", [
    ("correlations", "--preset", "random", "--seed", "7", "--L", "8", "--tmax", "1"),
    ("entanglement", "--preset", "random", "--L", "12", "--tmax", "2", "--seeds", "0:2"),
])
def test_deterministic(capsys, args):
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second and body(first)


def test_worker_count_does_not_change_output(monkeypatch, capsys):
    args = ("entanglement", "--preset", "random", "--L", "12", "--tmax", "1", "--seeds", "0:3")
    serial = run(capsys, *args)[1]
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    assert run(capsys, *args)[1] == serial


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "triunitary", "verify-gate", "--preset", "swap"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["tri_unitary"] is True
    bad = subprocess.run([sys.executable, "-m", "triunitary", "classify", "--preset", "haar"],
                         capture_output=True, text=True)
    assert bad.returncode == 1
