import csv
import io
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from blankclone import machinefile
from blankclone.cli import main, parse_amplitudes
from blankclone.machines import build, build_prob_robust, build_quditNM_robust, build_qubit12_robust
from blankclone.sampling import state_with_overlap
from blankclone.simulate import run_pure
from blankclone.tensor import StateVector


def _machines():
    psi0, psi1 = state_with_overlap(0.4, 3)
    return [
        build("qubit12-fixed"),
        build_qubit12_robust(),
        build("quditNM-fixed", N=2, M=3, d=2),
        build_quditNM_robust(1, 2, 3),
        build("prob-fixed", psi0=psi0, psi1=psi1),
        build_prob_robust(psi0, psi1),
    ]


@pytest.mark.parametrize("machine", _machines(), ids=lambda m: m.variant)
def test_file_round_trip_bit_exact(machine, tmp_path):
    path = tmp_path / "m.json"
    machinefile.save(machine, path)
    back = machinefile.load(path)
    assert back.unitary.tobytes() == machine.unitary.tobytes()
    assert back.variant == machine.variant and back.layout == machine.layout
    assert back.n_inputs == machine.n_inputs
    if machine.success_projector is not None:
        assert back.success_projector.tobytes() == machine.success_projector.tobytes()
    assert machinefile.dumps(back) == machinefile.dumps(machine)


def test_signed_zero_survives():
    m = build_qubit12_robust()
    u = m.unitary.copy()
    i, j = np.argwhere(u == 0)[0]
    u[i, j] = complex(-0.0, -0.0)
    doc = machinefile.to_dict(m)
    doc["unitary"] = machinefile._encode(u)
    back = machinefile.loads(json.dumps(doc))
    assert np.signbit(back.unitary[i, j].real) and np.signbit(back.unitary[i, j].imag)


def test_load_rejects_bad_unitary_and_version():
    doc = machinefile.to_dict(build_qubit12_robust())
    doc["unitary"][0][0] = [2.0, 0.0]
    with pytest.raises(ValueError, match="unitary"):
        machinefile.from_dict(doc)
    doc = machinefile.to_dict(build_qubit12_robust())
    doc["format_version"] = 99
    with pytest.raises(ValueError, match="version"):
        machinefile.from_dict(doc)


def test_file_records_conventions():
    doc = machinefile.to_dict(build_quditNM_robust(1, 3, 2))
    assert doc["basis_conventions"]
    assert doc["layout"] == [2, 2, 2, 12]  # ancilla: D = 3 times blank dimension 4


def test_parse_amplitudes():
    np.testing.assert_array_equal(parse_amplitudes("0.6, 0.8j"), [0.6, 0.8j])
    np.testing.assert_array_equal(parse_amplitudes("1+1j,0"), [1 + 1j, 0])
    with pytest.raises(ValueError):
        parse_amplitudes("a,b")


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def robust_file(tmp_path, capsys):
    path = tmp_path / "robust.json"
    code, out, _ = run_cli(capsys, "build", "--variant", "qubit12-robust", "--out", path)
    assert code == 0 and "variant=qubit12-robust" in out
    return path


def test_build_summary_for_nm_robust(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "build", "--variant", "qudit-robust", "--n", 1, "--m", 2, "--d", 2,
                           "--out", tmp_path / "m.json")
    assert code == 0
    assert "total_dim=16 machine_dim=4 (D=2 x d^(M-N)=2)" in out


def test_clone_from_file_matches_memory(robust_file, tmp_path, capsys):
    out_path = tmp_path / "r.json"
    code, _, _ = run_cli(capsys, "clone", robust_file, "--input", "0.6,0.8j", "--blank", "0.28,0.96",
                         "--out", out_path)
    assert code == 0
    rep = json.loads(out_path.read_text())
    mem = run_pure(build_qubit12_robust(), StateVector([0.6, 0.8j]), StateVector([0.28, 0.96]))
    assert rep["per_clone_fidelity"] == mem.per_clone_fidelity
    assert rep == json.loads(json.dumps(mem.to_dict() | {"seed": rep["seed"]}))


def test_fixed_machine_rejects_blank(tmp_path, capsys):
    path = tmp_path / "fixed.json"
    run_cli(capsys, "build", "--variant", "qubit12-fixed", "--out", path)
    code, _, err = run_cli(capsys, "clone", path, "--blank", "0,1")
    assert code == 3 and "error" in err
    code, _, _ = run_cli(capsys, "clone", path, "--blank", "0,1", "--force-blank")
    assert code == 0


def test_prob_build_records_gamma(tmp_path, capsys):
    path = tmp_path / "p.json"
    code, out, _ = run_cli(capsys, "build", "--variant", "prob-robust", "--overlap", 0.5, "--out", path)
    assert code == 0 and "gamma=0.666666666667" in out
    m = machinefile.load(path)
    assert abs(m.params["gamma"] - 2 / 3) <= 1e-12
    code, out, _ = run_cli(capsys, "clone", path, "--which", 1, "--blank", "random", "--seed", 4)
    rep = json.loads(out)
    assert abs(rep["success_probability"] - 2 / 3) <= 1e-10


def test_full_depolarizing_blank_leaves_clones(robust_file, capsys):
    _, clean, _ = run_cli(capsys, "clone", robust_file, "--theta", 1.1, "--phi", 0.3)
    _, noisy, _ = run_cli(capsys, "clone", robust_file, "--theta", 1.1, "--phi", 0.3,
                          "--blank-noise", "depolarizing,1.0")
    a, b = json.loads(clean), json.loads(noisy)
    np.testing.assert_allclose(a["per_clone_fidelity"], b["per_clone_fidelity"], atol=1e-10)


def test_mixed_blank_flag(robust_file, capsys):
    code, out, _ = run_cli(capsys, "clone", robust_file, "--blank-mixed", "1:1,0;3:0,1")
    assert code == 0
    np.testing.assert_allclose(json.loads(out)["per_clone_fidelity"], 5 / 6, atol=1e-10)


def test_occupation_flag(tmp_path, capsys):
    path = tmp_path / "m.json"
    run_cli(capsys, "build", "--variant", "qudit-fixed", "--n", 2, "--m", 3, "--d", 2, "--out", path)
    code, out, _ = run_cli(capsys, "clone", path, "--occ", "1,1")
    assert code == 0 and json.loads(out)["input_descriptor"] == {"occupation": [1, 1]}


def test_sweep(robust_file, tmp_path, capsys):
    out_path = tmp_path / "sweep.csv"
    code, _, err = run_cli(capsys, "sweep", robust_file, "--steps", 3, "--out", out_path)
    assert code == 0 and "completion-dependent" in err
    rows = list(csv.DictReader(io.StringIO(out_path.read_text())))
    assert list(rows[0]) == ["p", "clone_fidelity_robust", "clone_fidelity_fixed_override",
                             "blank_invariance_distance"]
    assert [float(r["p"]) for r in rows] == [0.0, 0.5, 1.0]
    for r in rows:
        assert abs(float(r["clone_fidelity_robust"]) - 5 / 6) <= 1e-10
        assert float(r["blank_invariance_distance"]) <= 1e-10
    assert abs(float(rows[0]["clone_fidelity_fixed_override"]) - 5 / 6) <= 1e-10
    # the forced fixed machine depends on its completion, so only a departure is asserted
    assert abs(float(rows[-1]["clone_fidelity_fixed_override"]) - 5 / 6) > 0.01


def test_verify_exit_codes(capsys, tmp_path):
    code, _, err = run_cli(capsys, "verify", "--suite", "prob", "--seed", 1, "--out", tmp_path / "v.json")
    assert code == 0 and "PASS" in err
    code, _, err = run_cli(capsys, "verify", "--suite", "negative-controls", "--seed", 1,
                           "--out", tmp_path / "n.json")
    assert code == 1 and "XFAIL" in err


def test_argument_errors(capsys, tmp_path):
    assert run_cli(capsys, "clone", tmp_path / "missing.json")[0] == 2
    assert run_cli(capsys, "build", "--variant", "qudit-fixed", "--out", tmp_path / "x.json")[0] == 2
    assert run_cli(capsys, "build", "--variant", "qudit-fixed", "--n", 3, "--m", 2, "--d", 2,
                   "--out", tmp_path / "x.json")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["build", "--variant", "nonsense"])
    assert exc.value.code == 2


def test_size_cap_exit(capsys, tmp_path):
    code, _, err = run_cli(capsys, "build", "--variant", "qudit-robust", "--n", 1, "--m", 7, "--d", 4,
                           "--out", tmp_path / "big.json")
    assert code == 4 and "error" in err


def test_seed_from_environment(robust_file, capsys, monkeypatch):
    monkeypatch.setenv("BLANKCLONE_SEED", "17")
    _, a, _ = run_cli(capsys, "clone", robust_file, "--input", "random", "--blank", "random")
    _, b, _ = run_cli(capsys, "clone", robust_file, "--input", "random", "--blank", "random", "--seed", 17)
    assert json.loads(a)["seed"] == 17 and a == b


def test_module_entry_point(robust_file):
    env = dict(os.environ, BLANKCLONE_SEED="3")
    proc = subprocess.run([sys.executable, "-m", "blankclone", "clone", str(robust_file), "--input", "random"],
                          capture_output=True, text=True, env=env, timeout=60)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["seed"] == 3
