"""Driver: serialization round-trips, determinism, CLI exit codes."""
import json
import subprocess
import sys

import numpy as np
import pytest

from relcomp.driver import (
    DEMOS,
    Instance,
    InputError,
    build_problem,
    generate_instance,
    matrix_from_json,
    matrix_to_json,
    run_demo,
    run_verify,
    verify_instance,
)


def test_matrix_roundtrip_bit_exact():
    rng = np.random.default_rng(1)
    m = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    back = matrix_from_json(json.loads(json.dumps(matrix_to_json(m))))
    assert back.shape == m.shape
    assert np.array_equal(back, m)   # exact, not approximate


def test_instance_roundtrip_bit_exact():
    rng = np.random.default_rng(2)
    for _ in range(10):
        inst = generate_instance(rng)
        doc = json.loads(json.dumps(inst.to_json()))
        back = Instance.from_json(doc)
        assert np.array_equal(back.seed_span, inst.seed_span)
        assert np.array_equal(back.tau_a, inst.tau_a)
        assert np.array_equal(back.tau_b, inst.tau_b)
        assert back.tau_poles == () if not inst.tau_poles else all(
            a1 == a2 and np.array_equal(m1, m2)
            for (a1, m1), (a2, m2) in zip(back.tau_poles, inst.tau_poles))
        assert json.dumps(back.to_json(), sort_keys=True) \
            == json.dumps(inst.to_json(), sort_keys=True)


def test_from_json_rejects_unknown_schema():
    with pytest.raises(InputError):
        Instance.from_json({"schema": "nope"})


def test_build_problem_rejects_non_psd_b():
    inst = Instance(dim=1, seed_span=np.zeros((2, 0)),
                    triplet_kind="explicit",
                    triplet_data={"gamma0": np.array([[1.0, 0.0]]),
                                  "gamma1": np.array([[0.0, 1.0]])},
                    tau_dim=1, tau_mul=np.zeros((1, 0)),
                    tau_a=np.zeros((1, 1)), tau_b=np.array([[-1e-3]]))
    with pytest.raises(InputError, match="B not PSD"):
        build_problem(inst)


def test_build_problem_rejects_nonsymmetric_seed():
    # {f, i f} is not symmetric in C
    inst = Instance(dim=1, seed_span=np.array([[1.0], [1.0j]]),
                    triplet_kind="von_neumann", tau_dim=0)
    with pytest.raises(InputError, match="not symmetric"):
        build_problem(inst)


def test_verify_report_deterministic():
    w1 = run_verify(count=5, rng_seed=9)
    w2 = run_verify(count=5, rng_seed=9)
    assert json.dumps(w1["body"], sort_keys=True) \
        == json.dumps(w2["body"], sort_keys=True)
    assert w1["body"]["all_passed"]


def test_verify_instance_checks_all_pass():
    rng = np.random.default_rng(33)
    inst = generate_instance(rng)
    checks = verify_instance(inst, rng)
    assert checks and all(c.passed for c in checks)
    names = {c.name for c in checks}
    assert {"green_identity", "compression_equivalence", "krein_formula",
            "tau_infinity"} <= names


def test_verify_rejects_bad_bounds():
    with pytest.raises(InputError):
        run_verify(count=0)


def test_demo_outputs():
    for name in ("swap", "canonical", "a0"):
        text = run_demo(name)
        assert "flags" in text and "residual" in text
    with pytest.raises(InputError):
        run_demo("nope")


def test_demo_instances_verify():
    rng = np.random.default_rng(44)
    for inst in DEMOS.values():
        assert all(c.passed for c in verify_instance(inst, rng))


def cli(*args):
    return subprocess.run([sys.executable, "-m", "relcomp", *args],
                          capture_output=True, text=True)


def test_cli_verify_pass_exit_zero(tmp_path):
    out = tmp_path / "report.json"
    proc = cli("verify", "--count", "3", "--seed", "5",
               "--format", "json", "--out", str(out))
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(out.read_text())
    assert doc["body"]["schema"] == "relcomp-report-v1"
    assert doc["body"]["all_passed"]


def test_cli_input_error_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    proc = cli("verify", "--replay", str(bad))
    assert proc.returncode == 2
    assert "error:" in proc.stderr


def test_cli_replay_roundtrip(tmp_path):
    rng = np.random.default_rng(55)
    inst = generate_instance(rng)
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(inst.to_json()))
    proc = cli("verify", "--replay", str(path), "--seed", "1")
    assert proc.returncode == 0, proc.stdout + proc.stderr


def test_cli_unknown_demo_exit_two():
    assert cli("demo", "nope").returncode == 2


def test_cli_demo_exit_zero():
    proc = cli("demo", "swap")
    assert proc.returncode == 0
    assert "0.4j" in proc.stdout.replace(" ", "") or "flags" in proc.stdout
