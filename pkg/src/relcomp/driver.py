"""Batch driver: generate or load instances, verify the invariant suite,
emit machine-readable reports.

An instance is a JSON document (complex entries as [re, im] pairs,
matrices row-major) holding the seed span, the triplet choice and the
rational parameter.  Reports are versioned ("v1") and their body is a
deterministic function of (instance, RNG seed); wall-clock timings live in
a separate section.  The RNG is numpy's default_rng (PCG64), seeded
explicitly, so reports reproduce across platforms.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .linrel import (
    DEFAULT_TOL,
    SpectrumError,
    classify_symmetry,
    make_relation,
    negate,
    relations_equal,
    resolvent,
)
from .nevanlinna import (
    RationalNevanlinna,
    decompose_tau,
    eval_tau,
    reassemble_decomposition,
    tau_limits,
    validate_tau,
)
from .triplet import (
    BoundaryTriplet,
    SymmetricSeed,
    triplet_report,
    von_neumann_triplet,
)
from .extension import (
    check_resolvent_identity,
    classify_compression,
    compression,
    krein_resolvent,
    tau_infinity,
)
from .exitspace import (
    build_exit_space,
    chain_residuals,
    compression_via_forbidden,
    direct_compression,
    generalized_resolvent_direct,
    minimality,
)

REPORT_SCHEMA = "relcomp-report-v1"
INSTANCE_SCHEMA = "relcomp-instance-v1"


class InputError(Exception):
    """Malformed or invalid instance input."""


# ---------------------------------------------------------------- serialization

def matrix_to_json(m: np.ndarray) -> list:
    """Row-major nested lists with complex entries as [re, im]."""
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data, rows=None, cols=None) -> np.ndarray:
    try:
        m = np.array([[complex(e[0], e[1]) for e in row] for row in data],
                     dtype=complex)
    except (TypeError, IndexError) as exc:
        raise InputError(f"malformed matrix: {exc}") from exc
    if not data:
        m = m.reshape(rows if rows is not None else 0,
                      cols if cols is not None else 0)
    if m.ndim == 1:
        m = m.reshape(len(data), 0)
    return m


@dataclass(frozen=True)
class Instance:
    """One verification problem: seed relation, triplet choice, parameter."""

    dim: int
    seed_span: np.ndarray
    triplet_kind: str            # "von_neumann" | "explicit"
    triplet_data: dict = field(default_factory=dict)
    tau_dim: int = 0
    tau_mul: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    tau_a: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    tau_b: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), complex))
    tau_poles: tuple = ()
    tol: float = DEFAULT_TOL

    def to_json(self) -> dict:
        tri = {"kind": self.triplet_kind}
        for key, val in self.triplet_data.items():
            tri[key] = matrix_to_json(val)
        return {
            "schema": INSTANCE_SCHEMA,
            "dim": self.dim,
            "seed_span": matrix_to_json(self.seed_span),
            "triplet": tri,
            "tau": {
                "dim": self.tau_dim,
                "mul_basis": matrix_to_json(self.tau_mul),
                "A": matrix_to_json(self.tau_a),
                "B": matrix_to_json(self.tau_b),
                "poles": [{"alpha": float(alpha), "A_j": matrix_to_json(aj)}
                          for alpha, aj in self.tau_poles],
            },
            "tol": self.tol,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Instance":
        try:
            if doc.get("schema") != INSTANCE_SCHEMA:
                raise InputError(f"unknown instance schema: {doc.get('schema')!r}")
            n = int(doc["dim"])
            tri = doc["triplet"]
            kind = tri["kind"]
            if kind not in ("von_neumann", "explicit"):
                raise InputError(f"unknown triplet kind: {kind!r}")
            tri_data = {k: matrix_from_json(v) for k, v in tri.items()
                        if k != "kind"}
            tau = doc["tau"]
            d = int(tau["dim"])
            mul = matrix_from_json(tau["mul_basis"], rows=d, cols=0)
            poles = tuple((float(p["alpha"]), matrix_from_json(p["A_j"]))
                          for p in tau["poles"])
            return cls(dim=n,
                       seed_span=matrix_from_json(doc["seed_span"], rows=2 * n),
                       triplet_kind=kind, triplet_data=tri_data,
                       tau_dim=d, tau_mul=mul,
                       tau_a=matrix_from_json(tau["A"]),
                       tau_b=matrix_from_json(tau["B"]),
                       tau_poles=poles,
                       tol=float(doc.get("tol", DEFAULT_TOL)))
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"malformed instance: {exc}") from exc


def build_problem(inst: Instance):
    """Materialize (triplet, tau) from an instance; InputError on invalid data."""
    if inst.seed_span.shape[0] != 2 * inst.dim:
        raise InputError("seed span must have 2*dim rows")
    A = make_relation(inst.seed_span, inst.dim, inst.dim, inst.tol)
    if classify_symmetry(A) == "not_symmetric":
        raise InputError("seed relation is not symmetric")
    seed = SymmetricSeed.from_relation(A)
    if inst.triplet_kind == "von_neumann":
        V = inst.triplet_data.get("V")
        tri = von_neumann_triplet(seed, V=V, tol=inst.tol)
    else:
        tri = BoundaryTriplet.from_ambient_maps(
            seed, inst.triplet_data["gamma0"], inst.triplet_data["gamma1"],
            tol=inst.tol)
    if tri.boundary_dim != inst.tau_dim:
        raise InputError(
            f"tau dimension {inst.tau_dim} != boundary dimension {tri.boundary_dim}")
    tau = RationalNevanlinna.build(
        inst.tau_dim, a=inst.tau_a, b=inst.tau_b, poles=inst.tau_poles,
        mul_span=inst.tau_mul if inst.tau_mul.shape[1] else None, tol=inst.tol)
    problems = validate_tau(tau)
    if problems:
        raise InputError("invalid tau: " + "; ".join(problems))
    return tri, tau


# ---------------------------------------------------------------- generation

def _random_unitary(rng, n: int) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_hermitian(rng, n: int, scale: float = 1.0) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (z + z.conj().T) / 2


def _random_psd_of_rank(rng, n: int, rank: int) -> np.ndarray:
    """PSD matrix with eigenvalues of the chosen rank bounded in [0.5, 2]."""
    u = _random_unitary(rng, n)
    w = np.zeros(n)
    w[:rank] = 0.5 + 1.5 * rng.random(rank)
    return (u * w) @ u.conj().T


def generate_instance(rng, max_dim: int = 6, max_boundary: int = 3,
                      max_poles: int = 3, category: str = "random",
                      tol: float = DEFAULT_TOL) -> Instance:
    """Draw a random instance; `category` forces a region of parameter space:
    'b_full' (ker B trivial), 'b_deficient', 'k_nontrivial', 'transversal'
    (K = {0}, B = 0, poles only), 'selfadjoint_seed' (boundary dim 0)."""
    n = int(rng.integers(1, max_dim + 1))
    if category == "selfadjoint_seed":
        d = 0
    else:
        d = int(rng.integers(1, min(max_boundary, n) + 1))
    rest = n - d
    n_mul = int(rng.integers(0, rest + 1)) if rng.random() < 0.3 else 0
    m = rest - n_mul

    Q = _random_unitary(rng, n)
    dom = Q[:, :m]
    mul = Q[:, m:m + n_mul]
    H = _random_hermitian(rng, n)
    span = np.vstack([
        np.hstack([dom, np.zeros((n, n_mul), dtype=complex)]),
        np.hstack([H @ dom, mul]),
    ])
    V = _random_unitary(rng, d)

    # tau structure
    if category == "k_nontrivial" and d >= 1:
        k = int(rng.integers(1, d + 1))
    elif category in ("transversal", "b_full", "b_deficient"):
        k = 0
    else:
        k = int(rng.integers(0, d + 1)) if rng.random() < 0.25 else 0
    p = d - k
    mul_basis = _random_unitary(rng, d)[:, :k]
    a = _random_hermitian(rng, p)
    if category == "b_full":
        b_rank = p
    elif category == "b_deficient":
        b_rank = int(rng.integers(0, p)) if p else 0
    elif category == "transversal":
        b_rank = 0
    else:
        b_rank = int(rng.integers(0, p + 1))
    b = _random_psd_of_rank(rng, p, b_rank)
    l_max = max_poles if p else 0
    if category == "transversal":
        l = int(rng.integers(1, l_max + 1)) if l_max else 0
    else:
        l = int(rng.integers(0, l_max + 1))
    alphas = np.sort(rng.uniform(-3, 3, size=l))
    poles = []
    for j in range(l):
        if j and alphas[j] - alphas[j - 1] < 0.2:
            alphas[j] = alphas[j - 1] + 0.2 + rng.random()
        rj = int(rng.integers(1, p + 1))
        poles.append((float(alphas[j]), _random_psd_of_rank(rng, p, rj)))
    return Instance(dim=n, seed_span=span, triplet_kind="von_neumann",
                    triplet_data={"V": V}, tau_dim=d, tau_mul=mul_basis,
                    tau_a=a, tau_b=b, tau_poles=tuple(poles), tol=tol)


def admissible_lambdas(rng, tri, tau, count: int, max_tries: int = 200):
    """Rejection-sample nonreal points where every resolvent in the identity
    chain exists."""
    out = []
    tries = 0
    while len(out) < count and tries < max_tries:
        tries += 1
        lam = complex(rng.uniform(-2, 2),
                      rng.choice([-1, 1]) * rng.uniform(0.5, 2.0))
        try:
            krein_resolvent(tri, tau, lam)
            resolvent(compression(tri, tau), lam)
        except (SpectrumError, ValueError):
            continue
        out.append(lam)
    if len(out) < count:
        raise RuntimeError("could not find admissible sample points")
    return out


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    passed: bool
    elapsed: float


def _ok(name, residual, tol, t0) -> CheckResult:
    return CheckResult(name=name, residual=float(residual),
                       passed=bool(residual < tol), elapsed=time.perf_counter() - t0)


def verify_instance(inst: Instance, rng) -> list:
    """Run the full invariant suite on one instance."""
    results = []
    tri, tau = build_problem(inst)

    t0 = time.perf_counter()
    rep = triplet_report(tri)
    results.append(_ok("green_identity", rep["green"], 1e-10, t0))

    t0 = time.perf_counter()
    dec = decompose_tau(tau)
    res = 0.0
    for _ in range(3):
        lam = complex(rng.uniform(-2, 2), rng.uniform(0.5, 2.0))
        if any(abs(lam - alpha) < 1e-6 for alpha, _ in tau.poles):
            continue
        _, r = relations_equal(eval_tau(tau, lam),
                               reassemble_decomposition(tau, dec, lam))
        res = max(res, r)
    results.append(_ok("decomposition_reassembly", res, 1e-7, t0))

    t0 = time.perf_counter()
    try:
        tau_limits(tau)
        results.append(_ok("limits_analytic_vs_grid", 0.0, 1.0, t0))
    except Exception:
        results.append(_ok("limits_analytic_vs_grid", np.inf, 1.0, t0))

    t0 = time.perf_counter()
    model = build_exit_space(tri, tau)
    c_direct, s_direct, _ = direct_compression(model)
    c_formula = compression(tri, tau)
    _, res_c = relations_equal(c_formula, c_direct)
    results.append(_ok("compression_equivalence", res_c, 1e-7, t0))

    t0 = time.perf_counter()
    _, res_s = relations_equal(s_direct, model.reduced.s_rel)
    results.append(_ok("s_direct_matches_theta0", res_s, 1e-7, t0))

    t0 = time.perf_counter()
    _, res_f = relations_equal(compression_via_forbidden(model), c_direct)
    results.append(_ok("forbidden_route", res_f, 1e-7, t0))

    t0 = time.perf_counter()
    res_chain = max(chain_residuals(tri, model).values())
    results.append(_ok("compression_chain", res_chain, 1e-7, t0))

    t0 = time.perf_counter()
    report = classify_compression(tri, tau)   # raises RouteDisagreement on bug
    results.append(_ok("classification_routes", 0.0, 1.0, t0))

    t0 = time.perf_counter()
    _, res_inf = relations_equal(report.tau_inf, negate(report.tau_c))
    results.append(_ok("tau_infinity", res_inf, 1e-10, t0))

    t0 = time.perf_counter()
    lams = admissible_lambdas(rng, tri, tau, 3)
    res_k = 0.0
    for lam in lams:
        res_k = max(res_k, check_resolvent_identity(tri, tau, lam))
        direct = generalized_resolvent_direct(model, lam)
        res_k = max(res_k, float(np.max(
            np.abs(krein_resolvent(tri, tau, lam) - direct), initial=0.0)))
    results.append(_ok("krein_formula", res_k, 1e-8, t0))

    t0 = time.perf_counter()
    if minimality(model, [1j, 2j, -1 + 1j]):
        res_nr = float(abs(model.dim_r - report.n_r))
    else:
        # non-minimal model: the exit dimension comparison does not apply
        res_nr = 0.0
    results.append(_ok("exit_dimension", res_nr, 0.5, t0))
    return results


def run_verify(count: int = 10, max_dim: int = 6, max_boundary: int = 3,
               max_poles: int = 3, rng_seed: int = 0,
               tol: float = DEFAULT_TOL, replay_instance: Instance | None = None) -> dict:
    """Generate (or replay) instances, verify, and assemble a v1 report."""
    if min(count, max_dim, max_boundary) < 1 or max_poles < 0:
        raise InputError("bounds must be positive")
    rng = np.random.default_rng(rng_seed)
    t_start = time.perf_counter()
    instances = []
    failures = []
    total_checks = passed_checks = 0
    for i in range(count if replay_instance is None else 1):
        if replay_instance is not None:
            inst = replay_instance
        else:
            inst = generate_instance(rng, max_dim, max_boundary, max_poles,
                                     tol=tol)
        try:
            checks = verify_instance(inst, rng)
        except InputError:
            raise
        except Exception as exc:
            checks = [CheckResult(name=f"exception:{type(exc).__name__}",
                                  residual=float("inf"), passed=False,
                                  elapsed=0.0)]
        inst_pass = all(c.passed for c in checks)
        total_checks += len(checks)
        passed_checks += sum(c.passed for c in checks)
        entry = {
            "index": i,
            "passed": inst_pass,
            "checks": [{"name": c.name,
                        "residual": (c.residual if np.isfinite(c.residual) else None),
                        "passed": c.passed} for c in checks],
        }
        instances.append(entry)
        if not inst_pass:
            failures.append({"index": i, "instance": inst.to_json(),
                             "failed": [c.name for c in checks if not c.passed]})
    report = {
        "schema": REPORT_SCHEMA,
        "params": {"count": count, "max_dim": max_dim,
                   "max_boundary": max_boundary, "max_poles": max_poles,
                   "rng_seed": rng_seed, "tol": tol,
                   "rng": "numpy default_rng (PCG64)"},
        "instances": instances,
        "counts": {"total_checks": total_checks, "passed_checks": passed_checks,
                   "failed_instances": len(failures)},
        "failures": failures,
        "all_passed": not failures,
    }
    timing = {"elapsed_s": time.perf_counter() - t_start}
    return {"body": report, "timing": timing}


def report_text(wrapped: dict) -> str:
    body = wrapped["body"]
    lines = [f"relcomp verification report ({body['schema']})"]
    p = body["params"]
    lines.append(f"  instances={p['count']} max_dim={p['max_dim']} "
                 f"max_boundary={p['max_boundary']} max_poles={p['max_poles']} "
                 f"seed={p['rng_seed']}")
    c = body["counts"]
    lines.append(f"  checks passed: {c['passed_checks']}/{c['total_checks']}; "
                 f"failing instances: {c['failed_instances']}")
    for fail in body["failures"]:
        lines.append(f"  FAIL instance {fail['index']}: {', '.join(fail['failed'])}")
    lines.append(f"  elapsed: {wrapped['timing']['elapsed_s']:.2f}s")
    lines.append("PASS" if body["all_passed"] else "FAIL")
    return "\n".join(lines)


# ---------------------------------------------------------------- demos

def _scalar_instance(tau_a, tau_b, poles) -> Instance:
    span = np.zeros((2, 0), dtype=complex)
    return Instance(dim=1, seed_span=span, triplet_kind="explicit",
                    triplet_data={"gamma0": np.array([[1.0, 0.0]], dtype=complex),
                                  "gamma1": np.array([[0.0, 1.0]], dtype=complex)},
                    tau_dim=1, tau_mul=np.zeros((1, 0), dtype=complex),
                    tau_a=np.array([[tau_a]], dtype=complex),
                    tau_b=np.array([[tau_b]], dtype=complex),
                    tau_poles=tuple(poles))


DEMOS = {
    "swap": _scalar_instance(0.0, 0.0, [(0.0, np.array([[1.0]], dtype=complex))]),
    "canonical": _scalar_instance(0.5, 0.0, []),
    "a0": _scalar_instance(0.0, 1.0, []),
}


def run_demo(name: str) -> str:
    """Walk one closed-form example and print every intermediate object."""
    if name not in DEMOS:
        raise InputError(f"unknown demo {name!r}; choose from {sorted(DEMOS)}")
    inst = DEMOS[name]
    tri, tau = build_problem(inst)
    model = build_exit_space(tri, tau)
    rep = classify_compression(tri, tau)
    lam = 2j
    r_gen = generalized_resolvent_direct(model, lam)
    r_krein = krein_resolvent(tri, tau, lam)

    def mat(m):
        return np.array_str(np.round(np.asarray(m), 6))

    lines = [f"demo: {name}",
             "seed A = {{0,0}} in C, boundary maps (f, f')",
             f"tau coefficients: A={mat(tau.a_coef)} B={mat(tau.b_coef)} "
             f"poles={[(a, aj.tolist()) for a, aj in tau.poles]}",
             f"exit space dim: {model.dim_r}",
             f"A~ frame (coords f, f_r, f', f_r'):\n{mat(model.a_tilde.frame)}",
             f"tau_c frame:\n{mat(rep.tau_c.frame)}",
             f"compression C frame:\n{mat(rep.compression.frame)}",
             f"flags: {rep.flags}",
             f"generalized resolvent at {lam}: {mat(r_gen)}",
             f"Krein formula at {lam}:      {mat(r_krein)}",
             f"residual: {np.max(np.abs(r_gen - r_krein), initial=0.0):.2e}"]
    return "\n".join(lines)


# ---------------------------------------------------------------- entry point

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="relcomp",
        description="Verify compression/extension identities on random or "
                    "replayed finite-dimensional instances.")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run the invariant suite")
    pv.add_argument("--count", type=int, default=10)
    pv.add_argument("--max-dim", type=int, default=6)
    pv.add_argument("--max-boundary", type=int, default=3)
    pv.add_argument("--max-poles", type=int, default=3)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--tol", type=float, default=DEFAULT_TOL)
    pv.add_argument("--format", choices=("text", "json"), default="text")
    pv.add_argument("--out", type=str, default=None)
    pv.add_argument("--replay", type=str, default=None,
                    help="verify a single instance from a JSON file")

    pd = sub.add_parser("demo", help="walk a closed-form example")
    pd.add_argument("name", type=str)

    args = parser.parse_args(argv)
    try:
        if args.command == "demo":
            print(run_demo(args.name))
            return 0
        replay = None
        if args.replay:
            try:
                with open(args.replay) as fh:
                    replay = Instance.from_json(json.load(fh))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read instance file: {exc}") from exc
        wrapped = run_verify(count=args.count, max_dim=args.max_dim,
                             max_boundary=args.max_boundary,
                             max_poles=args.max_poles, rng_seed=args.seed,
                             tol=args.tol, replay_instance=replay)
        if args.format == "json":
            text = json.dumps(wrapped, indent=2, sort_keys=True)
        else:
            text = report_text(wrapped)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
        return 0 if wrapped["body"]["all_passed"] else 1
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
