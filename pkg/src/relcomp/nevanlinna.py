"""Rational relation-valued Nevanlinna parameters and their asymptotics.

A parameter tau consists of a multivalued part K inside C^d and, on fixed
coordinates for H0 = K-perp, a Hermitian constant, a positive semidefinite
linear coefficient and finitely many positive semidefinite pole residues at
distinct real points:

    tau0(lam) = A + lam * B + sum_j A_j / (alpha_j - lam).

Limits at infinity are computed in closed form; a numeric grid estimate is
kept as a cross-check only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linrel import (
    DEFAULT_TOL,
    LinearRelation,
    complement,
    make_relation,
    null_space,
    orth,
)

DEFAULT_Y_GRID = (1e2, 1e3, 1e4, 1e5, 1e6)


@dataclass(frozen=True)
class RationalNevanlinna:
    """Rational Nevanlinna parameter with multivalued part."""

    dim: int
    mul_frame: np.ndarray
    h0_frame: np.ndarray
    a_coef: np.ndarray
    b_coef: np.ndarray
    poles: tuple = ()
    tol: float = DEFAULT_TOL

    @classmethod
    def build(cls, dim: int, a=None, b=None, poles=(), mul_span=None,
              tol: float = DEFAULT_TOL) -> "RationalNevanlinna":
        """Construct from raw data; coefficients act on H0-coordinates fixed
        by the complement of the orthonormalized multivalued span."""
        if mul_span is None:
            mul = np.zeros((dim, 0), dtype=complex)
        else:
            mul = orth(np.asarray(mul_span, dtype=complex).reshape(dim, -1), tol)
        h0 = complement(mul, dim)
        p = h0.shape[1]
        a = np.zeros((p, p), dtype=complex) if a is None else np.asarray(a, dtype=complex)
        b = np.zeros((p, p), dtype=complex) if b is None else np.asarray(b, dtype=complex)
        poles = tuple((float(alpha), np.asarray(aj, dtype=complex))
                      for alpha, aj in poles)
        return cls(dim=dim, mul_frame=mul, h0_frame=h0, a_coef=a, b_coef=b,
                   poles=poles, tol=tol)

    @property
    def op_dim(self) -> int:
        """Dimension of H0 = K-perp."""
        return self.h0_frame.shape[1]

    def tau0(self, lam: complex) -> np.ndarray:
        """Operator part evaluated at lam, on H0-coordinates."""
        out = self.a_coef + lam * self.b_coef
        for alpha, aj in self.poles:
            out = out + aj / (alpha - lam)
        return out

    def embed(self, vectors: np.ndarray) -> np.ndarray:
        """Map H0-coordinate columns into C^d."""
        return self.h0_frame @ vectors


def eval_tau(tau: RationalNevanlinna, lam: complex) -> LinearRelation:
    """The relation {{h, tau0(lam) h + k}: h in H0, k in K} inside C^d."""
    if lam.imag == 0:
        raise ValueError("tau is evaluated off the real axis")
    if any(abs(lam - alpha) < 1e-12 for alpha, _ in tau.poles):
        raise ValueError(f"evaluation at a pole of tau: {lam}")
    d = tau.dim
    k = tau.mul_frame.shape[1]
    op_cols = np.vstack([tau.h0_frame, tau.h0_frame @ tau.tau0(lam)])
    mul_cols = np.vstack([np.zeros((d, k), dtype=complex), tau.mul_frame])
    return make_relation(np.hstack([op_cols, mul_cols]), d, d, tau.tol)


def validate_tau(tau: RationalNevanlinna) -> list:
    """List of violated structural conditions (empty means valid)."""
    issues = []
    p = tau.op_dim
    scale = 100 * tau.tol
    if tau.mul_frame.shape[1]:
        gram = tau.mul_frame.conj().T @ tau.mul_frame
        if np.max(np.abs(gram - np.eye(gram.shape[0]))) > scale:
            issues.append("mul frame not orthonormal")
    if tau.a_coef.shape != (p, p) or tau.b_coef.shape != (p, p):
        issues.append("coefficient shape mismatch")
        return issues
    if p:
        if np.max(np.abs(tau.a_coef - tau.a_coef.conj().T)) > scale:
            issues.append("A not Hermitian")
        if np.max(np.abs(tau.b_coef - tau.b_coef.conj().T)) > scale or \
                np.min(np.linalg.eigvalsh((tau.b_coef + tau.b_coef.conj().T) / 2)) < -scale:
            issues.append("B not PSD")
    alphas = [alpha for alpha, _ in tau.poles]
    if len(set(alphas)) != len(alphas) or any(abs(a - b) < 1e-9 for i, a in enumerate(alphas) for b in alphas[:i]):
        issues.append("pole locations not distinct")
    for j, (alpha, aj) in enumerate(tau.poles):
        if aj.shape != (p, p):
            issues.append(f"pole {j}: residue shape mismatch")
            continue
        herm = (aj + aj.conj().T) / 2
        if np.max(np.abs(aj - aj.conj().T)) > scale or \
                (p and np.min(np.linalg.eigvalsh(herm)) < -scale):
            issues.append(f"pole {j}: residue not PSD")
        if np.max(np.abs(aj)) <= scale if aj.size else True:
            issues.append(f"pole {j}: pole term vanishes")
    return issues


@dataclass(frozen=True)
class TauDecomposition:
    """Uniformly strict core of tau0 plus the constant block on its kernel.

    h_prime / h_dprime are orthonormal frames inside H0-coordinates; tau1
    lives on h_prime-coordinates.  The constant block of tau0 on
    H' (+) H'' is (tau1, -B1; -B1*, -B2).
    """

    h_prime: np.ndarray
    h_dprime: np.ndarray
    mul_frame: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    tau1: RationalNevanlinna


def decompose_tau(tau: RationalNevanlinna) -> TauDecomposition:
    """Split H0 into ker(Im tau0) and its complement, and compress tau0 to a
    uniformly strict function on the complement."""
    p = tau.op_dim
    stacked = np.vstack([tau.b_coef] + [aj for _, aj in tau.poles]) \
        if p else np.zeros((0, 0), dtype=complex)
    hd = null_space(stacked, tau.tol) if p else np.zeros((0, 0), dtype=complex)
    hp = complement(hd, p)
    b1 = -(hp.conj().T @ tau.a_coef @ hd)
    b2 = -(hd.conj().T @ tau.a_coef @ hd)
    tau1 = RationalNevanlinna(
        dim=hp.shape[1],
        mul_frame=np.zeros((hp.shape[1], 0), dtype=complex),
        h0_frame=np.eye(hp.shape[1], dtype=complex),
        a_coef=hp.conj().T @ tau.a_coef @ hp,
        b_coef=hp.conj().T @ tau.b_coef @ hp,
        poles=tuple((alpha, hp.conj().T @ aj @ hp) for alpha, aj in tau.poles),
        tol=tau.tol)
    return TauDecomposition(h_prime=hp, h_dprime=hd, mul_frame=tau.mul_frame,
                            b1=b1, b2=b2, tau1=tau1)


def reassemble_decomposition(tau: RationalNevanlinna, dec: TauDecomposition,
                             lam: complex) -> LinearRelation:
    """Rebuild tau(lam) from the block decomposition; pins the sign
    convention of the constant block."""
    d = tau.dim
    hp_amb = tau.embed(dec.h_prime)
    hd_amb = tau.embed(dec.h_dprime)
    t1 = dec.tau1.tau0(lam)
    q = dec.h_prime.shape[1]
    r = dec.h_dprime.shape[1]
    cols_p = np.vstack([hp_amb, hp_amb @ t1 - hd_amb @ dec.b1.conj().T])
    cols_d = np.vstack([hd_amb, -hp_amb @ dec.b1 - hd_amb @ dec.b2])
    k = tau.mul_frame.shape[1]
    cols_k = np.vstack([np.zeros((d, k), dtype=complex), tau.mul_frame])
    return make_relation(np.hstack([cols_p, cols_d, cols_k]), d, d, tau.tol)


@dataclass(frozen=True)
class TauLimits:
    """Closed-form limits at i*infinity of a rational parameter."""

    b_tau: np.ndarray
    n_dom_frame: np.ndarray
    n_matrix: np.ndarray


class LimitMismatch(RuntimeError):
    """Closed-form and grid limits disagree beyond tolerance."""


def _richardson(pairs):
    (y1, v1), (y2, v2) = pairs[-2:]
    return (y2 * v2 - y1 * v1) / (y2 - y1)


def tau_limits(tau: RationalNevanlinna, y_grid=DEFAULT_Y_GRID,
               cross_check_tol: float = 1e-6) -> TauLimits:
    """Linear-growth coefficient and strong limit of tau0 at i*infinity.

    Analytically the coefficient is B, the limit domain is ker B and the
    limit acts as A there; the grid estimate must agree within
    cross_check_tol or LimitMismatch is raised.
    """
    p = tau.op_dim
    ker_b = null_space(tau.b_coef, tau.tol) if p else np.zeros((0, 0), dtype=complex)
    limits = TauLimits(b_tau=tau.b_coef.copy(),
                       n_dom_frame=ker_b,
                       n_matrix=tau.a_coef @ ker_b)
    if p:
        b_num = _richardson([(y, tau.tau0(1j * y) / (1j * y)) for y in y_grid])
        if np.max(np.abs(b_num - tau.b_coef)) > cross_check_tol:
            raise LimitMismatch("grid estimate of the growth coefficient disagrees")
        for i in range(ker_b.shape[1]):
            h = ker_b[:, i]
            n_num = _richardson([(y, tau.tau0(1j * y) @ h) for y in y_grid])
            if np.max(np.abs(n_num - limits.n_matrix[:, i])) > cross_check_tol:
                raise LimitMismatch("grid estimate of the strong limit disagrees")
    return limits


@dataclass(frozen=True)
class BlackBoxNevanlinna:
    """Opaque matrix-valued Nevanlinna function, spot-checked on construction."""

    evaluator: object
    dim: int
    tol: float = 1e-8

    def __post_init__(self):
        for lam in (1j, 2j, 1.0 + 1j):
            m = self(lam)
            mc = self(np.conj(lam))
            if np.max(np.abs(mc - m.conj().T)) > self.tol * max(1.0, np.max(np.abs(m))):
                raise ValueError("conjugate symmetry fails at spot check")
            im = (m - m.conj().T) / 2j
            if self.dim and np.min(np.linalg.eigvalsh((im + im.conj().T) / 2)) < -1e-8 * max(1.0, np.max(np.abs(m))):
                raise ValueError("imaginary part not PSD in the upper half-plane")

    def __call__(self, lam: complex) -> np.ndarray:
        out = np.asarray(self.evaluator(lam), dtype=complex)
        return out.reshape(self.dim, self.dim)

    @classmethod
    def from_rational(cls, tau: RationalNevanlinna) -> "BlackBoxNevanlinna":
        return cls(evaluator=tau.tau0, dim=tau.op_dim)


@dataclass(frozen=True)
class NumericLimitReport:
    b_estimate: np.ndarray
    b_consistent: bool
    verdicts: tuple


def numeric_limits(f: BlackBoxNevanlinna, y_grid=DEFAULT_Y_GRID) -> NumericLimitReport:
    """Grid estimates of the growth coefficient and, per standard basis
    direction, a finite/divergent/undetermined verdict for y*Im(f(iy)h, h)."""
    samples = [(y, f(1j * y)) for y in y_grid]
    scaled = [(y, m / (1j * y)) for y, m in samples]
    b_est = _richardson(scaled)
    b_consistent = bool(np.max(np.abs(scaled[-1][1] - scaled[-2][1]), initial=0.0) < 1e-3)
    verdicts = []
    for k in range(f.dim):
        vals = [float(y * np.imag(m[k, k])) for y, m in samples]
        tail, prev = vals[-1], vals[-2]
        if abs(tail - prev) <= max(1e-2 * abs(tail), 1e-6):
            verdicts.append("finite")
        elif abs(prev) > 0 and abs(tail) / abs(prev) > 3.0:
            verdicts.append("divergent")
        else:
            verdicts.append("undetermined")
    return NumericLimitReport(b_estimate=b_est, b_consistent=b_consistent,
                              verdicts=tuple(verdicts))
