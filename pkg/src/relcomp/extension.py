"""Krein-type resolvent formula and compressions of exit-space extensions.

Given a boundary triplet for A* and a rational Nevanlinna parameter tau,
the generalized resolvents

    R(lam) = (A0 - lam)^{-1} - gamma(lam) (tau(lam) + M(lam))^{-1} gamma(conj lam)*

are compressions of canonical resolvents of a self-adjoint exit-space
extension A~.  The compression C(A~) of A~ itself to the base space is
again parametrized by a boundary relation tau_c built from the limit
structure of tau at i*infinity; this module computes both sides and
classifies C(A~) against A, A0 and A*.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linrel import (
    LinearRelation,
    as_operator,
    classify_symmetry,
    comp_sum,
    contains,
    inverse,
    make_relation,
    negate,
    null_space,
    orth,
    relations_equal,
    resolvent,
)
from .nevanlinna import RationalNevanlinna, eval_tau
from .triplet import BoundaryTriplet, a0_extension, extension_of, gamma_and_weyl


class RouteDisagreement(RuntimeError):
    """The geometric and the coefficient-based classification disagree."""


def middle_inverse(tri: BoundaryTriplet, tau: RationalNevanlinna,
                   lam: complex) -> np.ndarray:
    """Matrix of (tau(lam) + M(lam))^{-1} on the boundary space.

    The sum is formed as a relation {{h, tau(lam)h + M(lam)h}} and inverted
    by swapping components; SpectrumError if it is not boundedly invertible.
    """
    T = eval_tau(tau, lam)
    M = gamma_and_weyl(tri, lam).weyl
    span = np.vstack([T.left, T.right + M @ T.left])
    summed = make_relation(span, tau.dim, tau.dim, tri.tol)
    return as_operator(inverse(summed))


def krein_resolvent(tri: BoundaryTriplet, tau: RationalNevanlinna,
                    lam: complex) -> np.ndarray:
    """Generalized resolvent of the seed relation at lam for parameter tau."""
    ws = gamma_and_weyl(tri, lam)
    ws_bar = gamma_and_weyl(tri, np.conj(lam))
    r0 = resolvent(a0_extension(tri), lam)
    mid = middle_inverse(tri, tau, lam)
    return r0 - ws.gamma_field @ mid @ ws_bar.gamma_field.conj().T


def check_resolvent_identity(tri: BoundaryTriplet, tau: RationalNevanlinna,
                             lam: complex) -> float:
    """Residual between the resolvent formula and the canonical resolvent of
    the extension with boundary parameter -tau(lam)."""
    lhs = krein_resolvent(tri, tau, lam)
    ext = extension_of(tri, negate(eval_tau(tau, lam)))
    rhs = resolvent(ext, lam)
    return float(np.max(np.abs(lhs - rhs), initial=0.0))


def compression_param(tau: RationalNevanlinna) -> LinearRelation:
    """Boundary relation tau_c of the compression C(A~):

    {{h, -A'h (+) h' (+) k}: h in ker B, h' in ran B, k in K},
    where A' compresses the constant coefficient to ker B.
    """
    d = tau.dim
    ker_b = null_space(tau.b_coef, tau.tol)
    ran_b = orth(tau.b_coef, tau.tol)
    a_prime = ker_b @ (ker_b.conj().T @ tau.a_coef @ ker_b)
    cols_dom = np.vstack([tau.embed(ker_b), -tau.embed(a_prime)])
    cols_ran = np.vstack([np.zeros((d, ran_b.shape[1]), dtype=complex),
                          tau.embed(ran_b)])
    k = tau.mul_frame.shape[1]
    cols_mul = np.vstack([np.zeros((d, k), dtype=complex), tau.mul_frame])
    return make_relation(np.hstack([cols_dom, cols_ran, cols_mul]), d, d, tau.tol)


def tau_infinity(tau: RationalNevanlinna) -> LinearRelation:
    """Strong resolvent limit of tau at i*infinity; equals -tau_c."""
    return negate(compression_param(tau))


def compression(tri: BoundaryTriplet, tau: RationalNevanlinna) -> LinearRelation:
    """C(A~) = A_{tau_c}, the compression of the exit-space extension."""
    return extension_of(tri, compression_param(tau))


@dataclass(frozen=True)
class CompressionReport:
    """Classification of the compression C = C(A~) of the exit-space
    extension attached to a rational parameter tau."""

    tau_c: LinearRelation
    compression: LinearRelation
    tau_inf: LinearRelation
    flags: dict
    n_tau: np.ndarray | None
    n_r: int


def _flags_geometric(tri: BoundaryTriplet, C: LinearRelation) -> dict:
    A0 = a0_extension(tri)
    eq_a0, _ = relations_equal(C, A0)
    eq_a, _ = relations_equal(C, tri.seed.A)
    span_sum = comp_sum(C, A0)
    transversal, _ = relations_equal(span_sum, tri.seed.A_star)
    return {
        "subset_A0": contains(A0, C),
        "equals_A0": eq_a0,
        "equals_A": eq_a,
        "self_adjoint": classify_symmetry(C) == "self_adjoint",
        "transversal_with_A0": transversal,
    }


def _flags_coefficients(tau: RationalNevanlinna) -> dict:
    p = tau.op_dim
    ker_b_dim = null_space(tau.b_coef, tau.tol).shape[1]
    k = tau.mul_frame.shape[1]
    ker_b_trivial = ker_b_dim == 0
    return {
        "subset_A0": ker_b_trivial,
        "equals_A0": ker_b_trivial,
        "equals_A": tau.dim == 0,
        "self_adjoint": True,
        "transversal_with_A0": k == 0 and (p == 0 or np.max(np.abs(tau.b_coef)) <= 100 * tau.tol),
    }


def rank_sum(tau: RationalNevanlinna) -> int:
    """Exit-space dimension rank B + sum_j rank A_j of a rational parameter."""
    def rk(m):
        if m.size == 0:
            return 0
        s = np.linalg.svd(m, compute_uv=False)
        return int(np.count_nonzero(s > tau.tol * max(float(s[0]), 1.0)))
    return rk(tau.b_coef) + sum(rk(aj) for _, aj in tau.poles)


def classify_compression(tri: BoundaryTriplet,
                         tau: RationalNevanlinna) -> CompressionReport:
    """Compute C(A~) and its flags two ways: from relation algebra on C and
    from the coefficient structure of tau.  Raises RouteDisagreement if the
    two routes differ."""
    if tau.dim != tri.boundary_dim:
        raise ValueError("parameter dimension does not match the boundary space")
    tau_c = compression_param(tau)
    C = extension_of(tri, tau_c)
    geo = _flags_geometric(tri, C)
    coef = _flags_coefficients(tau)
    if geo != coef:
        diffs = {k: (geo[k], coef[k]) for k in geo if geo[k] != coef[k]}
        raise RouteDisagreement(f"flag mismatch (geometric, coefficient): {diffs}")
    n_tau = None
    if coef["transversal_with_A0"]:
        # C = A_{-N}, where N is the strong limit of tau0 at i*infinity.
        n_tau = tau.embed(np.eye(tau.op_dim, dtype=complex)) @ tau.a_coef \
            @ tau.embed(np.eye(tau.op_dim, dtype=complex)).conj().T
    return CompressionReport(tau_c=tau_c, compression=C,
                             tau_inf=tau_infinity(tau), flags=geo,
                             n_tau=n_tau, n_r=rank_sum(tau))
