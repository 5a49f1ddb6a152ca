"""Numerical linear relations: subspaces of a direct sum of complex spaces.

A linear relation from C^n0 to C^n1 is stored as an orthonormal column
frame of shape (n0 + n1) x r; the first n0 coordinates of a column are
the "left" vector f, the remaining n1 the "right" vector f', encoding the
pair {f, f'}.  All equalities are projector comparisons at a single
tolerance, so frames are gauge-free.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9


class SpectrumError(Exception):
    """(T - lam)^{-1} is not an everywhere-defined single-valued operator."""


def _as_complex(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError("non-finite entries in matrix")
    return a


def orth(span, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column span; singular values below
    tol * max(s_max, 1) are dropped."""
    span = _as_complex(span)
    if span.shape[0] == 0 or span.shape[1] == 0:
        return np.zeros((span.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(span, full_matrices=False)
    cut = tol * max(float(s[0]) if s.size else 0.0, 1.0)
    r = int(np.count_nonzero(s > cut))
    return u[:, :r]


def complement(frame, dim: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of an orthonormal frame
    inside C^dim."""
    frame = _as_complex(frame)
    if frame.shape[1] == 0:
        return np.eye(dim, dtype=complex)
    u, _, _ = np.linalg.svd(frame, full_matrices=True)
    return u[:, frame.shape[1]:]


def null_space(mat, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of ker(mat)."""
    mat = _as_complex(mat)
    cols = mat.shape[1]
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if mat.shape[0] == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    cut = tol * max(float(s[0]) if s.size else 0.0, 1.0)
    r = int(np.count_nonzero(s > cut))
    return vh[r:].conj().T


def containment_residual(sub: np.ndarray, sup: np.ndarray) -> float:
    """Spectral norm of (I - P_sup) restricted to the columns of sub."""
    if sub.shape[1] == 0:
        return 0.0
    if sup.shape[1] == 0:
        return float(np.linalg.norm(sub, 2))
    resid = sub - sup @ (sup.conj().T @ sub)
    return float(np.linalg.norm(resid, 2))


@dataclass(frozen=True)
class LinearRelation:
    """A subspace of C^{dim_from} (+) C^{dim_to} with an orthonormal frame."""

    dim_from: int
    dim_to: int
    frame: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if self.frame.shape[0] != self.dim_from + self.dim_to:
            raise ValueError("frame row count does not match ambient dimension")
        self.frame.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def left(self) -> np.ndarray:
        return self.frame[: self.dim_from]

    @property
    def right(self) -> np.ndarray:
        return self.frame[self.dim_from:]


@dataclass(frozen=True)
class PartsReport:
    dom: np.ndarray
    ran: np.ndarray
    ker: np.ndarray
    mul: np.ndarray


@dataclass(frozen=True)
class OperatorPartSplit:
    """Split of a symmetric relation theta = B (+) mul theta.

    op_matrix maps dom-coordinates (columns of op_domain_frame) to ambient
    vectors orthogonal to mul theta.
    """

    mul_frame: np.ndarray
    op_domain_frame: np.ndarray
    op_matrix: np.ndarray


def make_relation(raw_span, dim_from: int, dim_to: int,
                  tol: float = DEFAULT_TOL) -> LinearRelation:
    """Orthonormalize a raw span matrix into a LinearRelation."""
    raw_span = _as_complex(raw_span)
    if raw_span.ndim != 2 or raw_span.shape[0] != dim_from + dim_to:
        raise ValueError("span must be (dim_from + dim_to) x s")
    return LinearRelation(dim_from, dim_to, orth(raw_span, tol), tol)


def zero_relation(n: int, tol: float = DEFAULT_TOL) -> LinearRelation:
    """The relation {{0, 0}} in C^n."""
    return LinearRelation(n, n, np.zeros((2 * n, 0), dtype=complex), tol)


def full_relation(n: int, tol: float = DEFAULT_TOL) -> LinearRelation:
    """All of C^n (+) C^n."""
    return LinearRelation(n, n, np.eye(2 * n, dtype=complex), tol)


def vertical_relation(n: int, tol: float = DEFAULT_TOL) -> LinearRelation:
    """{0} (+) C^n, the purely multivalued self-adjoint relation."""
    frame = np.zeros((2 * n, n), dtype=complex)
    frame[n:, :] = np.eye(n)
    return LinearRelation(n, n, frame, tol)


def graph_of(matrix, tol: float = DEFAULT_TOL) -> LinearRelation:
    """Graph of an everywhere-defined operator C^{cols} -> C^{rows}."""
    matrix = _as_complex(matrix)
    n_to, n_from = matrix.shape
    span = np.vstack([np.eye(n_from, dtype=complex), matrix])
    return make_relation(span, n_from, n_to, tol)


def parts(T: LinearRelation) -> PartsReport:
    """Domain, range, kernel and multivalued part of a relation."""
    dom = orth(T.left, T.tol)
    ran = orth(T.right, T.tol)
    ker_coeff = null_space(T.right, T.tol)
    ker = orth(T.left @ ker_coeff, T.tol)
    mul_coeff = null_space(T.left, T.tol)
    mul = orth(T.right @ mul_coeff, T.tol)
    return PartsReport(dom=dom, ran=ran, ker=ker, mul=mul)


def adjoint(T: LinearRelation) -> LinearRelation:
    """Adjoint relation T* = (J T)^perp with J{f, f'} = {f', -f}."""
    flipped = np.vstack([T.right, -T.left])
    comp = complement(orth(flipped, T.tol), T.dim_from + T.dim_to)
    return LinearRelation(T.dim_to, T.dim_from, comp, T.tol)


def inverse(T: LinearRelation) -> LinearRelation:
    """Inverse relation: swap the pair components."""
    return LinearRelation(T.dim_to, T.dim_from,
                          np.vstack([T.right, T.left]), T.tol)


def negate(T: LinearRelation) -> LinearRelation:
    """The relation {{f, -f'}: {f, f'} in T}."""
    return LinearRelation(T.dim_from, T.dim_to,
                          np.vstack([T.left, -T.right]), T.tol)


def _check_ambient(T1: LinearRelation, T2: LinearRelation) -> None:
    if (T1.dim_from, T1.dim_to) != (T2.dim_from, T2.dim_to):
        raise ValueError("ambient dimension mismatch")


def comp_sum(T1: LinearRelation, T2: LinearRelation) -> LinearRelation:
    """Componentwise sum: span of the union of the two subspaces."""
    _check_ambient(T1, T2)
    tol = max(T1.tol, T2.tol)
    return make_relation(np.hstack([T1.frame, T2.frame]),
                         T1.dim_from, T1.dim_to, tol)


def intersect(T1: LinearRelation, T2: LinearRelation) -> LinearRelation:
    """Intersection via orthogonal complements."""
    _check_ambient(T1, T2)
    tol = max(T1.tol, T2.tol)
    dim = T1.dim_from + T1.dim_to
    c1 = complement(T1.frame, dim)
    c2 = complement(T2.frame, dim)
    comp = complement(orth(np.hstack([c1, c2]), tol), dim)
    return LinearRelation(T1.dim_from, T1.dim_to, comp, tol)


def relations_equal(T1: LinearRelation, T2: LinearRelation):
    """Projector-norm equality; returns (equal, residual)."""
    _check_ambient(T1, T2)
    tol = max(T1.tol, T2.tol)
    dim = T1.dim_from + T1.dim_to
    if dim == 0:
        return True, 0.0
    p1 = T1.frame @ T1.frame.conj().T
    p2 = T2.frame @ T2.frame.conj().T
    resid = float(np.linalg.norm(p1 - p2, 2))
    return resid < tol, resid


def contains(big: LinearRelation, small: LinearRelation) -> bool:
    """small subseteq big within tolerance."""
    _check_ambient(big, small)
    tol = max(big.tol, small.tol)
    return containment_residual(small.frame, big.frame) < tol


def classify_symmetry(T: LinearRelation) -> str:
    """One of 'not_symmetric', 'symmetric', 'self_adjoint'."""
    if T.dim_from != T.dim_to:
        raise ValueError("symmetry is defined for relations in a single space")
    T_star = adjoint(T)
    if not contains(T_star, T):
        return "not_symmetric"
    equal, _ = relations_equal(T, T_star)
    return "self_adjoint" if equal else "symmetric"


def operator_part(theta: LinearRelation) -> OperatorPartSplit:
    """Split a symmetric relation into its operator part and multivalued part.

    Raises ValueError if dom theta is not orthogonal to mul theta (which a
    symmetric relation guarantees).
    """
    if theta.dim_from != theta.dim_to:
        raise ValueError("operator part is defined for relations in a single space")
    p = parts(theta)
    if p.dom.shape[1] and p.mul.shape[1]:
        overlap = float(np.linalg.norm(p.mul.conj().T @ p.dom, 2))
        if overlap > 100 * theta.tol:
            raise ValueError(
                f"dom theta not orthogonal to mul theta (overlap {overlap:.2e})")
    n = theta.dim_from
    mul_proj = p.mul @ p.mul.conj().T if p.mul.shape[1] else np.zeros((n, n))
    cols = []
    for i in range(p.dom.shape[1]):
        h = p.dom[:, i]
        c, *_ = np.linalg.lstsq(theta.left, h, rcond=None)
        if np.linalg.norm(theta.left @ c - h) > 100 * theta.tol:
            raise ValueError("domain frame not reachable inside the relation")
        f_prime = theta.right @ c
        cols.append(f_prime - mul_proj @ f_prime)
    op = np.column_stack(cols) if cols else np.zeros((n, 0), dtype=complex)
    return OperatorPartSplit(mul_frame=p.mul, op_domain_frame=p.dom, op_matrix=op)


def reassemble_operator_part(split: OperatorPartSplit, n: int,
                             tol: float = DEFAULT_TOL) -> LinearRelation:
    """Rebuild {{h, Bh + k}: h in dom, k in mul} from a split."""
    d0 = split.op_domain_frame.shape[1]
    k = split.mul_frame.shape[1]
    cols = np.zeros((2 * n, d0 + k), dtype=complex)
    cols[:n, :d0] = split.op_domain_frame
    cols[n:, :d0] = split.op_matrix
    cols[n:, d0:] = split.mul_frame
    return make_relation(cols, n, n, tol)


def as_operator(T: LinearRelation) -> np.ndarray:
    """Matrix of T if it is an everywhere-defined single-valued operator.

    Raises SpectrumError otherwise.
    """
    n_from = T.dim_from
    if T.dim != n_from:
        raise SpectrumError("relation is not the graph of an everywhere-defined operator")
    if n_from == 0:
        return np.zeros((T.dim_to, 0), dtype=complex)
    L = T.left
    s = np.linalg.svd(L, compute_uv=False)
    if s.size < n_from or s[-1] <= T.tol:
        raise SpectrumError("left projection of the relation is singular")
    return T.right @ np.linalg.inv(L)


def resolvent(T: LinearRelation, lam: complex) -> np.ndarray:
    """Matrix of (T - lam)^{-1} = {{f' - lam f, f}} when it is an
    everywhere-defined operator; SpectrumError otherwise."""
    if T.dim_from != T.dim_to:
        raise ValueError("resolvent is defined for relations in a single space")
    span = np.vstack([T.right - lam * T.left, T.left])
    inv_rel = make_relation(span, T.dim_from, T.dim_to, T.tol)
    return as_operator(inv_rel)
