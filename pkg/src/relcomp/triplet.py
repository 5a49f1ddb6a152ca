"""Boundary triplets for the adjoint of a symmetric relation.

The boundary maps are stored as d x m matrices acting on coordinates with
respect to a fixed orthonormal basis of A*, so kernels and images of the
maps are exact subspace computations.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linrel import (
    DEFAULT_TOL,
    LinearRelation,
    adjoint,
    classify_symmetry,
    containment_residual,
    contains,
    graph_of,
    make_relation,
    null_space,
    orth,
    parts,
    relations_equal,
    resolvent,
    vertical_relation,
)

DEFAULT_Y_GRID = (1e2, 1e3, 1e4, 1e5, 1e6)


class TripletError(Exception):
    """A boundary-triplet invariant failed."""


@dataclass(frozen=True)
class SymmetricSeed:
    """A closed symmetric relation A in C^n together with its adjoint."""

    A: LinearRelation
    A_star: LinearRelation

    @classmethod
    def from_relation(cls, A: LinearRelation) -> "SymmetricSeed":
        kind = classify_symmetry(A)
        if kind == "not_symmetric":
            raise ValueError("seed relation is not symmetric")
        return cls(A=A, A_star=adjoint(A))

    @property
    def space_dim(self) -> int:
        return self.A.dim_from


def defect(seed: SymmetricSeed, lam: complex):
    """Frame of the graph defect subspace {f-hat in A*: f' = lam f} plus the
    deficiency indices (n+, n-)."""
    frame = _defect_frame(seed, lam)
    n_plus = _defect_frame(seed, 1j).shape[1]
    n_minus = _defect_frame(seed, -1j).shape[1]
    return frame, (n_plus, n_minus)


def _defect_frame(seed: SymmetricSeed, lam: complex) -> np.ndarray:
    n = seed.space_dim
    gl = graph_of(lam * np.eye(n), seed.A.tol)
    from .linrel import intersect
    return intersect(seed.A_star, gl).frame


@dataclass(frozen=True)
class BoundaryTriplet:
    """Boundary space C^d with maps Gamma0, Gamma1 on A*-coordinates."""

    seed: SymmetricSeed
    boundary_dim: int
    a_star_basis: np.ndarray
    gamma0: np.ndarray
    gamma1: np.ndarray
    tol: float = DEFAULT_TOL

    @property
    def space_dim(self) -> int:
        return self.seed.space_dim

    def coords(self, vectors: np.ndarray) -> np.ndarray:
        """A*-coordinates of ambient pair vectors (columns in C^{2n})."""
        return self.a_star_basis.conj().T @ vectors

    def boundary_map(self) -> np.ndarray:
        """The stacked map (Gamma0, Gamma1)^T as a 2d x m matrix."""
        return np.vstack([self.gamma0, self.gamma1])

    @classmethod
    def from_ambient_maps(cls, seed: SymmetricSeed, g0_ambient, g1_ambient,
                          tol: float = DEFAULT_TOL) -> "BoundaryTriplet":
        """Build from boundary maps given as d x 2n matrices on ambient pairs."""
        g0_ambient = np.asarray(g0_ambient, dtype=complex)
        g1_ambient = np.asarray(g1_ambient, dtype=complex)
        basis = seed.A_star.frame
        tri = cls(seed=seed, boundary_dim=g0_ambient.shape[0],
                  a_star_basis=basis, gamma0=g0_ambient @ basis,
                  gamma1=g1_ambient @ basis, tol=tol)
        assert_valid_triplet(tri)
        return tri


def check_green(tri: BoundaryTriplet) -> float:
    """Max residual of the abstract Green identity over basis pairs of A*."""
    n = tri.space_dim
    top = tri.a_star_basis[:n]
    bot = tri.a_star_basis[n:]
    lhs = (top.conj().T @ bot - bot.conj().T @ top).T
    g0, g1 = tri.gamma0, tri.gamma1
    rhs = (g0.conj().T @ g1 - g1.conj().T @ g0).T
    if lhs.size == 0:
        return 0.0
    return float(np.max(np.abs(lhs - rhs)))


def triplet_report(tri: BoundaryTriplet) -> dict:
    """Residuals of the defining invariants of a boundary triplet."""
    report = {"green": check_green(tri)}
    G = tri.boundary_map()
    d = tri.boundary_dim
    if d:
        s = np.linalg.svd(G, compute_uv=False)
        report["surjectivity_gap"] = float(1.0 - (s[2 * d - 1] if s.size >= 2 * d else 0.0))
        rank_ok = s.size >= 2 * d and s[2 * d - 1] > tri.tol
    else:
        report["surjectivity_gap"] = 0.0
        rank_ok = True
    report["surjective"] = rank_ok
    ker_coeff = null_space(G, tri.tol)
    ker_rel = make_relation(tri.a_star_basis @ ker_coeff,
                            tri.space_dim, tri.space_dim, tri.tol)
    _, report["kernel_vs_A"] = relations_equal(ker_rel, tri.seed.A)
    _, idx = defect(tri.seed, 1j)
    report["indices"] = idx
    report["index_match"] = idx == (d, d)
    basis = tri.a_star_basis
    gram = basis.conj().T @ basis
    report["basis_orthonormal"] = float(
        np.max(np.abs(gram - np.eye(gram.shape[0]))) if gram.size else 0.0)
    return report


def assert_valid_triplet(tri: BoundaryTriplet, green_tol: float = 1e-10) -> None:
    rep = triplet_report(tri)
    if rep["green"] > green_tol:
        raise TripletError(f"Green identity residual {rep['green']:.2e}")
    if not rep["surjective"]:
        raise TripletError("stacked boundary map is not surjective")
    if rep["kernel_vs_A"] > 100 * tri.tol:
        raise TripletError("kernel of the boundary map is not the seed relation")
    if not rep["index_match"]:
        raise TripletError(f"deficiency indices {rep['indices']} != boundary dim {tri.boundary_dim}")


def von_neumann_triplet(seed: SymmetricSeed, V=None,
                        tol: float = DEFAULT_TOL) -> BoundaryTriplet:
    """Concrete triplet from the graph-orthogonal decomposition
    A* = A (+) N-hat_i (+) N-hat_{-i} and a unitary matching V of the fixed
    defect bases."""
    n_plus_frame = _defect_frame(seed, 1j)
    n_minus_frame = _defect_frame(seed, -1j)
    d = n_plus_frame.shape[1]
    if n_minus_frame.shape[1] != d:
        raise TripletError(
            f"unequal deficiency indices ({d}, {n_minus_frame.shape[1]})")
    if V is None:
        V = np.eye(d, dtype=complex)
    V = np.asarray(V, dtype=complex)
    if V.shape != (d, d) or (d and np.linalg.norm(V.conj().T @ V - np.eye(d), 2) > 1e-10):
        raise TripletError("V must be a d x d unitary")

    basis = np.column_stack([seed.A.frame, n_plus_frame, n_minus_frame])
    gram = basis.conj().T @ basis
    if gram.size and np.max(np.abs(gram - np.eye(gram.shape[0]))) > 1e-9:
        raise TripletError("graph decomposition of A* is not orthogonal")

    m = basis.shape[1]
    a_dim = seed.A.dim
    g0 = np.zeros((d, m), dtype=complex)
    g1 = np.zeros((d, m), dtype=complex)
    # 1/sqrt(2) rescales ambient-orthonormal defect coordinates so that the
    # Green identity holds exactly.
    s = 1.0 / np.sqrt(2.0)
    g0[:, a_dim:a_dim + d] = s * np.eye(d)
    g0[:, a_dim + d:] = s * V
    g1[:, a_dim:a_dim + d] = 1j * s * np.eye(d)
    g1[:, a_dim + d:] = -1j * s * V
    tri = BoundaryTriplet(seed=seed, boundary_dim=d, a_star_basis=basis,
                          gamma0=g0, gamma1=g1, tol=tol)
    assert_valid_triplet(tri)
    return tri


def extension_of(tri: BoundaryTriplet, theta: LinearRelation) -> LinearRelation:
    """A_theta = {f-hat in A*: {Gamma0 f-hat, Gamma1 f-hat} in theta}."""
    d = tri.boundary_dim
    if (theta.dim_from, theta.dim_to) != (d, d):
        raise ValueError("theta must be a relation in the boundary space")
    G = tri.boundary_map()
    proj = theta.frame @ theta.frame.conj().T
    constr = G - proj @ G
    coeff = null_space(constr, tri.tol)
    n = tri.space_dim
    return make_relation(tri.a_star_basis @ coeff, n, n, tri.tol)


def a0_extension(tri: BoundaryTriplet) -> LinearRelation:
    """A0 = ker Gamma0, the basic self-adjoint extension."""
    return extension_of(tri, vertical_relation(tri.boundary_dim, tri.tol))


def boundary_param_of(tri: BoundaryTriplet, A_tilde: LinearRelation) -> LinearRelation:
    """Inverse of the extension parametrization: theta = Gamma(A_tilde)."""
    if not contains(A_tilde, tri.seed.A) or not contains(tri.seed.A_star, A_tilde):
        raise ValueError("not a proper extension: A subseteq A~ subseteq A* fails")
    span = tri.boundary_map() @ tri.coords(A_tilde.frame)
    d = tri.boundary_dim
    return make_relation(span, d, d, tri.tol)


@dataclass(frozen=True)
class WeylSample:
    """gamma-field and Weyl function evaluated at one nonreal point."""

    lam: complex
    gamma_field: np.ndarray
    weyl: np.ndarray


def gamma_and_weyl(tri: BoundaryTriplet, lam: complex) -> WeylSample:
    """Invert Gamma0 on the defect subspace at lam."""
    if abs(lam.imag) == 0:
        raise ValueError("Weyl function is evaluated off the real axis")
    d = tri.boundary_dim
    frame = _defect_frame(tri.seed, lam)
    if frame.shape[1] != d:
        raise TripletError(
            f"defect dimension {frame.shape[1]} != boundary dim {d} at {lam}")
    C = tri.coords(frame)
    G0 = tri.gamma0 @ C
    if d:
        s = np.linalg.svd(G0, compute_uv=False)
        if s[-1] <= tri.tol:
            raise TripletError("Gamma0 restricted to the defect subspace is singular")
        X = C @ np.linalg.inv(G0)
    else:
        X = np.zeros((C.shape[0], 0), dtype=complex)
    ambient = tri.a_star_basis @ X
    return WeylSample(lam=lam, gamma_field=ambient[: tri.space_dim],
                      weyl=tri.gamma1 @ X)


def check_weyl_identities(tri: BoundaryTriplet, lam: complex, z: complex):
    """Residuals of the gamma-field and Weyl-function identities."""
    ws_l = gamma_and_weyl(tri, lam)
    ws_z = gamma_and_weyl(tri, z)
    r0 = resolvent(a0_extension(tri), lam)
    res_gamma = ws_l.gamma_field - ws_z.gamma_field \
        - (lam - z) * (r0 @ ws_z.gamma_field)
    res_weyl = ws_z.weyl - ws_l.weyl.conj().T \
        - (z - np.conj(lam)) * (ws_l.gamma_field.conj().T @ ws_z.gamma_field)
    nrm = (lambda a: float(np.linalg.norm(a, 2)) if a.size else 0.0)
    return nrm(res_gamma), nrm(res_weyl)


def forbidden_relation(tri: BoundaryTriplet) -> LinearRelation:
    """Image under the boundary maps of {0} (+) mul A*."""
    n = tri.space_dim
    mul_frame = parts(tri.seed.A_star).mul
    ambient = np.vstack([np.zeros((n, mul_frame.shape[1]), dtype=complex), mul_frame])
    span = tri.boundary_map() @ tri.coords(ambient)
    d = tri.boundary_dim
    return make_relation(span, d, d, tri.tol)


def _richardson(values_by_y):
    """Eliminate the O(1/y) term from samples at the two largest grid points."""
    (y1, v1), (y2, v2) = values_by_y[-2:]
    return (y2 * v2 - y1 * v1) / (y2 - y1)


def weyl_limits(tri: BoundaryTriplet, y_grid=DEFAULT_Y_GRID):
    """Grid estimates of the linear-growth coefficient of M(iy) and of the
    limits M(iy)h on a given domain frame.

    Returns (B_estimate, consistency_residual, evaluator) where evaluator(h)
    Richardson-extrapolates lim M(iy)h.
    """
    samples = [(y, gamma_and_weyl(tri, 1j * y).weyl) for y in y_grid]
    scaled = [(y, m / (1j * y)) for y, m in samples]
    b_est = _richardson(scaled)
    consistency = float(np.max(np.abs(scaled[-1][1] - scaled[-2][1]))) if b_est.size else 0.0

    def n_limit(h: np.ndarray) -> np.ndarray:
        vals = [(y, m @ h) for y, m in samples]
        return _richardson(vals)

    return b_est, consistency, n_limit


def check_forbidden_asymptotics(tri: BoundaryTriplet, y_grid=DEFAULT_Y_GRID) -> dict:
    """Verify the asymptotic description of the forbidden relation:
    ran B_M lies in mul F and F is recovered from the limits of M(iy) on
    dom F together with mul F."""
    d = tri.boundary_dim
    F = forbidden_relation(tri)
    pf = parts(F)
    if d == 0:
        return {"ran_B_in_mul_F": 0.0, "relation_residual": 0.0,
                "grid_consistent": True}
    b_est, consistency, n_limit = weyl_limits(tri, y_grid)
    ran_b = orth(b_est, 1e-8)
    res_ran = containment_residual(ran_b, pf.mul)
    cols = []
    for i in range(pf.dom.shape[1]):
        h = pf.dom[:, i]
        cols.append(np.concatenate([h, n_limit(h)]))
    k = pf.mul.shape[1]
    mul_cols = np.vstack([np.zeros((d, k), dtype=complex), pf.mul])
    span = np.column_stack(cols + [mul_cols]) if cols or k else np.zeros((2 * d, 0), complex)
    rebuilt = make_relation(span, d, d, 1e-6)
    _, res_rel = relations_equal(F, rebuilt)
    return {"ran_B_in_mul_F": res_ran, "relation_residual": res_rel,
            "grid_consistent": consistency < 1e-3}
