"""Explicit exit-space models: brute-force oracle for compressions.

A rational parameter tau is first reduced to a uniformly strict function
tau1 on a smaller boundary space (absorbing the constant block into a
symmetric extension S of the seed), tau1 is realized as the Weyl function
of an explicit model triplet in C^{n_r}, and the two triplets are coupled
into a self-adjoint relation A~ in C^{n + n_r}.  Compressions and
generalized resolvents of A~ are then computed directly by subspace
algebra, with no reference to the resolvent-formula machinery they are
used to cross-validate.
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
    make_relation,
    negate,
    null_space,
    relations_equal,
    resolvent,
)
from .nevanlinna import RationalNevanlinna, TauDecomposition, decompose_tau
from .triplet import (
    BoundaryTriplet,
    SymmetricSeed,
    assert_valid_triplet,
    extension_of,
    forbidden_relation,
    gamma_and_weyl,
)


class ModelError(RuntimeError):
    """An internal consistency check of the oracle construction failed."""


@dataclass(frozen=True)
class ReducedProblem:
    """Symmetric extension S absorbing the constant block of tau, with a
    boundary triplet for S* whose parameter is the uniformly strict tau1."""

    s_rel: LinearRelation
    pi_prime: BoundaryTriplet
    tau1: RationalNevanlinna
    theta0: LinearRelation
    decomposition: TauDecomposition


def reduce_parameter(tri: BoundaryTriplet, tau: RationalNevanlinna) -> ReducedProblem:
    """Absorb the kernel block (B1, B2) and the multivalued part of tau into
    the extension S = A_theta0 and restrict the boundary maps to S*."""
    if tau.dim != tri.boundary_dim:
        raise ValueError("parameter dimension does not match the boundary space")
    dec = decompose_tau(tau)
    d = tau.dim
    hp = tau.embed(dec.h_prime)
    hd = tau.embed(dec.h_dprime)
    k_amb = tau.mul_frame
    r = hd.shape[1]
    k = k_amb.shape[1]
    # theta0 = {{h'', B1 h'' (+) B2 h'' (+) k}}
    cols_dom = np.vstack([hd, hp @ dec.b1 + hd @ dec.b2])
    cols_mul = np.vstack([np.zeros((d, k), dtype=complex), k_amb])
    theta0 = make_relation(np.hstack([cols_dom, cols_mul]), d, d, tau.tol)
    S = extension_of(tri, theta0)
    seed_prime = SymmetricSeed.from_relation(S)
    C = tri.coords(seed_prime.A_star.frame)
    g0p = hp.conj().T @ tri.gamma0 @ C
    g1p = hp.conj().T @ tri.gamma1 @ C - dec.b1 @ (hd.conj().T @ tri.gamma0 @ C)
    pi_prime = BoundaryTriplet(seed=seed_prime, boundary_dim=hp.shape[1],
                               a_star_basis=seed_prime.A_star.frame,
                               gamma0=g0p, gamma1=g1p, tol=tri.tol)
    try:
        assert_valid_triplet(pi_prime)
    except Exception as exc:
        raise ModelError(f"reduced triplet invalid: {exc}") from exc
    return ReducedProblem(s_rel=S, pi_prime=pi_prime, tau1=dec.tau1,
                          theta0=theta0, decomposition=dec)


@dataclass(frozen=True)
class ModelTriplet:
    """Symmetric relation S_r in C^{dim_r} with a triplet whose Weyl
    function is a prescribed uniformly strict rational function."""

    dim_r: int
    s_r: LinearRelation
    pi_r: BoundaryTriplet


def psd_factor(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Surjective factor D with m = D^H D, rows = rank(m)."""
    if m.size == 0:
        return np.zeros((0, m.shape[1] if m.ndim == 2 else 0), dtype=complex)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    cut = tol * max(float(np.max(np.abs(w))), 1.0)
    keep = w > cut
    return (np.sqrt(w[keep])[:, None] * v[:, keep].conj().T).astype(complex)


def realize_model(tau1: RationalNevanlinna, tol: float = DEFAULT_TOL,
                  check_points=(1j, 2j, -1j, 0.5 + 1j, -1.5 + 0.7j)) -> ModelTriplet:
    """Build a model whose Weyl function is tau1.

    The model space stacks one block per rank factor of the linear
    coefficient and of each pole residue; the base boundary maps produce
    blockwise Weyl functions lam*I and (alpha_j - lam)^{-1} I, and a column
    transform by G = stack of the factors turns their combination into tau1.
    """
    if tau1.mul_frame.shape[1]:
        raise ValueError("tau1 must have trivial multivalued part")
    q = tau1.op_dim
    d_fac = psd_factor(tau1.b_coef, tol)
    c_facs = [(alpha, psd_factor(aj, tol)) for alpha, aj in tau1.poles]
    blocks = [d_fac] + [c for _, c in c_facs]
    nr = sum(b.shape[0] for b in blocks)
    G = np.vstack([b for b in blocks]) if nr else np.zeros((0, q), dtype=complex)
    if q and np.linalg.matrix_rank(G, tol=1e-10) < q:
        raise ValueError("tau1 is not uniformly strict: stacked factor not injective")

    # base boundary maps on the trivial seed {{0,0}} in C^nr, acting on
    # ambient pairs (f, f'); row blocks follow the block layout of H_r
    g0_base = np.zeros((nr, 2 * nr), dtype=complex)
    g1_base = np.zeros((nr, 2 * nr), dtype=complex)
    row = 0
    rb = d_fac.shape[0]
    g0_base[:rb, :rb] = np.eye(rb)          # f_B
    g1_base[:rb, nr:nr + rb] = np.eye(rb)   # f'_B
    row = rb
    for alpha, c in c_facs:
        rj = c.shape[0]
        sl = slice(row, row + rj)
        g0_base[sl, row:row + rj] = -alpha * np.eye(rj)
        g0_base[sl, nr + row:nr + row + rj] = np.eye(rj)   # f'_j - alpha f_j
        g1_base[sl, row:row + rj] = -np.eye(rj)            # -f_j
        row += rj

    if q:
        g_pinv = np.linalg.inv(G.conj().T @ G) @ G.conj().T
    else:
        g_pinv = np.zeros((0, nr), dtype=complex)
    ran_g = np.linalg.qr(G)[0][:, :np.linalg.matrix_rank(G, tol=1e-10)] \
        if nr and q else np.zeros((nr, 0), dtype=complex)

    # S_r* = {f-hat: Gamma0_base f-hat in ran G}
    proj_out = np.eye(nr, dtype=complex) - ran_g @ ran_g.conj().T
    s_r_star_frame = null_space(proj_out @ g0_base, tol) if nr else np.eye(0, dtype=complex)
    s_r_frame = null_space(np.vstack([g0_base, G.conj().T @ g1_base]), tol) \
        if nr else np.eye(0, dtype=complex)
    s_r = LinearRelation(nr, nr, s_r_frame, tol)
    s_r_star = LinearRelation(nr, nr, s_r_star_frame, tol)
    ok, resid = relations_equal(s_r_star, adjoint(s_r))
    if not ok:
        raise ModelError(f"model adjoint inconsistent (residual {resid:.2e})")
    seed_r = SymmetricSeed(A=s_r, A_star=s_r_star)

    e_coef = tau1.a_coef
    g0_amb = g_pinv @ g0_base
    g1_amb = G.conj().T @ g1_base + e_coef @ g0_amb
    pi_r = BoundaryTriplet(seed=seed_r, boundary_dim=q,
                           a_star_basis=s_r_star_frame,
                           gamma0=g0_amb @ s_r_star_frame,
                           gamma1=g1_amb @ s_r_star_frame, tol=tol)
    assert_valid_triplet(pi_r)
    for lam in check_points:
        m = gamma_and_weyl(pi_r, lam).weyl
        if np.max(np.abs(m - tau1.tau0(lam)), initial=0.0) > 1e-8:
            raise ModelError(f"model Weyl function does not match tau1 at {lam}")
    return ModelTriplet(dim_r=nr, s_r=s_r, pi_r=pi_r)


@dataclass(frozen=True)
class ExitSpaceModel:
    """Self-adjoint coupling A~ in C^{n + dim_r}; base-space coordinates
    come first in both pair components."""

    dim_h: int
    dim_r: int
    a_tilde: LinearRelation
    reduced: ReducedProblem
    model: ModelTriplet


def couple(reduced: ReducedProblem, model: ModelTriplet) -> ExitSpaceModel:
    """A~ = {f-hat (+) f-hat_r: Gamma0' f-hat = Gamma0^r f-hat_r,
    Gamma1' f-hat = -Gamma1^r f-hat_r}."""
    pi_p, pi_r = reduced.pi_prime, model.pi_r
    if pi_p.boundary_dim != pi_r.boundary_dim:
        raise ValueError("boundary spaces of the two triplets differ")
    n = pi_p.space_dim
    nr = model.dim_r
    m1 = pi_p.a_star_basis.shape[1]
    constraints = np.block([
        [pi_p.gamma0, -pi_r.gamma0],
        [pi_p.gamma1, pi_r.gamma1],
    ]) if pi_p.boundary_dim else np.zeros((0, m1 + pi_r.a_star_basis.shape[1]), dtype=complex)
    coeff = null_space(constraints, pi_p.tol)
    amb_p = pi_p.a_star_basis @ coeff[:m1]
    amb_r = pi_r.a_star_basis @ coeff[m1:]
    cols = np.vstack([amb_p[:n], amb_r[:nr], amb_p[n:], amb_r[nr:]])
    a_tilde = make_relation(cols, n + nr, n + nr, pi_p.tol)
    if classify_symmetry(a_tilde) != "self_adjoint":
        raise ModelError("coupled relation is not self-adjoint")
    return ExitSpaceModel(dim_h=n, dim_r=nr, a_tilde=a_tilde,
                          reduced=reduced, model=model)


def build_exit_space(tri: BoundaryTriplet, tau: RationalNevanlinna) -> ExitSpaceModel:
    """Reduce, realize and couple in one step."""
    reduced = reduce_parameter(tri, tau)
    model = realize_model(reduced.tau1, tol=tri.tol)
    return couple(reduced, model)


def direct_compression(model: ExitSpaceModel):
    """Compression chain of A~ to the base space: (C, S, T) with
    S = A~ restricted to pairs entirely in H, C additionally projecting the
    second component, T projecting both components."""
    n, nr = model.dim_h, model.dim_r
    frame = model.a_tilde.frame
    tol = model.a_tilde.tol
    f_h, f_r = frame[:n], frame[n:n + nr]
    fp_h, fp_r = frame[n + nr:2 * n + nr], frame[2 * n + nr:]
    # C: left exit component zero, right exit component projected away
    coeff_c = null_space(f_r, tol)
    C = make_relation(np.vstack([f_h @ coeff_c, fp_h @ coeff_c]), n, n, tol)
    # S: both exit components zero
    coeff_s = null_space(np.vstack([f_r, fp_r]), tol)
    S = make_relation(np.vstack([f_h @ coeff_s, fp_h @ coeff_s]), n, n, tol)
    # T: project both components
    T = make_relation(np.vstack([f_h, fp_h]), n, n, tol)
    return C, S, T


def chain_residuals(tri: BoundaryTriplet, model: ExitSpaceModel) -> dict:
    """Containment residuals of A <= S <= C <= T <= A* for the direct
    compression chain."""
    C, S, T = direct_compression(model)
    return {
        "A_in_S": containment_residual(tri.seed.A.frame, S.frame),
        "S_in_C": containment_residual(S.frame, C.frame),
        "C_in_T": containment_residual(C.frame, T.frame),
        "T_in_A_star": containment_residual(T.frame, tri.seed.A_star.frame),
    }


def generalized_resolvent_direct(model: ExitSpaceModel, lam: complex) -> np.ndarray:
    """Base-space block of (A~ - lam)^{-1}."""
    n = model.dim_h
    return resolvent(model.a_tilde, lam)[:n, :n]


def compression_via_forbidden(model: ExitSpaceModel) -> LinearRelation:
    """C(A~) computed from the forbidden relation of the model triplet:
    the extension of S with boundary parameter -F_r in the reduced triplet."""
    f_r = forbidden_relation(model.model.pi_r)
    return extension_of(model.reduced.pi_prime, negate(f_r))


def minimality(model: ExitSpaceModel, lams) -> bool:
    """Whether the base space and its resolvent images span C^{n + dim_r}."""
    n, nr = model.dim_h, model.dim_r
    embed = np.vstack([np.eye(n, dtype=complex),
                       np.zeros((nr, n), dtype=complex)])
    blocks = [embed]
    for lam in lams:
        blocks.append(resolvent(model.a_tilde, lam) @ embed)
    stacked = np.hstack(blocks)
    return int(np.linalg.matrix_rank(stacked, tol=1e-8)) == n + nr
