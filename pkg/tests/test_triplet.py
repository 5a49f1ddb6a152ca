"""Boundary triplets: defect subspaces, Green identity, extensions, Weyl."""
import numpy as np
import pytest

from relcomp.linrel import (
    adjoint,
    classify_symmetry,
    comp_sum,
    graph_of,
    intersect,
    make_relation,
    relations_equal,
    vertical_relation,
    zero_relation,
)
from relcomp.triplet import (
    BoundaryTriplet,
    SymmetricSeed,
    TripletError,
    a0_extension,
    boundary_param_of,
    check_forbidden_asymptotics,
    check_green,
    check_weyl_identities,
    defect,
    extension_of,
    forbidden_relation,
    gamma_and_weyl,
    triplet_report,
    von_neumann_triplet,
)


def random_symmetric_seed(rng, n, d=None, allow_mul=True):
    """Seed with prescribed deficiency index d (defaults to random)."""
    if d is None:
        d = int(rng.integers(0, n + 1))
    n_mul = int(rng.integers(0, n - d + 1)) if allow_mul else 0
    m = n - d - n_mul
    q = np.linalg.qr(rng.standard_normal((n, n))
                     + 1j * rng.standard_normal((n, n)))[0]
    h = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (h + h.conj().T) / 2
    dom = q[:, :m]
    span = np.vstack([
        np.hstack([dom, np.zeros((n, n_mul))]),
        np.hstack([h @ dom, q[:, m:m + n_mul]]),
    ])
    return SymmetricSeed.from_relation(make_relation(span, n, n))


def random_unitary(rng, d):
    if d == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return np.linalg.qr(z)[0]


def scalar_triplet():
    """Seed {{0,0}} in C with boundary maps (f, f')."""
    seed = SymmetricSeed.from_relation(zero_relation(1))
    return BoundaryTriplet.from_ambient_maps(
        seed, np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]]))


def pole_triplet(alpha):
    """Same seed with maps (f' - alpha f, -f); Weyl function (alpha-lam)^-1."""
    seed = SymmetricSeed.from_relation(zero_relation(1))
    return BoundaryTriplet.from_ambient_maps(
        seed, np.array([[-alpha, 1.0]]), np.array([[-1.0, 0.0]]))


def test_defect_of_trivial_seed():
    seed = SymmetricSeed.from_relation(zero_relation(1))
    frame, idx = defect(seed, 0.3 + 1.7j)
    assert frame.shape[1] == 1
    assert idx == (1, 1)


def test_defect_of_selfadjoint_graph():
    seed = SymmetricSeed.from_relation(graph_of(np.diag([1.0, 2.0])))
    _, idx = defect(seed, 1j)
    assert idx == (0, 0)


def test_defect_of_symmetric_restriction():
    span = np.array([[1.0], [0.0], [1.0], [0.0]])
    seed = SymmetricSeed.from_relation(make_relation(span, 2, 2))
    frame, idx = defect(seed, 1j)
    assert idx == (1, 1)
    # members of the defect space solve f' = lam f inside A*
    top, bot = frame[:2], frame[2:]
    assert np.max(np.abs(bot - 1j * top), initial=0.0) < 1e-9


def test_indices_count_codimension():
    rng = np.random.default_rng(2)
    for _ in range(15):
        n = int(rng.integers(1, 6))
        seed = random_symmetric_seed(rng, n)
        _, idx = defect(seed, 1j)
        assert idx[0] == idx[1] == n - seed.A.dim


def test_von_neumann_weyl_at_i():
    rng = np.random.default_rng(8)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        seed = random_symmetric_seed(rng, n)
        d = n - seed.A.dim
        tri = von_neumann_triplet(seed, V=random_unitary(rng, d))
        if d == 0:
            continue
        m = gamma_and_weyl(tri, 1j).weyl
        assert np.max(np.abs(m - 1j * np.eye(d))) < 1e-9


def test_von_neumann_green_residual():
    rng = np.random.default_rng(4)
    for _ in range(15):
        seed = random_symmetric_seed(rng, int(rng.integers(1, 7)))
        d = seed.space_dim - seed.A.dim
        tri = von_neumann_triplet(seed, V=random_unitary(rng, d))
        assert check_green(tri) < 1e-10
        rep = triplet_report(tri)
        assert rep["surjective"] and rep["index_match"]
        assert rep["kernel_vs_A"] < 1e-8


def test_von_neumann_rejects_nonunitary():
    rng = np.random.default_rng(1)
    seed = random_symmetric_seed(rng, 3, d=2)
    with pytest.raises(TripletError):
        von_neumann_triplet(seed, V=2.0 * np.eye(2))


def test_selfadjoint_seed_gives_empty_triplet():
    seed = SymmetricSeed.from_relation(graph_of(np.diag([1.0, -1.0])))
    tri = von_neumann_triplet(seed)
    assert tri.boundary_dim == 0
    assert check_green(tri) < 1e-12


def test_negated_gamma1_breaks_green():
    tri = scalar_triplet()
    broken = BoundaryTriplet(seed=tri.seed, boundary_dim=1,
                             a_star_basis=tri.a_star_basis,
                             gamma0=tri.gamma0, gamma1=-tri.gamma1)
    assert check_green(broken) > 0.1


def test_extension_endpoints():
    rng = np.random.default_rng(21)
    seed = random_symmetric_seed(rng, 4, d=2)
    tri = von_neumann_triplet(seed)
    full_theta = make_relation(np.eye(4), 2, 2)
    eq, _ = relations_equal(extension_of(tri, full_theta), seed.A_star)
    assert eq
    a0 = a0_extension(tri)
    assert classify_symmetry(a0) == "self_adjoint"
    eq, _ = relations_equal(intersect(a0, extension_of(tri, zero_relation(2))),
                            seed.A)
    assert eq


def test_extension_scalar_substitution():
    tri = scalar_triplet()
    ext = extension_of(tri, graph_of(np.array([[5.0]])))
    eq, resid = relations_equal(ext, graph_of(np.array([[5.0]])))
    assert eq, resid


def test_boundary_param_roundtrip():
    rng = np.random.default_rng(31)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        seed = random_symmetric_seed(rng, n, d=int(rng.integers(1, min(3, n) + 1)))
        d = n - seed.A.dim
        tri = von_neumann_triplet(seed, V=random_unitary(rng, d))
        r = int(rng.integers(0, 2 * d + 1))
        theta = make_relation(rng.standard_normal((2 * d, r))
                              + 1j * rng.standard_normal((2 * d, r)), d, d)
        ext = extension_of(tri, theta)
        eq, resid = relations_equal(boundary_param_of(tri, ext), theta)
        assert eq, resid
        eq, _ = relations_equal(extension_of(tri, boundary_param_of(tri, ext)), ext)
        assert eq
    # trivial endpoints
    eq, _ = relations_equal(boundary_param_of(tri, seed.A), zero_relation(d))
    assert eq
    eq, _ = relations_equal(boundary_param_of(tri, seed.A_star),
                            make_relation(np.eye(2 * d), d, d))
    assert eq
    eq, _ = relations_equal(boundary_param_of(tri, a0_extension(tri)),
                            vertical_relation(d))
    assert eq


def test_adjoint_commutes_with_parametrization():
    rng = np.random.default_rng(41)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        seed = random_symmetric_seed(rng, n, d=int(rng.integers(1, min(3, n) + 1)))
        d = n - seed.A.dim
        tri = von_neumann_triplet(seed, V=random_unitary(rng, d))
        r = int(rng.integers(0, 2 * d + 1))
        theta = make_relation(rng.standard_normal((2 * d, r))
                              + 1j * rng.standard_normal((2 * d, r)), d, d)
        eq, resid = relations_equal(adjoint(extension_of(tri, theta)),
                                    extension_of(tri, adjoint(theta)))
        assert eq, resid


def test_selfadjoint_transfer():
    rng = np.random.default_rng(43)
    for _ in range(15):
        seed = random_symmetric_seed(rng, 4, d=2)
        tri = von_neumann_triplet(seed, V=random_unitary(rng, 2))
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        theta = graph_of((h + h.conj().T) / 2)
        assert classify_symmetry(extension_of(tri, theta)) == "self_adjoint"


def test_transversality_iff_operator_parameter():
    rng = np.random.default_rng(47)
    seed = random_symmetric_seed(rng, 4, d=2)
    tri = von_neumann_triplet(seed)
    h = rng.standard_normal((2, 2))
    op_ext = extension_of(tri, graph_of((h + h.T) / 2))
    a0 = a0_extension(tri)
    eq, _ = relations_equal(comp_sum(op_ext, a0), seed.A_star)
    assert eq
    eq, _ = relations_equal(intersect(op_ext, a0), seed.A)
    assert eq
    # vertical parameter: extension equals A0, not transversal
    vert_ext = extension_of(tri, vertical_relation(2))
    eq, _ = relations_equal(comp_sum(vert_ext, a0), seed.A_star)
    assert not eq


def test_scalar_weyl_functions():
    tri = scalar_triplet()
    for lam in (1j, 2j, -0.5 + 1j):
        ws = gamma_and_weyl(tri, lam)
        assert abs(ws.weyl[0, 0] - lam) < 1e-12
        assert abs(abs(ws.gamma_field[0, 0]) - 1.0) < 1e-12
    tri2 = pole_triplet(0.7)
    for lam in (1j, 2j):
        ws = gamma_and_weyl(tri2, lam)
        assert abs(ws.weyl[0, 0] - 1.0 / (0.7 - lam)) < 1e-12


def test_weyl_nevanlinna_positivity_and_symmetry():
    rng = np.random.default_rng(53)
    for _ in range(15):
        seed = random_symmetric_seed(rng, int(rng.integers(2, 6)),
                                     d=int(rng.integers(1, 3)))
        d = seed.space_dim - seed.A.dim
        tri = von_neumann_triplet(seed, V=random_unitary(rng, d))
        lam = complex(rng.uniform(-2, 2), rng.uniform(0.5, 2))
        m = gamma_and_weyl(tri, lam).weyl
        m_bar = gamma_and_weyl(tri, np.conj(lam)).weyl
        assert np.max(np.abs(m_bar - m.conj().T)) < 1e-9
        im = (m - m.conj().T) / 2j
        assert np.min(np.linalg.eigvalsh((im + im.conj().T) / 2)) > -1e-9


def test_weyl_identities_random_and_degenerate():
    rng = np.random.default_rng(59)
    for _ in range(10):
        seed = random_symmetric_seed(rng, int(rng.integers(2, 6)),
                                     d=int(rng.integers(1, 3)))
        d = seed.space_dim - seed.A.dim
        tri = von_neumann_triplet(seed, V=random_unitary(rng, d))
        r1, r2 = check_weyl_identities(tri, 1j, 2j)
        assert r1 < 1e-8 and r2 < 1e-8
        r1, r2 = check_weyl_identities(tri, 1j, 1j)
        assert r1 < 1e-10 and r2 < 1e-8
        r1, r2 = check_weyl_identities(tri, 0.4 + 1.3j, 0.4 - 1.3j)
        assert r1 < 1e-8 and r2 < 1e-8


def test_forbidden_relation_shapes():
    assert forbidden_relation(scalar_triplet()).frame.shape == (2, 1)
    eq, _ = relations_equal(forbidden_relation(scalar_triplet()),
                            vertical_relation(1))
    assert eq
    # pole triplet: Gamma0 n = n, Gamma1 n = 0 -> horizontal relation
    horizontal = make_relation(np.array([[1.0], [0.0]]), 1, 1)
    eq, _ = relations_equal(forbidden_relation(pole_triplet(0.0)), horizontal)
    assert eq


def test_forbidden_dimension_counts_mul_of_adjoint():
    # dim F = dim mul A* = codim of dom A; trivial only for dense domains,
    # which in finite dimension forces A self-adjoint
    rng = np.random.default_rng(61)
    seed = random_symmetric_seed(rng, 4, d=2, allow_mul=False)
    tri = von_neumann_triplet(seed)
    from relcomp.linrel import parts
    assert forbidden_relation(tri).dim == parts(seed.A_star).mul.shape[1] == 2
    dense = SymmetricSeed.from_relation(graph_of(np.diag([1.0, 2.0])))
    assert forbidden_relation(von_neumann_triplet(dense)).dim == 0


def test_forbidden_asymptotics_scalar_models():
    out = check_forbidden_asymptotics(scalar_triplet())
    assert out["grid_consistent"]
    assert out["ran_B_in_mul_F"] < 1e-4
    assert out["relation_residual"] < 1e-4
    out = check_forbidden_asymptotics(pole_triplet(0.3))
    assert out["grid_consistent"]
    assert out["ran_B_in_mul_F"] < 1e-4
    assert out["relation_residual"] < 1e-4


def test_forbidden_asymptotics_vacuous_for_selfadjoint():
    seed = SymmetricSeed.from_relation(graph_of(np.diag([1.0, 2.0])))
    out = check_forbidden_asymptotics(von_neumann_triplet(seed))
    assert out["relation_residual"] == 0.0
