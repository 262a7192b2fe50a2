import numpy as np
import pytest
import scipy.sparse as sp
from scipy.interpolate import BSpline

from conftest import two_triangle_grid
from thnus.iga import (FULL, REDUCED, SOLUTIONS, PoissonProblem, QuadratureScheme, assemble, convergence_study,
                       error_norms, irregular_element_diameters, mass_matrix, quadrature_points, refine_levels,
                       solve, solve_poisson, stiffness_matrix)
from thnus.mesh import to_hybrid_topology
from thnus.meshes import square_valence


@pytest.fixture(scope="module")
def v6_levels(builtin):
    return refine_levels(builtin("square_v6"), 0.3, 2)


def test_quadrature_sizes():
    for scheme, kind, count in ((REDUCED, "regular", 16), (REDUCED, "irregular", 16), (FULL, "irregular", 496),
                                (FULL, "regular", 16)):
        pts, wts = quadrature_points(scheme, kind)
        assert len(pts) == count
        assert wts.sum() == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        QuadratureScheme("midpoint")


@pytest.mark.parametrize("scheme", [REDUCED, FULL], ids=["reduced", "full"])
def test_stiffness_symmetric_and_kills_constants(v6_levels, scheme):
    prob = PoissonProblem(v6_levels[0], 0.3, scheme=scheme)
    A, b = assemble(prob)
    assert abs(A - A.T).max() < 1e-12
    assert np.abs(A @ np.ones(A.shape[0])).max() < 1e-11
    assert np.all(A.diagonal() >= 0)
    # the load integrates f = 2 pi^2 sin sin against a partition of unity
    assert b.sum() == pytest.approx(8.0, rel=1e-3)


def test_direct_solve():
    A = sp.diags([2.0, 3.0, 4.0]).tocsr()
    assert np.allclose(solve(A, [2.0, 3.0, 4.0]), 1.0, atol=1e-15)
    assert np.array_equal(solve(A, np.zeros(3)), np.zeros(3))


def test_error_of_zero_function(v6_levels):
    prob = PoissonProblem(v6_levels[0], 0.3)
    l2, h1 = error_norms(prob, np.zeros(prob.n_vertices))
    # integral of sin^2 sin^2 over the unit square is 1/4, of the gradient squared pi^2 / 2
    assert l2 == pytest.approx(0.5, rel=1e-5)
    assert h1 == pytest.approx(np.sqrt(0.25 + np.pi ** 2 / 2), rel=1e-5)


@pytest.mark.parametrize("name", ["x", "x+2y"])
@pytest.mark.parametrize("level", [0, 1])
def test_linear_patch_test(v6_levels, name, level):
    prob = PoissonProblem(v6_levels[level], 0.3, SOLUTIONS[name], FULL)
    l2, h1 = error_norms(prob, solve_poisson(prob))
    assert l2 < 1e-12 and h1 < 1e-11
    # reduced quadrature is not exact near the polygon, but stays close
    prob = PoissonProblem(v6_levels[level], 0.3, SOLUTIONS[name], REDUCED)
    l2, _ = error_norms(prob, solve_poisson(prob))
    assert l2 < 1e-4


def clamped_tensor_oracle(h):
    """Stiffness and mass of a clamped bicubic spline over a 5x5 grid via scipy."""
    t = np.array([0, 0, 0, 0, 1, 2, 2, 2, 2], dtype=float)
    # same 4-point Gauss rule per span as the assembly; the integrands are rational
    x, w = np.polynomial.legendre.leggauss(4)
    s = np.concatenate([0.5 * (x + 1), 1.5 + 0.5 * x])
    ws = np.concatenate([0.5 * w, 0.5 * w])
    basis = [BSpline(t, np.eye(5)[i], 3) for i in range(5)]
    B = np.array([b(s) for b in basis])
    D = np.array([b.derivative()(s) for b in basis])
    # grid index from the positions: row-major in (y, x)
    order = np.lexsort((h.vertices[:, 0], h.vertices[:, 1]))
    X = h.vertices[order, :2].reshape(5, 5, 2)
    N = np.einsum("ja,ib->abji", B, B)  # [point_u, point_v, row j (v), col i (u)]
    Nu = np.einsum("ja,ib->abji", B, D)
    Nv = np.einsum("ja,ib->abji", D, B)
    xu = np.einsum("abji,jid->abd", Nu, X)
    xv = np.einsum("abji,jid->abd", Nv, X)
    det = xu[..., 0] * xv[..., 1] - xu[..., 1] * xv[..., 0]
    gx = (xv[..., 1, None, None] * Nu - xu[..., 1, None, None] * Nv) / det[..., None, None]
    gy = (-xv[..., 0, None, None] * Nu + xu[..., 0, None, None] * Nv) / det[..., None, None]
    W = np.outer(ws, ws) * np.abs(det)
    gx, gy, N = (a.reshape(len(s), len(s), 25) for a in (gx, gy, N))
    K = np.einsum("abi,abj,ab->ij", gx, gx, W) + np.einsum("abi,abj,ab->ij", gy, gy, W)
    M = np.einsum("abi,abj,ab->ij", N, N, W)
    P = np.zeros((25, 25))
    P[order, np.arange(25)] = 1.0
    return P @ K @ P.T, P @ M @ P.T


def test_regular_patch_matches_tensor_splines():
    h = to_hybrid_topology(square_valence(4, splits=1))
    prob = PoissonProblem(h, 0.5, scheme=FULL)
    K_ref, M_ref = clamped_tensor_oracle(h)
    blocks = prob.blocks()
    assert np.abs(stiffness_matrix(blocks, 25).toarray() - K_ref).max() < 1e-12
    assert np.abs(mass_matrix(blocks, 25).toarray() - M_ref).max() < 1e-14


def test_diagonal_mirror_symmetry():
    h = refine_levels(square_valence(4, splits=1), 0.5, 2)[-1]
    prob = PoissonProblem(h, 0.5)
    c = solve_poisson(prob).coefficients
    X = np.round(h.vertices[:, :2], 12)
    where = {tuple(p): i for i, p in enumerate(X)}
    for i, (x, y) in enumerate(X):
        assert c[i] == pytest.approx(c[where[(y, x)]], abs=1e-12)


def test_regular_mesh_rates():
    rep = convergence_study(square_valence(4, splits=1), 0.5, 6)
    assert rep.slope("err_l2", last=2) == pytest.approx(4.0, abs=0.1)
    assert rep.slope("err_h1", last=2) == pytest.approx(3.0, abs=0.1)
    lines = rep.csv(header="h").splitlines()
    assert lines[1] == "level,ndof,h,err_l2,err_h1,rate_l2,rate_h1"
    assert len(lines) == 2 + 6 + 1
    assert rep.ndof == [9, 25, 81, 289, 1089, 4225]


def test_study_rejects_too_few_levels():
    with pytest.raises(ValueError):
        convergence_study(square_valence(4, splits=1), 0.5, 2)


def test_irregular_diameters_halve(v6_levels):
    d1 = irregular_element_diameters(v6_levels[0], 0.3)
    d2 = irregular_element_diameters(v6_levels[1], 0.3)
    assert len(d1) == len(d2) == 6
    assert d2.max() / d1.max() == pytest.approx(0.5, abs=0.1)


def test_patch_test_with_macro_elements():
    h = to_hybrid_topology(two_triangle_grid(splits=1))
    prob = PoissonProblem(h, 0.3, SOLUTIONS["x+2y"], FULL)
    l2, h1 = error_norms(prob, solve_poisson(prob))
    assert l2 < 1e-12 and h1 < 1e-11
