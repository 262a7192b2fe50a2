import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thnus.mesh import to_hybrid_topology
from thnus.meshes import square_ev35, square_valence
from thnus.spectral import assemble_Sn
from thnus.subdivision import (format_obj, refine_geometry, refinement_operator, stencil_weights,
                               tessellate_limit, update_outer_ring, update_polygon_ring)

lams = st.floats(0.2501, 0.9999)
spoke = st.floats(0.1, 10.0)


@pytest.fixture(scope="module")
def ev35():
    return to_hybrid_topology(square_ev35(splits=1))


def test_uniform_pentagon_stencil():
    s = stencil_weights(5, 0.26, [1.0] * 5)
    assert np.allclose(s.alpha, 0.05)
    assert np.allclose(s.beta, 0.2)


@pytest.mark.parametrize("lam", [0.25, 1.0, 0.2])
def test_lambda_range(lam):
    with pytest.raises(ValueError, match="1/4"):
        stencil_weights(5, lam, [1.0] * 5)


@settings(max_examples=300, deadline=None)
@given(st.integers(3, 12), lams, st.data())
def test_polygon_rule_is_affine(n, lam, data):
    d = data.draw(st.lists(spoke, min_size=n, max_size=n))
    s = stencil_weights(n, lam, d)
    assert np.allclose(s.matrix().sum(axis=1), 1.0, atol=1e-13)
    assert s.beta.sum() == pytest.approx(1.0, abs=1e-13)
    assert s.beta.min() > 0


def test_ring_fixed_point():
    n = 6
    q = np.array([0.3, -1.2, 2.0])
    pts = [np.tile(q, (n, 1))] * 4
    out = update_polygon_ring(stencil_weights(n, 0.4, np.linspace(1, 2, n)), *pts, np.linspace(2, 3, n))
    for arr in out.values():
        assert np.allclose(arr, q, atol=1e-14)


def test_uniform_face_point():
    rng = np.random.default_rng(0)
    n = 5
    p00, p10, p01, p11 = rng.normal(size=(4, n, 2))
    out = update_polygon_ring(stencil_weights(n, 0.3, [2.0] * n), p00, p10, p01, p11, [2.0] * n)
    assert np.allclose(out["p11"], (9 * p00 + 3 * p10 + 3 * p01 + p11) / 16, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 9), lams, st.data())
def test_ring_update_matches_matrix(n, lam, data):
    """The ring rule with settled intervals equals the block matrix rows."""
    d = np.array(data.draw(st.lists(spoke, min_size=n, max_size=n)))
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 16)))
    p00, p10, p01, p11 = rng.normal(size=(4, n, 2))
    out = update_polygon_ring(stencil_weights(n, lam, d), p00, p10, p01, p11, d)
    X = np.zeros((4 * n, 2))
    X[:n] = p00
    for i in range(n):
        X[n + 2 * i] = p10[i]
        X[n + 2 * ((i + 1) % n) + 1] = p01[i]
        X[3 * n + i] = p11[i]
    Y = assemble_Sn(n, lam, d).entries @ X
    assert np.allclose(Y[:n], out["p00"], atol=1e-12)
    for i in range(n):
        assert np.allclose(Y[n + 2 * i], out["p10"][i], atol=1e-12)
        assert np.allclose(Y[n + 2 * ((i + 1) % n) + 1], out["p01"][i], atol=1e-12)
        assert np.allclose(Y[3 * n + i], out["p11"][i], atol=1e-12)


def test_outer_ring_fixed_point():
    pts = {(j, k): np.array([1.0, 2.0]) for j in range(-1, 3) for k in range(-1, 3)}
    out = update_outer_ring(pts, [1, 0, 1, 2, 1], [1.5, 0, 1, 1, 3])
    assert all(np.allclose(p, [1.0, 2.0]) for p in out.values())


@pytest.mark.parametrize("lam", [0.26, 0.5])
def test_refinement_rows_affine_and_nonnegative(ev35, lam):
    h = ev35
    for _ in range(2):
        fine, R = refinement_operator(h, lam)
        assert np.allclose(np.asarray(R.sum(axis=1)).ravel(), 1.0, atol=1e-13)
        assert R.data.min() >= -1e-15
        h = fine.with_vertices(R @ h.vertices)


def test_polygon_weights_turn_negative_for_large_lambda():
    # off-diagonal entry (1 - lam) beta + 2 (1 + 2 cos(4 pi / 5)) lam alpha of a uniform pentagon
    c = 1 + 2 * np.cos(4 * np.pi / 5)
    root = 0.2 / (0.2 - 0.1 * c)
    for lam, sign in ((root - 1e-3, 1), (root + 1e-3, -1)):
        q = stencil_weights(5, lam, [1.0] * 5).matrix()
        assert np.sign(q[0, 2]) == sign
        assert q[0, 2] == pytest.approx((1 - lam) * 0.2 + 2 * c * lam * 0.05, abs=1e-15)


def test_lambda_only_moves_polygon_vertices(ev35):
    fine, Ra = refinement_operator(ev35, 0.26)
    _, Rb = refinement_operator(ev35, 0.5)
    diff = np.flatnonzero(np.abs((Ra - Rb).toarray()).max(axis=1) > 0)
    poly = set(ev35.polygon_vertex)
    assert len(diff) > 0
    assert all(fine.origin[r][0] == "v" and fine.origin[r][1] in poly for r in diff)


def test_smaller_lambda_pulls_polygon_inward():
    n = 6
    ang = 2 * np.pi * np.arange(n) / n
    P = np.column_stack([np.cos(ang), np.sin(ang)])
    dist = {}
    for lam in (0.26, 0.5):
        s = stencil_weights(n, lam, [1.0] * n)
        dist[lam] = np.linalg.norm(s.matrix() @ P - s.beta @ P, axis=1)
    assert np.all(dist[0.26] < dist[0.5])


def test_rigid_motion_equivariance(ev35):
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    t = rng.normal(size=3)
    h = ev35.with_vertices(ev35.vertices + rng.normal(scale=0.01, size=ev35.vertices.shape))
    a = refine_geometry(h.with_vertices(h.vertices @ q.T + t), 0.26).vertices
    b = refine_geometry(h, 0.26).vertices @ q.T + t
    assert np.abs(a - b).max() < 1e-12


def test_planar_stays_planar(ev35):
    h = refine_geometry(refine_geometry(ev35, 0.3), 0.3)
    assert np.all(h.vertices[:, 2] == 0.0)


def test_first_level_inside_hull_and_coincident():
    m = square_ev35(splits=1)
    h = to_hybrid_topology(m)
    assert h.vertices[:, :2].min() >= -1e-15 and h.vertices[:, :2].max() <= 1 + 1e-15
    m.vertices[:] = [0.2, 0.4, 0.6]
    h = to_hybrid_topology(m)
    assert np.allclose(h.vertices, [0.2, 0.4, 0.6], atol=1e-15)


def test_regular_mesh_is_unchanged_at_level_one():
    m = square_valence(4, splits=1)
    assert np.array_equal(to_hybrid_topology(m).vertices, m.vertices)


def test_tessellation_watertight_and_flat(ev35):
    pts, tri = tessellate_limit(ev35, 0.26, samples=3)
    assert np.all(pts[:, 2] == 0)
    edges = {}
    for t in tri:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edges[tuple(sorted((a, b)))] = edges.get(tuple(sorted((a, b))), 0) + 1
    assert max(edges.values()) == 2
    # boundary edges lie on the unit square boundary
    for (a, b), c in edges.items():
        if c == 1:
            mid = 0.5 * (pts[a] + pts[b])
            assert min(mid[0], mid[1], 1 - mid[0], 1 - mid[1]) < 1e-12
    e = pts[tri[:, 1]] - pts[tri[:, 0]], pts[tri[:, 2]] - pts[tri[:, 0]]
    area = 0.5 * np.abs(e[0][:, 0] * e[1][:, 1] - e[0][:, 1] * e[1][:, 0]).sum()
    assert area == pytest.approx(1.0, abs=1e-2)


def test_obj_format():
    text = format_obj([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]], header="h")
    assert text == "# h\nv 0.0 0.0 0.0\nv 1.0 0.0 0.0\nv 0.0 1.0 0.0\nf 1 2 3\n"
