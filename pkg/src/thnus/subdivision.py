"""Geometric refinement rules of tuned hybrid non-uniform subdivision.

Polygon vertices move towards the knot-weighted centre ``C`` of their polygon
by the tuning factor ``lam``; every other new point comes from mid-knot
insertion of the local bicubic B-spline, written as a tensor product of the
one-dimensional rules in :mod:`thnus.knots`.  All rules are assembled into a
sparse refinement operator so that geometry, local subdivision matrices and
basis refinement share one implementation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import check_lambda
from .knots import edge_weights, split_weights, vertex_weights
from .mesh import HybridMesh, KnotMesh, refine_topology


@dataclass(frozen=True)
class PolygonStencil:
    """Weights of the polygon-vertex rule.

    Attributes
    ----------
    n : int
        Number of polygon vertices.
    lam : float
        Tuning factor in (1/4, 1).
    d : ndarray, shape (n,)
        Spoke intervals; spoke ``i`` leaves polygon vertex ``i`` on the side of
        polygon edge ``(i - 1, i)``.
    alpha : ndarray, shape (n,)
        Per-vertex weight of the cosine correction.
    beta : ndarray, shape (n,)
        Barycentric weights of the centre ``C``.
    """

    n: int
    lam: float
    d: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def matrix(self):
        """Dense ``n x n`` matrix mapping old polygon vertices to new ones."""
        n, lam = self.n, self.lam
        idx = np.arange(n)
        cosines = 1.0 + 2.0 * np.cos(2.0 * np.pi * (idx[None, :] - idx[:, None]) / n)
        q = (1.0 - lam) * self.beta[None, :] + 2.0 * lam * self.alpha[:, None] * cosines
        q[idx, idx] += lam - 2.0 * lam * n * self.alpha
        return q

    def center_weights(self):
        return self.beta.copy()


def stencil_weights(n, lam, d):
    """Build the polygon stencil for ``n`` vertices with spoke intervals ``d``.

    Parameters
    ----------
    n : int
        Valence, at least 3.
    lam : float
        Tuning factor in the open interval (1/4, 1).
    d : array_like, shape (n,)
        Positive spoke intervals.

    Returns
    -------
    PolygonStencil

    Examples
    --------
    >>> s = stencil_weights(5, 0.26, [1.0] * 5)
    >>> round(float(s.alpha[0]), 12), round(float(s.beta[0]), 12)
    (0.05, 0.2)
    """
    n = int(n)
    if n < 3:
        raise ValueError("a polygon needs at least three vertices")
    lam = check_lambda(lam)
    d = np.asarray(d, dtype=float)
    if d.shape != (n,):
        raise ValueError(f"expected {n} spoke intervals, got shape {d.shape}")
    if np.any(d <= 0):
        raise ValueError("spoke intervals must be positive")

    def D(j):
        return d[j % n]

    alpha = np.array([D(j - 1) * D(j + 2) / ((D(j - 1) + D(j + 1)) * (D(j) + D(j + 2))) / n
                      for j in range(n)])
    beta = np.zeros(n)
    for i in range(n):
        c = D(i - 1) + D(i + 3)
        beta[(i + 1) % n] += D(i) * c
        beta[i] += D(i + 2) * c
    beta /= sum((D(j) + D(j + 2)) * (D(j - 1) + D(j + 3)) for j in range(n))
    return PolygonStencil(n, lam, d, alpha, beta)


def update_polygon_ring(stencil, p00, p10, p01, p11, a):
    """Refine the innermost ring of control points around a polygon.

    Sector ``i`` is the element at polygon vertex ``i``: ``p10[i]`` lies on
    spoke ``i``, ``p01[i]`` on spoke ``i + 1`` and ``p11[i]`` is the opposite
    corner of the element.

    Parameters
    ----------
    stencil : PolygonStencil
    p00, p10, p01, p11 : array_like, shape (n, dim)
    a : array_like, shape (n,)
        Interval following ``p10[i]`` along spoke ``i``.

    Returns
    -------
    dict
        New ``"p00"``, ``"p10"``, ``"p01"`` and ``"p11"`` arrays.
    """
    n, d = stencil.n, stencil.d
    arrays = [np.asarray(x, dtype=float) for x in (p00, p10, p01, p11)]
    a = np.asarray(a, dtype=float)
    if any(len(x) != n for x in arrays) or len(a) != n:
        raise ValueError(f"ring arrays must all have length {n}")
    p00, p10, p01, p11 = arrays
    new00 = stencil.matrix() @ p00
    new10, new01, new11 = np.empty_like(p10), np.empty_like(p01), np.empty_like(p11)
    for i in range(n):
        im, ip, ip2 = (i - 1) % n, (i + 1) % n, (i + 2) % n
        eu = edge_weights(0.0, d[i], a[i])
        ev = edge_weights(0.0, d[ip], a[ip])
        across = vertex_weights(d[im], 0.0, d[ip], a[ip])
        new10[i] = (eu[0] * (across[0] * p00[im] + across[1] * p00[i] + across[2] * p01[i])
                    + eu[1] * (across[0] * p01[im] + across[1] * p10[i] + across[2] * p11[i]))
        across = vertex_weights(d[ip2], 0.0, d[i], a[i])
        new01[i] = (ev[0] * (across[0] * p00[ip] + across[1] * p00[i] + across[2] * p10[i])
                    + ev[1] * (across[0] * p10[ip] + across[1] * p01[i] + across[2] * p11[i]))
        new11[i] = (eu[0] * ev[0] * p00[i] + eu[1] * ev[0] * p10[i]
                    + eu[0] * ev[1] * p01[i] + eu[1] * ev[1] * p11[i])
    return {"p00": new00, "p10": new10, "p01": new01, "p11": new11}


# --------------------------------------------------------------------------
# local tensor-product charts


def new_index_weights(J, e):
    """One-dimensional refinement weights of new chart index ``J``.

    Parameters
    ----------
    J : int
        New index along a chart axis, ``J >= -1``; index ``-1`` sits across a
        zero interval from index ``0``.
    e : callable
        ``e(j)`` returns the old interval between indices ``j`` and ``j + 1``.

    Returns
    -------
    dict
        Old index to weight (zero weights dropped).
    """
    if J == -1 or J % 2 == 0:
        j = -1 if J == -1 else J // 2
        w = vertex_weights(e(j - 2), e(j - 1), e(j), e(j + 1))
        pairs = zip((j - 1, j, j + 1), w)
    else:
        j = (J - 1) // 2
        w = edge_weights(e(j - 1), e(j), e(j + 1))
        pairs = zip((j, j + 1), w)
    return {k: w for k, w in pairs if w != 0.0}


def chart_rows(new_points, eu, ev):
    """Tensor-product refinement rows on a chart.

    Parameters
    ----------
    new_points : iterable of (int, int)
        New chart positions to compute.
    eu, ev : callable
        Old intervals along each axis, as in :func:`new_index_weights`.

    Returns
    -------
    dict
        New position to a dict of old position to weight.
    """
    out = {}
    for (J, K) in new_points:
        wu, wv = new_index_weights(J, eu), new_index_weights(K, ev)
        out[(J, K)] = {(j, k): a * b for j, a in wu.items() for k, b in wv.items()}
    return out


def update_outer_ring(points, eu, ev, targets=None):
    """Mid-knot insertion for the chart points beyond the innermost ring.

    Parameters
    ----------
    points : dict
        Old chart position ``(j, k)`` to point, ``-1 <= j, k <= 2``.
    eu, ev : sequence of float
        Old intervals ``e(-2) .. e(2)`` along each axis; ``e(-1)`` must be 0.
    targets : iterable of (int, int), optional
        New positions; defaults to every position with ``max(J, K) >= 2``
        inside ``[-1, 3]^2``.

    Returns
    -------
    dict
        New chart position to point.

    Raises
    ------
    KeyError
        If a required old point is missing.
    """
    fu = _interval_lookup(eu)
    fv = _interval_lookup(ev)
    if targets is None:
        targets = [(J, K) for K in range(-1, 4) for J in range(-1, 4) if max(J, K) >= 2]
    rows = chart_rows(targets, fu, fv)
    return {t: sum(w * np.asarray(points[s], dtype=float) for s, w in row.items())
            for t, row in rows.items()}


def _interval_lookup(e):
    e = list(e)

    def f(j):
        k = j + 2
        return e[k] if 0 <= k < len(e) else 0.0
    return f


# --------------------------------------------------------------------------
# first level


def _vertex_grid(conn, faces, v):
    """Positions ``(x, y)`` in ``{-1, 0, 1}^2`` around a vertex of valence <= 4."""
    ring, rfaces = conn.slots[v], conn.slot_faces[v]
    grid = {(0, 0): v}
    for k, off in enumerate([(1, 0), (0, 1), (-1, 0), (0, -1)]):
        grid[off] = ring[k]
    for k, off in enumerate([(1, 1), (-1, 1), (-1, -1), (1, -1)]):
        f = rfaces[k]
        if f is None:
            grid[off] = None
        else:
            face = faces[f]
            grid[off] = face[(face.index(v) + 2) % 4]
    return grid


def _axis_vertex(mesh, conn, v, plus, minus, rule):
    ll = mesh.interval(minus, conn.opposite(minus, v))
    rr = mesh.interval(plus, conn.opposite(plus, v))
    return rule(ll, mesh.interval(v, minus), mesh.interval(v, plus), rr)


def _tensor_row(grid, wx, wy, where):
    row = {}
    for ix, a in zip((-1, 0, 1), wx):
        for iy, b in zip((-1, 0, 1), wy):
            w = a * b
            if w == 0.0:
                continue
            p = grid[(ix, iy)]
            if p is None:
                raise ValueError(f"incomplete neighborhood at {where}")
            row[p] = row.get(p, 0.0) + w
    return row


def first_level_geometry(m, conversion):
    """Coordinates of a freshly converted hybrid mesh.

    Copies of regular vertices come from inserting a zero knot interval across
    every doubled mesh line.  Each polygon vertex is the knot-weighted face
    point of its sector face, built from the input spoke intervals.

    Parameters
    ----------
    m : KnotMesh
        Input mesh.
    conversion : HybridConversion
        Output of :func:`thnus.mesh.convert_topology`.

    Returns
    -------
    HybridMesh
    """
    conn = m.connectivity
    m = KnotMesh(m.vertices, m.faces, conversion.intervals)
    evs = set(m.extraordinary_vertices())
    rows = []
    for v, wedge in zip(conversion.source, conversion.wedge):
        if v in evs:
            rows.append(_sector_face_point(m, conn, evs, v, wedge[0]))
            continue
        ring, rfaces = conn.slots[v], conn.slot_faces[v]
        wedge = set(wedge)
        weights = [(0.0, 1.0, 0.0), (0.0, 1.0, 0.0)]
        for axis in (0, 1):
            positive = {rfaces[(axis - 1) % 4], rfaces[axis]} - {None}
            negative = set(rfaces) - {None} - positive
            if not positive or not negative:
                continue
            # a doubled line separates the two sides: split this axis
            before, after = _axis_vertex(m, conn, v, ring[axis], ring[axis + 2], split_weights)
            if wedge <= positive:
                weights[axis] = after
            elif wedge <= negative:
                weights[axis] = before
        grid = _vertex_grid(conn, m.faces, v)
        rows.append(_tensor_row(grid, weights[0], weights[1], f"input vertex {v}"))
    verts = np.array([sum(w * m.vertices[p] for p, w in row.items()) for row in rows],
                     dtype=float).reshape(-1, 3)
    return conversion.mesh.with_vertices(verts)


def _sector_face_point(m, conn, evs, v, f):
    face = m.faces[f]
    k = face.index(v)
    wa, x, wb = face[(k + 1) % 4], face[(k + 2) % 4], face[(k + 3) % 4]
    da, db = m.interval(v, wa), m.interval(v, wb)
    aa = da if wa in evs else m.interval(wa, conn.opposite(wa, v))
    ab = db if wb in evs else m.interval(wb, conn.opposite(wb, v))
    eu, ev = edge_weights(0.0, da, aa), edge_weights(0.0, db, ab)
    return {v: eu[0] * ev[0], wa: eu[1] * ev[0], wb: eu[0] * ev[1], x: eu[1] * ev[1]}


# --------------------------------------------------------------------------
# subsequent levels


def polygon_spokes(h, face):
    """Spoke intervals of a polygon face, ordered like its vertices."""
    conn = h.connectivity
    n = len(face)
    return np.array([h.interval(face[i], conn.opposite(face[i], face[(i + 1) % n])) for i in range(n)])


def refinement_operator(h, lam):
    """Sparse operator mapping control points of ``h`` to its refinement.

    Parameters
    ----------
    h : HybridMesh
    lam : float

    Returns
    -------
    refined : HybridMesh
        Refined topology (placeholder coordinates).
    R : scipy.sparse.csr_matrix
        ``(n_new, n_old)`` refinement matrix; rows sum to one.
    """
    lam = check_lambda(lam)
    conn = h.connectivity
    refined = refine_topology(h)
    poly_rows = {}
    for f, face in enumerate(h.faces):
        if len(face) != 4:
            q = stencil_weights(len(face), lam, polygon_spokes(h, face)).matrix()
            for i, v in enumerate(face):
                poly_rows[v] = {face[j]: q[i, j] for j in range(len(face))}
    rows, cols, vals = [], [], []
    for r, org in enumerate(refined.origin):
        kind = org[0]
        if kind == "v":
            v = org[1]
            if v in poly_rows:
                row = poly_rows[v]
            else:
                row = _vertex_row(h, conn, v)
        elif kind == "e":
            row = _edge_row(h, conn, org[1], org[2])
        else:
            row = _face_row(h, conn, org[1])
        for c, w in row.items():
            rows.append(r)
            cols.append(c)
            vals.append(w)
    R = sp.csr_matrix((vals, (rows, cols)), shape=(len(refined.origin), len(h.vertices)))
    R.sum_duplicates()
    return refined, R


def _vertex_row(h, conn, v):
    ring = conn.slots[v]
    grid = _vertex_grid(conn, h.faces, v)
    wx = _axis_vertex(h, conn, v, ring[0], ring[2], vertex_weights)
    wy = _axis_vertex(h, conn, v, ring[1], ring[3], vertex_weights)
    return _tensor_row(grid, wx, wy, f"vertex {v}")


def _edge_row(h, conn, a, b):
    ring, rfaces = conn.slots[a], conn.slot_faces[a]
    k = ring.index(b)
    plus, minus = ring[(k + 1) % 4], ring[(k + 3) % 4]
    ea, eb = edge_weights(h.interval(a, conn.opposite(a, b)), h.interval(a, b),
                          h.interval(b, conn.opposite(b, a)))
    across = _axis_vertex(h, conn, a, plus, minus, vertex_weights)
    fp, fm = rfaces[k], rfaces[(k + 3) % 4]
    dp = None if fp is None else _far_corner(h.faces[fp], a)
    dm = None if fm is None else _far_corner(h.faces[fm], a)
    row = {}
    for pa, pb, w in ((minus, dm, across[0]), (a, b, across[1]), (plus, dp, across[2])):
        if w == 0.0:
            continue
        if pa is None or pb is None:
            raise ValueError(f"incomplete neighborhood at edge ({a}, {b})")
        row[pa] = row.get(pa, 0.0) + ea * w
        row[pb] = row.get(pb, 0.0) + eb * w
    return row


def _far_corner(face, v):
    return face[(face.index(v) + 2) % 4]


def _face_row(h, conn, f):
    v0, v1, v2, v3 = h.faces[f]
    eu = edge_weights(h.interval(v0, conn.opposite(v0, v1)), h.interval(v0, v1),
                      h.interval(v1, conn.opposite(v1, v0)))
    ev = edge_weights(h.interval(v0, conn.opposite(v0, v3)), h.interval(v0, v3),
                      h.interval(v3, conn.opposite(v3, v0)))
    return {v0: eu[0] * ev[0], v1: eu[1] * ev[0], v2: eu[1] * ev[1], v3: eu[0] * ev[1]}


def refine_geometry(h, lam):
    """Apply one tuned subdivision step.

    Parameters
    ----------
    h : HybridMesh
        Mesh at level 1 or later.
    lam : float
        Tuning factor in (1/4, 1); ``0.5`` gives the untuned scheme.

    Returns
    -------
    HybridMesh
    """
    refined, R = refinement_operator(h, lam)
    return refined.with_vertices(R @ h.vertices)


# --------------------------------------------------------------------------
# limit surface sampling


def tessellate_limit(h, lam, samples=4, merge_tol=1e-9):
    """Triangulate the limit surface over every nonzero-measure element.

    Parameters
    ----------
    h : HybridMesh
    lam : float
    samples : int
        Points per element side (at least 2).
    merge_tol : float
        Samples closer than this are merged, which stitches neighboring
        elements into one watertight triangulation.

    Returns
    -------
    points : ndarray, shape (n, 3)
    triangles : ndarray, shape (m, 3)
    """
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components
    from scipy.spatial import cKDTree

    from .basis import element_space

    if samples < 2:
        raise ValueError("need at least two samples per side")
    space = element_space(h, lam)
    t = np.linspace(0.0, 1.0, samples)
    uu, vv = np.meshgrid(t, t, indexing="xy")
    uv = np.column_stack([uu.ravel(), vv.ravel()])
    raw, tris = [], []
    quad = np.array([(i + j * samples, i + 1 + j * samples, i + 1 + (j + 1) * samples, i + (j + 1) * samples)
                     for j in range(samples - 1) for i in range(samples - 1)])
    for el in space.elements:
        vals = el.evaluate(uv)[0]
        base = len(raw) * len(uv)
        raw.append(vals @ h.vertices[el.dofs])
        q = quad + base
        tris.append(np.concatenate([q[:, [0, 1, 2]], q[:, [0, 2, 3]]]))
    pts = np.concatenate(raw)
    pairs = cKDTree(pts).query_pairs(merge_tol, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(len(pts), len(pts)))
    _, label = connected_components(graph, directed=False)
    # number merged classes by first appearance so the output is deterministic
    first = np.full(label.max() + 1, -1)
    order = []
    for i, c in enumerate(label):
        if first[c] < 0:
            first[c] = len(order)
            order.append(i)
    tri = first[label[np.concatenate(tris)]]
    keep = (tri[:, 0] != tri[:, 1]) & (tri[:, 1] != tri[:, 2]) & (tri[:, 0] != tri[:, 2])
    return pts[order], tri[keep]


def format_obj(points, triangles, header=None):
    """OBJ text with ``v`` lines and 1-based triangle ``f`` lines."""
    out = []
    if header:
        out.append(f"# {header}")
    out.extend("v " + " ".join(repr(float(x)) for x in p) for p in np.asarray(points, dtype=float))
    out.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in np.asarray(triangles, dtype=int))
    return "\n".join(out) + "\n"
