"""Basis functions on the elements of a hybrid mesh.

Regular elements carry the 16 bicubic B-splines of their 4x4 control grid.
An irregular element touches one polygon; its ``K = N + 12`` functions are
evaluated by refining the local control chart down to the tile that contains
the point and then evaluating the tile's bicubic B-splines.  An element whose
neighborhood holds more than one polygon corner is refined once and treated
through its four children.

Chart layout
------------
Chart positions ``(j, k)`` index control points of an irregular element in
its canonical frame: the polygon corner is ``(0, 0)``, ``u`` runs along
``j`` and ``v`` along ``k``.  Positions ``(-1, 0)`` and ``(0, -1)`` are the
next and previous polygon vertices and ``(-1, -1)`` is never used.  Local
index order: polygon vertices ``0 .. N - 1`` counter-clockwise from the
corner, then the remaining grid positions row by row (``k`` outer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import check_lambda
from .knots import span_basis
from .mesh import POLYGON, REGULAR, ZERO, classify_faces
from .subdivision import chart_rows, polygon_spokes, refinement_operator, stencil_weights

MAX_DEPTH = 52
LIMIT_TOL = 1e-13
CORNER = {(0, 0): 0, (-1, 0): 1, (0, -1): -1}


class ChartError(ValueError):
    """The neighborhood of an element cannot be turned into a local chart."""


class MacroElementRequired(ChartError):
    """The element sees more than one polygon corner."""


def k_chart_positions():
    """Grid positions of the ``N + 12`` chart in local order (after the polygon)."""
    return [(j, k) for k in range(-1, 3) for j in range(-1, 3)
            if (j, k) not in CORNER and (j, k) != (-1, -1)]


def m_chart_positions():
    """Grid positions of the ``N + 21`` refined chart (after the polygon)."""
    return [(j, k) for k in range(-1, 4) for j in range(-1, 4)
            if (j, k) not in CORNER and (j, k) != (-1, -1)]


def _chart_index(positions, n_sides):
    index = {pos: n_sides + i for i, pos in enumerate(positions)}
    index[(0, 0)] = 0
    index[(-1, 0)] = 1
    index[(0, -1)] = n_sides - 1
    return index


def _tile_positions(k):
    if k == 1:
        return [(j, kk) for kk in range(-1, 3) for j in range(0, 4)]
    if k == 2:
        return [(j, kk) for kk in range(0, 4) for j in range(0, 4)]
    if k == 3:
        return [(j, kk) for kk in range(0, 4) for j in range(-1, 3)]
    raise ValueError(f"tile index must be 1, 2 or 3, got {k}")


def _window(e):
    e = list(e)

    def f(j):
        k = j + 2
        return e[k] if 0 <= k < len(e) else 0.0
    return f


def chart_step(n_sides, polygon_matrix, eu, ev, targets):
    """Refinement matrix from a ``K`` chart to new chart positions.

    Parameters
    ----------
    n_sides : int
        Number of polygon vertices.
    polygon_matrix : ndarray, shape (N, N)
        Polygon rule in local polygon order.
    eu, ev : sequence of float
        Old intervals ``e(-2) .. e(2)`` along each axis.
    targets : list of (int, int)
        New grid positions; the ``N`` refined polygon vertices always come
        first.

    Returns
    -------
    ndarray, shape (N + len(targets), N + 12)
    """
    old = _chart_index(k_chart_positions(), n_sides)
    out = np.zeros((n_sides + len(targets), n_sides + 12))
    out[:n_sides, :n_sides] = polygon_matrix
    rows = chart_rows(targets, _window(eu), _window(ev))
    for r, pos in enumerate(targets):
        for src, w in rows[pos].items():
            if src not in old:
                if w != 0.0:
                    raise ChartError(f"chart point {pos} depends on {src} outside the chart")
                continue
            out[n_sides + r, old[src]] += w
    return out


# --------------------------------------------------------------------------
# tiles


@dataclass(frozen=True)
class TileAddress:
    """Position of a parameter point inside the tile decomposition.

    ``level`` is 0 and ``tile`` is 0 for the limit origin.
    """

    level: int
    tile: int
    xi: float
    eta: float

    @property
    def is_origin(self):
        return self.tile == 0


def locate_tile(u, v):
    """Tile containing ``(u, v)`` and the local coordinates inside it.

    Parameters
    ----------
    u, v : float
        Point of the closed unit square.

    Returns
    -------
    TileAddress

    Examples
    --------
    >>> locate_tile(0.6, 0.2)
    TileAddress(level=1, tile=1, xi=0.19999999999999996, eta=0.4)
    """
    u, v = float(u), float(v)
    if not (0.0 <= u <= 1.0 and 0.0 <= v <= 1.0):
        raise ValueError(f"point ({u}, {v}) lies outside the unit square")
    m = max(u, v)
    if m == 0.0:
        return TileAddress(0, 0, 0.0, 0.0)
    mant, e = math.frexp(m)
    n = -e + 1 + (mant == 0.5)
    if n > MAX_DEPTH:
        return TileAddress(0, 0, 0.0, 0.0)
    s = math.ldexp(1.0, n)
    h = 1.0 / s
    if u >= h and v < h:
        return TileAddress(n, 1, s * u - 1.0, s * v)
    if u >= h:
        return TileAddress(n, 2, s * u - 1.0, s * v - 1.0)
    return TileAddress(n, 3, s * u, s * v - 1.0)


def _locate_many(uv):
    uv = np.asarray(uv, dtype=float).reshape(-1, 2)
    if np.any(uv < 0.0) or np.any(uv > 1.0):
        raise ValueError("parameter points must lie in the unit square")
    m = uv.max(axis=1)
    mant, e = np.frexp(m)
    n = -e + 1 + (mant == 0.5)
    n = np.where(m == 0.0, 0, n)
    n = np.where(n > MAX_DEPTH, 0, n)
    s = np.ldexp(1.0, n)
    h = 1.0 / s
    u, v = uv[:, 0], uv[:, 1]
    k = np.where(u >= h, np.where(v < h, 1, 2), 3)
    k = np.where(n == 0, 0, k)
    xi = np.where(k == 3, s * u, s * u - 1.0)
    eta = np.where(k == 1, s * v, s * v - 1.0)
    return n, k, xi, eta, s


# --------------------------------------------------------------------------
# irregular patch


@dataclass(frozen=True, eq=False)
class IrregularPatch:
    """Local subdivision data of one irregular element.

    Attributes
    ----------
    n_sides : int
        Valence ``N`` of the adjacent polygon.
    lam : float
    spokes : ndarray, shape (N,)
        Spoke intervals in local polygon order.
    u_intervals, v_intervals : ndarray, shape (5,)
        Intervals ``e(-2) .. e(2)`` of the chart along each axis.
    S1, S1bar, S2, S2bar, S3, S3bar : ndarray
        Chart refinement matrices; ``S*`` map ``K`` points to ``K`` points
        and ``S*bar`` to the ``M = N + 21`` points of the larger chart.  From
        the third step on the knot ratios repeat, so ``S3`` and ``S3bar`` are
        reused forever.
    tiles : dict
        Tile index to the 16 rows of the larger chart it uses.
    dofs : ndarray or None
        Mesh vertex of each local control point when built from a mesh.
    rotation : int
        Position of the polygon corner inside the mesh face.
    """

    n_sides: int
    lam: float
    spokes: np.ndarray
    u_intervals: np.ndarray
    v_intervals: np.ndarray
    S1: np.ndarray
    S1bar: np.ndarray
    S2: np.ndarray
    S2bar: np.ndarray
    S3: np.ndarray
    S3bar: np.ndarray
    tiles: dict
    dofs: np.ndarray | None = None
    rotation: int = 0
    _levels: list = field(default_factory=list, repr=False)

    @property
    def K(self):
        return self.n_sides + 12

    @property
    def M(self):
        return self.n_sides + 21

    def step(self, level):
        """``S`` matrix taking the chart at ``level - 1`` to ``level``."""
        return (self.S1, self.S2, self.S3)[min(level, 3) - 1]

    def step_bar(self, level):
        return (self.S1bar, self.S2bar, self.S3bar)[min(level, 3) - 1]

    def chart_matrix(self, level):
        """Product ``S_level ... S_1`` (identity for level 0)."""
        if not self._levels:
            self._levels.append(np.eye(self.K))
        while len(self._levels) <= level:
            n = len(self._levels)
            self._levels.append(self.step(n) @ self._levels[-1])
        return self._levels[level]

    def tile_matrix(self, level, k):
        """Matrix mapping the ``K`` controls to the 16 controls of a tile."""
        return self.step_bar(level)[self.tiles[k]] @ self.chart_matrix(level - 1)

    @cached_property
    def limit_weights(self):
        """Weights of the ``K`` controls for the surface point at the corner."""
        power = self.S3.copy()
        for _ in range(100000):
            nxt = self.S3 @ power
            if np.max(np.abs(nxt - power)) < LIMIT_TOL:
                power = nxt
                break
            power = nxt
        else:
            raise ArithmeticError("power iteration for the limit point did not stagnate")
        return power[0] @ self.chart_matrix(2)

    def interval_windows(self, level):
        """Knot intervals ``e(-3) .. e(4)`` along ``u`` and ``v`` of the level-``level`` chart."""
        return _level_window(self.u_intervals, level), _level_window(self.v_intervals, level)


def _level_window(e, level):
    # the element's intervals halve and duplicate with every level
    right = [e[2], e[3], e[4]]
    seq = [right[min(i >> level, 2)] for i in range(5)] if level > 0 else right + [0.0, 0.0]
    return np.array([e[0], e[0], e[1]] + seq, dtype=float)


def knot_vectors(level, patch):
    """Tile knot-interval vectors along ``u`` and ``v``, scaled by the element interval.

    Parameters
    ----------
    level : int
        Level class 1, 2 or 3 (3 stands for every deeper level).
    patch : IrregularPatch

    Returns
    -------
    xi_vec, theta_vec : ndarray, shape (8,)
        Intervals ``e(-3) .. e(4)`` of the level's chart, divided by the
        length of the first element interval at that level.
    """
    if level not in (1, 2, 3):
        raise ValueError("level class must be 1, 2 or 3")
    wu, wv = patch.interval_windows(level)
    return wu / wu[3], wv / wv[3]


def build_patch_from_intervals(n_sides, lam, spokes, u_intervals, v_intervals):
    """Assemble an irregular patch from its knot data alone.

    Parameters
    ----------
    n_sides : int
    lam : float
    spokes : array_like, shape (N,)
        Spoke intervals in local polygon order; ``spokes[0]`` must equal
        ``u_intervals[2]`` and ``spokes[1]`` must equal ``v_intervals[2]``.
    u_intervals, v_intervals : array_like, shape (5,)
        ``e(-2) .. e(2)`` along each axis with ``e(-1) = 0``.

    Returns
    -------
    IrregularPatch
    """
    lam = check_lambda(lam)
    spokes = np.asarray(spokes, dtype=float)
    eu = np.asarray(u_intervals, dtype=float)
    ev = np.asarray(v_intervals, dtype=float)
    if eu.shape != (5,) or ev.shape != (5,):
        raise ValueError("interval windows need five entries")
    if eu[1] != 0.0 or ev[1] != 0.0:
        raise ChartError("the polygon side of the chart must carry zero intervals")
    if eu[2] <= 0.0 or ev[2] <= 0.0:
        raise ChartError("the element must have positive intervals")
    q = stencil_weights(n_sides, lam, spokes).matrix()
    k_pos, m_pos = k_chart_positions(), m_chart_positions()
    mats = []
    for level in range(3):
        wu = _level_window(eu, level)[1:6]
        wv = _level_window(ev, level)[1:6]
        mats.append((chart_step(n_sides, q, wu, wv, k_pos), chart_step(n_sides, q, wu, wv, m_pos)))
    m_index = _chart_index(m_pos, n_sides)
    tiles = {k: np.array([m_index[p] for p in _tile_positions(k)]) for k in (1, 2, 3)}
    return IrregularPatch(n_sides, lam, spokes, eu, ev,
                          mats[0][0], mats[0][1], mats[1][0], mats[1][1], mats[2][0], mats[2][1],
                          tiles)


def _walk(conn, a, b):
    """Vertex beyond ``b`` when walking straight from ``a`` (``None`` if missing)."""
    if a is None or b is None:
        return None
    return conn.opposite(b, a)


def _rotate(face, r):
    return tuple(face[(i + r) % 4] for i in range(4))


def element_chart(h, face_id):
    """Map chart positions of an irregular element to mesh vertices.

    Returns
    -------
    grid : dict
        Position to vertex (``None`` where the mesh ends).
    polygon : tuple
        Polygon vertices in local order.
    rotation : int
        Index of the polygon corner in the mesh face.
    """
    conn = h.connectivity
    face = h.faces[face_id]
    corners = [r for r, v in enumerate(face) if v in h.polygon_vertex]
    if len(corners) != 1:
        raise MacroElementRequired(f"face {face_id} has {len(corners)} polygon corners")
    r = corners[0]
    p0, c1, c2, c3 = _rotate(face, r)
    grid = {(0, 0): p0, (1, 0): c1, (1, 1): c2, (0, 1): c3}
    grid[(-1, 0)] = _walk(conn, c1, p0)
    grid[(2, 0)] = _walk(conn, p0, c1)
    grid[(-1, 1)] = _walk(conn, c2, c3)
    grid[(2, 1)] = _walk(conn, c3, c2)
    for j in range(-1, 3):
        grid[(j, -1)] = _walk(conn, grid[(j, 1)], grid[(j, 0)])
        grid[(j, 2)] = _walk(conn, grid[(j, 0)], grid[(j, 1)])
    grid[(3, 0)] = _walk(conn, c1, grid[(2, 0)])
    grid[(0, 3)] = _walk(conn, c3, grid[(0, 2)])
    grid[(-2, 1)] = _walk(conn, c3, grid[(-1, 1)])
    grid[(1, -2)] = _walk(conn, c1, grid[(1, -1)])
    pf, pos = h.polygon_vertex[p0]
    poly = h.faces[pf]
    n = len(poly)
    local = tuple(poly[(pos + m) % n] for m in range(n))
    if grid[(-1, 0)] != local[1] or grid[(0, -1)] != local[-1]:
        raise ChartError(f"face {face_id} is not oriented consistently with its polygon")
    return grid, local, r, pf


def build_patch(h, face_id, lam):
    """Irregular patch of a mesh face that touches exactly one polygon.

    Parameters
    ----------
    h : HybridMesh
    face_id : int
        Index of an irregular face.
    lam : float

    Returns
    -------
    IrregularPatch
        With ``dofs`` set to the mesh vertices in local order.

    Raises
    ------
    MacroElementRequired
        If the chart reaches a second polygon.
    ChartError
        If the mesh ends inside the chart.
    """
    grid, local, r, pf = element_chart(h, face_id)
    others = set(h.polygon_vertex) - set(local)
    dofs = list(local)
    for pos in k_chart_positions():
        v = grid[pos]
        if v is None:
            raise ChartError(f"face {face_id}: chart position {pos} lies outside the mesh")
        if v in others:
            raise MacroElementRequired(f"face {face_id} sees a second polygon")
        dofs.append(v)
    if len(set(dofs)) != len(dofs):
        raise MacroElementRequired(f"face {face_id}: chart folds onto itself")
    iv = h.interval
    eu = [iv(grid[(-1, 1)], grid[(-2, 1)]), iv(grid[(-1, 0)], grid[(0, 0)]),
          iv(grid[(0, 0)], grid[(1, 0)]), iv(grid[(1, 0)], grid[(2, 0)]), iv(grid[(2, 0)], grid[(3, 0)])]
    ev = [iv(grid[(1, -1)], grid[(1, -2)]), iv(grid[(0, -1)], grid[(0, 0)]),
          iv(grid[(0, 0)], grid[(0, 1)]), iv(grid[(0, 1)], grid[(0, 2)]), iv(grid[(0, 2)], grid[(0, 3)])]
    spokes = polygon_spokes(h, h.faces[pf])
    pos = h.faces[pf].index(local[0])
    n = len(local)
    spokes = np.array([spokes[(pos + m) % n] for m in range(n)])
    patch = build_patch_from_intervals(n, lam, spokes, eu, ev)
    return IrregularPatch(patch.n_sides, patch.lam, patch.spokes, patch.u_intervals, patch.v_intervals,
                          patch.S1, patch.S1bar, patch.S2, patch.S2bar, patch.S3, patch.S3bar,
                          patch.tiles, np.array(dofs), r)


def eval_patch(patch, uv, derivatives=True):
    """Values (and canonical-frame derivatives) of the ``K`` patch functions.

    Parameters
    ----------
    patch : IrregularPatch
    uv : array_like, shape (m, 2)
        Points in the canonical frame (polygon corner at the origin).
    derivatives : bool

    Returns
    -------
    values : ndarray, shape (m, K)
    du, dv : ndarray, shape (m, K)
        Only when ``derivatives`` is true.  Infinite at the corner.
    """
    uv = np.asarray(uv, dtype=float).reshape(-1, 2)
    n, k, xi, eta, scale = _locate_many(uv)
    m = len(uv)
    values = np.zeros((m, patch.K))
    du = np.zeros((m, patch.K))
    dv = np.zeros((m, patch.K))
    origin = n == 0
    if np.any(origin):
        values[origin] = patch.limit_weights
        du[origin] = np.inf
        dv[origin] = np.inf
    for lvl, tile in sorted(set(zip(n[~origin].tolist(), k[~origin].tolist()))):
        sel = (n == lvl) & (k == tile)
        wu, wv = patch.interval_windows(min(lvl, 3))
        wu = wu[1:] if tile in (1, 2) else wu[:-1]
        wv = wv[:-1] if tile == 1 else wv[1:]
        bu, dbu = span_basis(wu, xi[sel])
        bv, dbv = span_basis(wv, eta[sel])
        mat = patch.tile_matrix(lvl, tile)
        # tile controls are ordered with j fastest
        values[sel] = np.einsum("pb,pa->pba", bv, bu).reshape(-1, 16) @ mat
        if derivatives:
            s = math.ldexp(1.0, lvl)
            du[sel] = s * (np.einsum("pb,pa->pba", bv, dbu).reshape(-1, 16) @ mat)
            dv[sel] = s * (np.einsum("pb,pa->pba", dbv, bu).reshape(-1, 16) @ mat)
    if derivatives:
        return values, du, dv
    return values


def eval_basis(patch, u, v):
    """Values of the ``K`` functions of an irregular patch at one canonical point."""
    return eval_patch(patch, [[u, v]], derivatives=False)[0]


def eval_basis_grad(patch, u, v):
    """Gradients ``(K, 2)`` of the patch functions at one canonical point.

    Raises
    ------
    ValueError
        At the corner, where the derivatives are unbounded.
    """
    if u == 0.0 and v == 0.0:
        raise ValueError("derivatives are unbounded at the extraordinary corner")
    _, du, dv = eval_patch(patch, [[u, v]])
    if not np.all(np.isfinite(du)):
        raise ValueError("point too close to the extraordinary corner")
    return np.stack([du[0], dv[0]], axis=-1)


def limit_point(patch, controls):
    """Surface point at the extraordinary corner of a patch.

    Parameters
    ----------
    patch : IrregularPatch
    controls : array_like, shape (K, dim)
    """
    controls = np.asarray(controls, dtype=float)
    if len(controls) != patch.K:
        raise ValueError(f"expected {patch.K} control points, got {len(controls)}")
    return patch.limit_weights @ controls


# --------------------------------------------------------------------------
# quadrature


GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(4)
GAUSS_NODES = 0.5 * (GAUSS_NODES + 1.0)
GAUSS_WEIGHTS = 0.5 * GAUSS_WEIGHTS


def gauss_square(lo=(0.0, 0.0), size=1.0):
    """4x4 Gauss-Legendre points and weights on an axis-aligned square."""
    gu, gv = np.meshgrid(GAUSS_NODES, GAUSS_NODES, indexing="xy")
    wu, wv = np.meshgrid(GAUSS_WEIGHTS, GAUSS_WEIGHTS, indexing="xy")
    pts = np.column_stack([lo[0] + size * gu.ravel(), lo[1] + size * gv.ravel()])
    return pts, (wu * wv).ravel() * size * size


def tile_quadrature(depth):
    """Gauss points on the three tiles of levels ``1 .. depth`` plus the innermost square."""
    pts, wts = [], []
    for n in range(1, depth + 1):
        h = math.ldexp(1.0, -n)
        for lo in ((h, 0.0), (h, h), (0.0, h)):
            p, w = gauss_square(lo, h)
            pts.append(p)
            wts.append(w)
    p, w = gauss_square((0.0, 0.0), math.ldexp(1.0, -depth))
    pts.append(p)
    wts.append(w)
    return np.concatenate(pts), np.concatenate(wts)


# --------------------------------------------------------------------------
# elements


_STEP = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _to_canonical(uv, r):
    uv = np.asarray(uv, dtype=float)
    for _ in range(r):
        uv = np.column_stack([uv[:, 1], 1.0 - uv[:, 0]])
    return uv


def _from_canonical(uv, r):
    uv = np.asarray(uv, dtype=float)
    for _ in range(r):
        uv = np.column_stack([1.0 - uv[:, 1], uv[:, 0]])
    return uv


def _jacobian_power(r):
    return np.linalg.matrix_power(_STEP, r)


class RegularElement:
    """Bicubic B-spline element on a 4x4 control grid."""

    kind = REGULAR

    def __init__(self, face_id, dofs, u_window, v_window):
        self.face_id = face_id
        self.dofs = np.asarray(dofs)
        self.u_window = np.asarray(u_window, dtype=float)
        self.v_window = np.asarray(v_window, dtype=float)

    def evaluate(self, uv):
        uv = np.asarray(uv, dtype=float).reshape(-1, 2)
        bu, dbu = span_basis(self.u_window, uv[:, 0])
        bv, dbv = span_basis(self.v_window, uv[:, 1])
        val = np.einsum("pb,pa->pba", bv, bu).reshape(-1, 16)
        du = np.einsum("pb,pa->pba", bv, dbu).reshape(-1, 16)
        dv = np.einsum("pb,pa->pba", dbv, bu).reshape(-1, 16)
        return val, du, dv

    def quadrature(self, kind="reduced", depth=10):
        return gauss_square()


class IrregularElement:
    """Element touching one polygon, evaluated through its patch."""

    kind = "irregular"

    def __init__(self, face_id, patch):
        self.face_id = face_id
        self.patch = patch
        self.dofs = patch.dofs

    def evaluate(self, uv):
        r = self.patch.rotation
        uv = np.asarray(uv, dtype=float).reshape(-1, 2)
        val, du, dv = eval_patch(self.patch, _to_canonical(uv, r))
        # chain rule: gradient in face coordinates = J^T gradient in the canonical
        # frame; J is a signed permutation, applied without 0 * inf at the corner
        jac = _jacobian_power(r)
        grads = (du, dv)
        gu = jac[int(jac[0, 0] == 0), 0] * grads[int(jac[0, 0] == 0)]
        gv = jac[int(jac[0, 1] == 0), 1] * grads[int(jac[0, 1] == 0)]
        return val, gu, gv

    def quadrature(self, kind="reduced", depth=10):
        if kind == "reduced":
            return gauss_square()
        if kind != "full":
            raise ValueError(f"unknown quadrature kind {kind!r}")
        pts, wts = tile_quadrature(depth)
        return _from_canonical(pts, self.patch.rotation), wts


class MacroElement:
    """Element evaluated through the four children of one refinement step.

    Attributes
    ----------
    children : list
        ``(child element, weights)`` per quarter, where ``weights`` maps the
        child's controls onto this element's controls.
    """

    kind = "macro"
    OFFSETS = ((0.0, 0.0), (0.5, 0.0), (0.5, 0.5), (0.0, 0.5))

    def __init__(self, face_id, dofs, children):
        self.face_id = face_id
        self.dofs = np.asarray(dofs)
        self.children = children

    def _quarter(self, uv):
        uv = np.asarray(uv, dtype=float).reshape(-1, 2)
        right = uv[:, 0] > 0.5
        top = uv[:, 1] > 0.5
        return np.where(top, np.where(right, 2, 3), np.where(right, 1, 0))

    def evaluate(self, uv):
        uv = np.asarray(uv, dtype=float).reshape(-1, 2)
        q = self._quarter(uv)
        val = np.zeros((len(uv), len(self.dofs)))
        du, dv = np.zeros_like(val), np.zeros_like(val)
        for c, (child, weights) in enumerate(self.children):
            sel = q == c
            if not np.any(sel):
                continue
            local = 2.0 * (uv[sel] - np.array(self.OFFSETS[c]))
            cv, cu, cw = child.evaluate(np.clip(local, 0.0, 1.0))
            val[sel] = cv @ weights
            du[sel] = 2.0 * (cu @ weights)
            dv[sel] = 2.0 * (cw @ weights)
        return val, du, dv

    def quadrature(self, kind="reduced", depth=10):
        pts, wts = [], []
        for c, (child, _) in enumerate(self.children):
            p, w = child.quadrature(kind, depth)
            pts.append(0.5 * p + np.array(self.OFFSETS[c]))
            wts.append(0.25 * w)
        return np.concatenate(pts), np.concatenate(wts)


def _line(conn, a, b):
    """Vertices at positions ``-2 .. 3`` of the mesh line through ``a`` and ``b``."""
    m1 = _walk(conn, b, a)
    m2 = _walk(conn, a, m1)
    p2 = _walk(conn, a, b)
    p3 = _walk(conn, b, p2)
    return [m2, m1, a, b, p2, p3]


def regular_element(h, face_id):
    """Bicubic element of a face away from every polygon."""
    conn = h.connectivity
    v0, v1, v2, v3 = h.faces[face_id]
    row0 = _line(conn, v0, v1)
    row1 = _line(conn, v3, v2)
    iv = h.interval
    eu = [0.0] + [iv(row0[i], row0[i + 1]) for i in range(5)] + [0.0]
    col0 = _line(conn, v0, v3)
    ev = [0.0] + [iv(col0[i], col0[i + 1]) for i in range(5)] + [0.0]
    dofs = np.empty((4, 4), dtype=int)
    for a, j in enumerate(range(1, 5)):
        col = _line(conn, row0[j], row1[j]) if row0[j] is not None and row1[j] is not None else [None] * 6
        for b in range(4):
            v = col[b + 1]
            if v is None:
                raise ChartError(f"face {face_id}: control grid leaves the mesh")
            dofs[b, a] = v
    return RegularElement(face_id, dofs.ravel(), eu, ev)


def macro_subdivide(h, face_id, lam, refined=None):
    """Treat a face through the four faces of one refinement step.

    Parameters
    ----------
    h : HybridMesh
    face_id : int
        Nonzero-measure face whose neighborhood holds several polygon corners.
    lam : float
    refined : tuple, optional
        Cached ``(mesh, R)`` from :func:`thnus.subdivision.refinement_operator`.

    Returns
    -------
    MacroElement
    """
    face = h.faces[face_id]
    corners = sum(v in h.polygon_vertex for v in face)
    if corners == 1:
        try:
            build_patch(h, face_id, lam)
        except MacroElementRequired:
            pass
        else:
            raise ValueError(f"face {face_id} sees a single polygon; no macro element needed")
    if refined is None:
        refined = refinement_operator(h, lam)
    fine, R = refined
    children = [c for c, p in enumerate(fine.parent) if p == face_id]
    if len(children) != 4:
        raise ChartError(f"face {face_id} does not split into four children")
    try:
        elems = [make_element(fine, c, lam, allow_macro=False) for c in children]
    except MacroElementRequired as exc:
        raise MacroElementRequired(f"face {face_id}: polygons too close for a single macro split ({exc})") from None
    dofs = sorted({int(x) for e in elems for x in R[e.dofs].indices})
    col = {v: i for i, v in enumerate(dofs)}
    out = []
    for e in elems:
        sub = R[e.dofs].tocoo()
        w = np.zeros((len(e.dofs), len(dofs)))
        np.add.at(w, (sub.row, [col[c] for c in sub.col]), sub.data)
        out.append((e, w))
    return MacroElement(face_id, dofs, out)


def make_element(h, face_id, lam, allow_macro=True, refined=None):
    """Element object for a nonzero-measure face."""
    face = h.faces[face_id]
    if not any(v in h.polygon_vertex for v in face):
        return regular_element(h, face_id)
    try:
        return IrregularElement(face_id, build_patch(h, face_id, lam))
    except MacroElementRequired:
        if not allow_macro:
            raise
        return macro_subdivide(h, face_id, lam, refined)


@dataclass
class ElementSpace:
    """All nonzero-measure elements of a hybrid mesh with their basis data."""

    mesh: object
    lam: float
    elements: list


def element_space(h, lam):
    """Build every element of a hybrid mesh.

    Parameters
    ----------
    h : HybridMesh
    lam : float

    Returns
    -------
    ElementSpace
    """
    lam = check_lambda(lam)
    kinds = classify_faces(h)
    refined = None
    elements = []
    for f, kind in enumerate(kinds):
        if kind in (ZERO, POLYGON):
            continue
        if kind == REGULAR:
            elements.append(regular_element(h, f))
            continue
        try:
            elements.append(IrregularElement(f, build_patch(h, f, lam)))
        except MacroElementRequired:
            if refined is None:
                refined = refinement_operator(h, lam)
            elements.append(macro_subdivide(h, f, lam, refined))
    return ElementSpace(h, lam, elements)


# --------------------------------------------------------------------------
# property checks


def partition_of_unity(space, n_points=1000, seed=0, kinds=("irregular", "macro")):
    """Worst partition-of-unity error and smallest value at random points.

    Returns
    -------
    max_error, min_value : float
    """
    rng = np.random.default_rng(seed)
    err, low = 0.0, np.inf
    for el in space.elements:
        if el.kind not in kinds:
            continue
        val = el.evaluate(rng.random((n_points, 2)))[0]
        err = max(err, float(np.abs(val.sum(axis=1) - 1.0).max()))
        low = min(low, float(val.min()))
    return err, low


def refinement_residuals(h, lam, n_points=200, seed=0, refined=None):
    """Check that coarse functions and geometry are reproduced after one refinement.

    Every coarse element is sampled at random points; each point is evaluated
    again in the child face that contains it, and the fine values pulled
    back through the refinement operator must match the coarse values.

    Returns
    -------
    refinability : float
        Max-norm mismatch of the basis function values.
    invariance : float
        Max-norm mismatch of the mapped points.
    """
    rng = np.random.default_rng(seed)
    fine, R = refined if refined is not None else refinement_operator(h, lam)
    coarse = element_space(h, lam)
    fine_space = element_space(fine, lam)
    by_face = {el.face_id: el for el in fine_space.elements}
    children = {}
    for c, p in enumerate(fine.parent):
        children.setdefault(p, []).append(c)
    Xf = R @ h.vertices
    res_f = res_x = 0.0
    for el in coarse.elements:
        kids = children[el.face_id]
        uv = rng.random((n_points, 2))
        quarter = MacroElement._quarter(None, uv)
        vc = el.evaluate(uv)[0]
        xc = vc @ h.vertices[el.dofs]
        for q, kid in enumerate(kids):
            sel = quarter == q
            if not np.any(sel):
                continue
            child = by_face[kid]
            local = 2.0 * (uv[sel] - np.array(MacroElement.OFFSETS[q]))
            vf = child.evaluate(local)[0]
            pulled = (R[child.dofs].T @ vf.T).T
            cols = np.asarray(el.dofs)
            res_f = max(res_f, float(np.abs(pulled[:, cols] - vc[sel]).max()))
            mask = np.ones(pulled.shape[1], dtype=bool)
            mask[cols] = False
            res_f = max(res_f, float(np.abs(pulled[:, mask]).max(initial=0.0)))
            res_x = max(res_x, float(np.abs(vf @ Xf[child.dofs] - xc[sel]).max()))
    return res_f, res_x
