"""Generators for the bundled unit-square test meshes.

Every mesh starts from a partition of the unit square into convex polygons.
Each polygon is split into quads around its centroid (one quad per corner),
which puts an extraordinary vertex of the polygon's valence at the centroid,
and the result is split bilinearly ``splits`` times so that the
extraordinary vertices sit well inside the square.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .mesh import KnotMesh, _zero_boundary_perpendicular, edge_key, format_mesh, parse_mesh

BUILTIN = ("square_ev35", "square_v6", "square_v7", "square_v8")


class _Builder:
    def __init__(self, points):
        self.points = [np.asarray(p, dtype=float) for p in points]
        self.mid = {}

    def add(self, p):
        self.points.append(np.asarray(p, dtype=float))
        return len(self.points) - 1

    def midpoint(self, a, b):
        key = edge_key(a, b)
        if key not in self.mid:
            self.mid[key] = self.add(0.5 * (self.points[a] + self.points[b]))
        return self.mid[key]


def polygons_to_quads(points, polygons, splits=2):
    """Split convex polygons into quads, then refine bilinearly.

    Parameters
    ----------
    points : array_like, shape (n, 2) or (n, 3)
    polygons : list of list of int
        Counter-clockwise polygons sharing vertex indices.
    splits : int
        Number of bilinear splits after the centroid split.

    Returns
    -------
    KnotMesh
        All intervals equal to one.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[1] == 2:
        pts = np.column_stack([pts, np.zeros(len(pts))])
    b = _Builder(pts)
    quads = []
    for poly in polygons:
        c = b.add(np.mean(pts[list(poly)], axis=0))
        n = len(poly)
        for i in range(n):
            quads.append((poly[i], b.midpoint(poly[i], poly[(i + 1) % n]), c,
                          b.midpoint(poly[i - 1], poly[i])))
    for _ in range(splits):
        b.mid = {}
        nxt = []
        for q in quads:
            c = b.add(np.mean([b.points[v] for v in q], axis=0))
            m = [b.midpoint(q[i], q[(i + 1) % 4]) for i in range(4)]
            for i in range(4):
                nxt.append((q[i], m[i], c, m[i - 1]))
        quads = nxt
    verts = np.array(b.points)
    intervals = {}
    for q in quads:
        for i in range(4):
            intervals[edge_key(q[i], q[(i + 1) % 4])] = 1.0
    return KnotMesh(verts, tuple(quads), intervals).validate()


def square_ev35(splits=2):
    """Unit square cut into a triangle and a pentagon (valences 3 and 5)."""
    pts = [(0, 0), (0.5, 0), (1, 0), (1, 0.5), (1, 1), (0, 1)]
    return polygons_to_quads(pts, [[1, 2, 3], [0, 1, 3, 4, 5]], splits)


def square_valence(n, splits=2):
    """Unit square as a single ``n``-gon (``n`` in 4..8) around one interior vertex.

    The corners are always polygon vertices; side midpoints are added in the
    order bottom, top, right, left.
    """
    if not 4 <= n <= 8:
        raise ValueError("valence must lie between 4 and 8")
    extra = [s for s in ("bottom", "top", "right", "left")][: n - 4]
    ring = [(0.0, 0.0)]
    if "bottom" in extra:
        ring.append((0.5, 0.0))
    ring.append((1.0, 0.0))
    if "right" in extra:
        ring.append((1.0, 0.5))
    ring.append((1.0, 1.0))
    if "top" in extra:
        ring.append((0.5, 1.0))
    ring.append((0.0, 1.0))
    if "left" in extra:
        ring.append((0.0, 0.5))
    return polygons_to_quads(ring, [list(range(len(ring)))], splits)


def ribbon(m, a, b):
    """Edges that must share the interval of edge ``(a, b)``.

    Walks across quads through opposite edges in both directions.
    """
    conn = m.connectivity
    seen = {edge_key(a, b)}
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        for u, w in ((x, y), (y, x)):
            f = conn.edge_face.get((u, w))
            if f is None:
                continue
            face = m.faces[f]
            k = face.index(u)
            opp = edge_key(face[(k + 2) % 4], face[(k + 3) % 4])
            if opp not in seen:
                seen.add(opp)
                stack.append(opp)
    return seen


def with_spoke_intervals(m, ev, values):
    """Copy of ``m`` with spoke ``i`` of vertex ``ev`` (and its ribbon) set to ``values[i]``.

    ``None`` entries leave a spoke unchanged.
    """
    conn = m.connectivity
    nbrs = conn.fans[ev][0]
    if len(values) != len(nbrs):
        raise ValueError(f"vertex {ev} has {len(nbrs)} spokes, got {len(values)} values")
    intervals = dict(m.intervals)
    for nb, val in zip(nbrs, values):
        if val is None:
            continue
        for key in ribbon(m, ev, nb):
            intervals[key] = float(val)
    return KnotMesh(m.vertices, m.faces, intervals).validate()


def nonuniform_ev35(d, splits=2):
    """``square_ev35`` with interval ``d`` on one spoke ribbon of each extraordinary vertex."""
    m = square_ev35(splits)
    for ev in m.extraordinary_vertices():
        n = len(m.connectivity.fans[ev][0])
        m = with_spoke_intervals(m, ev, [d] + [None] * (n - 1))
    return m


def distinct_spokes(m, seed_values=(1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5)):
    """Give every spoke of every extraordinary vertex its own interval."""
    for ev in m.extraordinary_vertices():
        n = len(m.connectivity.fans[ev][0])
        m = with_spoke_intervals(m, ev, list(seed_values[:n]))
    return m


def builtin_text(name):
    """Text of a bundled mesh file."""
    if name not in BUILTIN:
        raise KeyError(f"unknown bundled mesh {name!r}; choose from {', '.join(BUILTIN)}")
    return resources.files("thnus.data").joinpath(f"{name}.mesh").read_text(encoding="utf-8")


def load_builtin(name):
    """Parse a bundled mesh by name (without the ``.mesh`` suffix)."""
    return parse_mesh(builtin_text(name))


def generate_builtin(name):
    """Regenerate a bundled mesh and its file text."""
    if name == "square_ev35":
        m = square_ev35()
        note = "unit square, valence-3 and valence-5 interior vertices"
    elif name in BUILTIN:
        n = int(name[-1])
        m = square_valence(n)
        note = f"unit square, one valence-{n} interior vertex"
    else:
        raise KeyError(name)
    # write the semi-uniform convention explicitly: zero across the boundary
    m = KnotMesh(m.vertices, m.faces, _zero_boundary_perpendicular(m)).validate()
    return m, format_mesh(m, note)
