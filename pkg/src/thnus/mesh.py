"""Knotted quad meshes, hybrid meshes and their topological refinement.

A :class:`KnotMesh` is the all-quad input control mesh with one knot interval
per edge.  :func:`to_hybrid_topology` turns it into a :class:`HybridMesh` in
which every extraordinary vertex has become a polygonal face surrounded by
zero-width spoke quads, and :func:`refine_topology` splits that hybrid mesh
once.  Geometry is handled by :mod:`thnus.subdivision`.

Conversion rule
---------------
Starting from every spoke of every extraordinary vertex a mesh line is traced
straight through regular vertices until it meets the boundary, another
extraordinary vertex or itself.  Every edge on such a line is doubled into a
zero-width strip quad and every vertex is split into one copy per wedge of
faces between doubled edges.  An extraordinary vertex then becomes an
``N``-gon, a crossing of two lines becomes a zero quad, and a vertex on one
line becomes two copies joined by a zero edge.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

INTERVAL_TOL = 1e-12


class MeshError(ValueError):
    """Base class for invalid mesh input."""


class ParseError(MeshError):
    """Malformed mesh file."""


class TopologyError(MeshError):
    """Non-quad face, non-manifold edge or unsupported configuration."""


class IntervalError(MeshError):
    """Negative interval or mismatched opposite edges."""


def edge_key(a, b):
    """Undirected edge key: the sorted vertex pair."""
    return (a, b) if a < b else (b, a)


class Connectivity:
    """Adjacency of an oriented polygon mesh.

    Parameters
    ----------
    faces : sequence of tuple of int
        Counter-clockwise vertex loops.
    n_vertices : int
        Number of vertices.

    Attributes
    ----------
    edge_face : dict
        Directed edge ``(a, b)`` to the face that traverses it.
    fans : list
        Per vertex ``(neighbors, faces, closed)`` in counter-clockwise order;
        ``faces[k]`` lies between ``neighbors[k]`` and ``neighbors[k + 1]``.
    """

    def __init__(self, faces, n_vertices):
        self.n_vertices = n_vertices
        self.edge_face = {}
        incident = [[] for _ in range(n_vertices)]
        for f, face in enumerate(faces):
            if len(set(face)) != len(face):
                raise TopologyError(f"face {f} repeats a vertex")
            n = len(face)
            for k in range(n):
                a, b = face[k], face[(k + 1) % n]
                if (a, b) in self.edge_face:
                    raise TopologyError(f"edge ({a}, {b}) is used twice with the same orientation")
                self.edge_face[(a, b)] = f
                incident[a].append((f, face[(k + 1) % n], face[k - 1]))
        self.fans = []
        for v in range(n_vertices):
            self.fans.append(self._fan(v, incident[v]))

    def _fan(self, v, corners):
        if not corners:
            return [], [], False
        by_next = {nxt: (f, prv) for f, nxt, prv in corners}
        start = None
        for f, nxt, prv in sorted(corners):
            if (nxt, v) not in self.edge_face:
                start = (f, nxt, prv)
                break
        closed = start is None
        if closed:
            start = min(corners)
        f, nxt, prv = start
        nbrs, fs = [nxt], []
        while True:
            fs.append(f)
            nbrs.append(prv)
            if prv not in by_next:
                break
            f, prv_next = by_next[prv]
            if closed and f == start[0]:
                nbrs.pop()
                break
            prv = prv_next
        if len(fs) != len(corners):
            raise TopologyError(f"vertex {v} is not a manifold vertex")
        return nbrs, fs, closed

    def is_boundary(self, v):
        nbrs, fs, closed = self.fans[v]
        return bool(fs) and not closed

    def valence(self, v):
        """Number of faces around ``v``."""
        return len(self.fans[v][1])

    @cached_property
    def slots(self):
        """Four-slot neighbor ring for vertices with at most four neighbors.

        Opposite neighbors sit two slots apart; missing neighbors are ``None``.
        """
        out = []
        for nbrs, fs, closed in self.fans:
            if len(nbrs) <= 4:
                out.append(list(nbrs) + [None] * (4 - len(nbrs)))
            else:
                out.append(None)
        return out

    @cached_property
    def slot_faces(self):
        out = []
        for nbrs, fs, closed in self.fans:
            out.append(list(fs) + [None] * (4 - len(fs)) if len(fs) <= 4 else None)
        return out

    def opposite(self, v, u):
        """Neighbor of ``v`` straight across from neighbor ``u`` (or ``None``)."""
        if v is None or u is None:
            return None
        ring = self.slots[v]
        if ring is None:
            return None
        return ring[(ring.index(u) + 2) % 4]

    def boundary_edges(self):
        return [(a, b) for (a, b) in self.edge_face if (b, a) not in self.edge_face]


@dataclass(frozen=True)
class KnotMesh:
    """All-quad input control mesh with per-edge knot intervals.

    Attributes
    ----------
    vertices : ndarray, shape (n, 3)
    faces : tuple of 4-tuples
        Counter-clockwise quads.
    intervals : dict
        Undirected edge key to knot interval.
    """

    vertices: np.ndarray
    faces: tuple
    intervals: dict

    @cached_property
    def connectivity(self):
        return Connectivity(self.faces, len(self.vertices))

    def interval(self, a, b):
        if a is None or b is None:
            return 0.0
        return self.intervals[edge_key(a, b)]

    def validate(self):
        """Check the manifold, quad and interval invariants; return ``self``."""
        for f, face in enumerate(self.faces):
            if len(face) != 4:
                raise TopologyError(f"face {f} is not a quadrilateral")
        conn = self.connectivity
        for (a, b) in conn.edge_face:
            if edge_key(a, b) not in self.intervals:
                raise IntervalError(f"edge ({a}, {b}) has no interval")
        for key, value in self.intervals.items():
            if value < 0:
                raise IntervalError(f"negative interval on edge {key}")
        _check_opposite_edges(self.faces, self.intervals)
        return self

    def extraordinary_vertices(self):
        conn = self.connectivity
        return [v for v in range(len(self.vertices))
                if not conn.is_boundary(v) and conn.valence(v) not in (0, 4)]


def _check_opposite_edges(faces, intervals):
    for f, face in enumerate(faces):
        if len(face) != 4:
            continue
        e = [intervals[edge_key(face[k], face[(k + 1) % 4])] for k in range(4)]
        if abs(e[0] - e[2]) > INTERVAL_TOL or abs(e[1] - e[3]) > INTERVAL_TOL:
            raise IntervalError(f"opposite edges of face {f} carry different intervals {e}")


@dataclass(frozen=True)
class HybridMesh:
    """Quad and polygon control mesh produced by conversion or refinement.

    Attributes
    ----------
    vertices : ndarray, shape (n, 3)
    faces : tuple of tuple of int
        Quads have four vertices; every other face is a polygon.
    intervals : dict
        Undirected edge key to knot interval.
    levels : tuple of int
        Refinement level of each face (1 right after conversion).
    origin : tuple or None
        For refined meshes, how each vertex arose: ``("v", old)``,
        ``("e", a, b)`` or ``("f", face)``.
    parent : tuple or None
        Parent face of each face for refined meshes.
    """

    vertices: np.ndarray
    faces: tuple
    intervals: dict
    levels: tuple
    origin: tuple | None = field(default=None, compare=False)
    parent: tuple | None = field(default=None, compare=False)

    @cached_property
    def connectivity(self):
        return Connectivity(self.faces, len(self.vertices))

    def interval(self, a, b):
        if a is None or b is None:
            return 0.0
        return self.intervals[edge_key(a, b)]

    def is_polygon(self, f):
        return len(self.faces[f]) != 4

    @cached_property
    def polygon_vertex(self):
        """Map from polygon vertex to ``(face, position)``."""
        out = {}
        for f, face in enumerate(self.faces):
            if len(face) != 4:
                for k, v in enumerate(face):
                    out[v] = (f, k)
        return out

    def face_intervals(self, f):
        """Intervals ``(u, v)`` of a quad along its first and second edge."""
        a, b, c, d = self.faces[f]
        return self.interval(a, b), self.interval(b, c)

    def with_vertices(self, vertices):
        return HybridMesh(np.asarray(vertices, dtype=float), self.faces, self.intervals,
                          self.levels, self.origin, self.parent)

    def validate(self):
        """Check every hybrid-mesh invariant; return ``self``."""
        conn = self.connectivity
        for v in range(len(self.vertices)):
            nbrs, fs, closed = conn.fans[v]
            if closed and len(fs) != 4:
                raise TopologyError(f"interior vertex {v} has valence {len(fs)}")
            if not closed and len(fs) > 2:
                raise TopologyError(f"boundary vertex {v} has {len(fs)} faces")
        for f, face in enumerate(self.faces):
            if len(face) != 4:
                for k in range(len(face)):
                    if self.interval(face[k], face[(k + 1) % len(face)]) != 0.0:
                        raise IntervalError(f"polygon {f} has a nonzero edge")
        for (a, b) in conn.edge_face:
            if edge_key(a, b) not in self.intervals:
                raise IntervalError(f"edge ({a}, {b}) has no interval")
        _check_opposite_edges(self.faces, self.intervals)
        for v in range(len(self.vertices)):
            if conn.is_boundary(v):
                nbrs = conn.fans[v][0]
                for u in nbrs[1:-1]:
                    if self.interval(u, v) != 0.0:
                        raise IntervalError(f"boundary-perpendicular edge ({u}, {v}) is nonzero")
        return self


# --------------------------------------------------------------------------
# file input and output


def parse_mesh(text):
    """Parse thnus-mesh v1 text into a validated :class:`KnotMesh`."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or lines[0].split() != ["thnus-mesh", "1"]:
        raise ParseError("first line must be 'thnus-mesh 1'")
    pos = 1

    def section(name):
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"missing '{name}' section")
        parts = lines[pos].split()
        if len(parts) != 2 or parts[0] != name:
            raise ParseError(f"expected '{name} <count>', got '{lines[pos]}'")
        try:
            count = int(parts[1])
        except ValueError as exc:
            raise ParseError(f"bad count in '{lines[pos]}'") from exc
        if count < 0 or pos + 1 + count > len(lines):
            raise ParseError(f"section '{name}' is truncated")
        body = lines[pos + 1: pos + 1 + count]
        pos += 1 + count
        return body

    try:
        verts = np.array([[float(x) for x in ln.split()] for ln in section("vertices")], dtype=float)
    except ValueError as exc:
        raise ParseError(f"malformed vertex line: {exc}") from exc
    if verts.size == 0:
        verts = verts.reshape(0, 3)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise ParseError("vertex lines need exactly three coordinates")
    faces = []
    for ln in section("faces"):
        try:
            face = tuple(int(x) for x in ln.split())
        except ValueError as exc:
            raise ParseError(f"malformed face line '{ln}'") from exc
        if len(face) != 4:
            raise TopologyError(f"face '{ln}' is not a quadrilateral")
        if min(face) < 0 or max(face) >= len(verts):
            raise ParseError(f"face '{ln}' references a missing vertex")
        faces.append(face)
    listed = {}
    if pos < len(lines):
        for ln in section("intervals"):
            parts = ln.split()
            if len(parts) != 3:
                raise ParseError(f"malformed interval line '{ln}'")
            try:
                a, b, value = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ParseError(f"malformed interval line '{ln}'") from exc
            key = edge_key(a, b)
            if key in listed and listed[key] != value:
                raise IntervalError(f"edge {key} listed twice with different values")
            if value < 0:
                raise IntervalError(f"negative interval on edge {key}")
            listed[key] = value
    if pos < len(lines):
        raise ParseError(f"unexpected trailing line '{lines[pos]}'")
    conn = Connectivity(tuple(faces), len(verts))
    intervals = {}
    for (a, b) in conn.edge_face:
        intervals[edge_key(a, b)] = 1.0
    for key in listed:
        if key not in intervals:
            raise IntervalError(f"interval given for non-edge {key}")
    intervals.update(listed)
    return KnotMesh(verts, tuple(faces), intervals).validate()


def load_mesh(path):
    """Read a thnus-mesh v1 file.

    Parameters
    ----------
    path : str or path-like

    Returns
    -------
    KnotMesh
    """
    with open(path, encoding="utf-8") as fh:
        return parse_mesh(fh.read())


def format_mesh(m, comment=None):
    """Serialize a :class:`KnotMesh` as thnus-mesh v1 text.

    Only intervals different from the default 1.0 are written.
    """
    out = ["thnus-mesh 1"]
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"vertices {len(m.vertices)}")
    out.extend(" ".join(repr(float(x)) for x in p) for p in m.vertices)
    out.append(f"faces {len(m.faces)}")
    out.extend(" ".join(str(v) for v in f) for f in m.faces)
    listed = sorted((k, v) for k, v in m.intervals.items() if v != 1.0)
    out.append(f"intervals {len(listed)}")
    out.extend(f"{a} {b} {v!r}" for (a, b), v in listed)
    return "\n".join(out) + "\n"


def format_hybrid(h, comment=None):
    """Serialize a hybrid mesh (faces of any size, every interval listed)."""
    out = ["thnus-hybrid 1"]
    if comment:
        out.extend(f"# {line}" for line in comment.splitlines())
    out.append(f"vertices {len(h.vertices)}")
    out.extend(" ".join(repr(float(x)) for x in p) for p in h.vertices)
    out.append(f"faces {len(h.faces)}")
    out.extend(" ".join(str(v) for v in f) for f in h.faces)
    items = sorted(h.intervals.items())
    out.append(f"intervals {len(items)}")
    out.extend(f"{a} {b} {v!r}" for (a, b), v in items)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# conversion to a hybrid mesh


def _zero_boundary_perpendicular(m):
    """Intervals with boundary-perpendicular edges zeroed and opposite edges kept equal."""
    conn = m.connectivity
    intervals = dict(m.intervals)
    face_edges = []
    edge_faces = {}
    for f, face in enumerate(m.faces):
        keys = [edge_key(face[k], face[(k + 1) % 4]) for k in range(4)]
        face_edges.append(keys)
        for k in keys:
            edge_faces.setdefault(k, []).append(f)
    stack = []
    for v in range(len(m.vertices)):
        if conn.is_boundary(v):
            for u in conn.fans[v][0][1:-1]:
                stack.append(edge_key(u, v))
    overridden = 0
    seen = set()
    while stack:
        key = stack.pop()
        if key in seen:
            continue
        seen.add(key)
        if intervals[key] not in (0.0, 1.0):
            overridden += 1
        intervals[key] = 0.0
        for f in edge_faces[key]:
            keys = face_edges[f]
            stack.append(keys[(keys.index(key) + 2) % 4])
    if overridden:
        warnings.warn(f"{overridden} boundary-perpendicular intervals were set to zero", stacklevel=3)
    return intervals


def _trace_lines(m, evs):
    """Edges lying on mesh lines emanating from extraordinary vertices."""
    conn = m.connectivity
    ev_set = set(evs)
    doubled = set()
    for e in evs:
        for n in conn.fans[e][0]:
            prev, cur = e, n
            while True:
                key = edge_key(prev, cur)
                if key in doubled and prev != e:
                    break
                doubled.add(key)
                if cur in ev_set or conn.is_boundary(cur):
                    break
                nxt = conn.opposite(cur, prev)
                prev, cur = cur, nxt
    return doubled


@dataclass(frozen=True)
class HybridConversion:
    """Topology of a converted mesh plus the provenance of every new vertex.

    Attributes
    ----------
    mesh : HybridMesh
        Converted mesh with placeholder coordinates (copies of the source
        vertex).
    source : tuple of int
        Input vertex each hybrid vertex was copied from.
    wedge : tuple of tuple of int
        Input faces of the wedge each hybrid vertex belongs to.
    intervals : dict
        Input intervals after zeroing boundary-perpendicular edges.
    """

    mesh: HybridMesh
    source: tuple
    wedge: tuple
    intervals: dict


def convert_topology(m):
    """Canonical hybrid conversion of a :class:`KnotMesh` without geometry.

    Returns
    -------
    HybridConversion

    Raises
    ------
    TopologyError
        For boundary extraordinary vertices and for extraordinary vertices
        whose incident faces reach the boundary.
    """
    m.validate()
    conn = m.connectivity
    for v in range(len(m.vertices)):
        if conn.is_boundary(v) and conn.valence(v) > 2:
            raise TopologyError(f"boundary extraordinary vertex {v} (valence {conn.valence(v) + 1}) is not supported")
        if conn.valence(v) == 0:
            raise TopologyError(f"vertex {v} is isolated")
    intervals = _zero_boundary_perpendicular(m)
    evs = m.extraordinary_vertices()
    for v in evs:
        near = {w for f in conn.fans[v][1] for w in m.faces[f]}
        if any(conn.is_boundary(w) for w in near):
            raise TopologyError(f"extraordinary vertex {v} is too close to the boundary")
    doubled = _trace_lines(m, evs)

    copies = []            # (source vertex, wedge faces)
    copy_of = {}           # (vertex, input face) -> copy id
    vertex_faces = []      # copies around vertices with three or more wedges
    for v in range(len(m.vertices)):
        nbrs, fs, closed = conn.fans[v]
        cuts = [k for k, n in enumerate(nbrs) if edge_key(v, n) in doubled]
        if closed and len(cuts) == 1:
            raise TopologyError(f"mesh line ends at regular vertex {v}")
        if not cuts:
            wedges = [list(fs)]
        elif closed:
            wedges = []
            for a, b in zip(cuts, cuts[1:] + [cuts[0] + len(fs)]):
                wedges.append([fs[k % len(fs)] for k in range(a, b)])
        else:
            bounds = [0] + cuts + [len(fs)]
            wedges = [fs[a:b] for a, b in zip(bounds, bounds[1:]) if b > a]
        ids = []
        for w in wedges:
            cid = len(copies)
            copies.append((v, tuple(w)))
            for f in w:
                copy_of[(v, f)] = cid
            ids.append(cid)
        if closed and len(wedges) >= 3:
            vertex_faces.append(tuple(ids))

    faces = [tuple(copy_of[(v, f)] for v in face) for f, face in enumerate(m.faces)]
    new_intervals = {}
    for f, face in enumerate(m.faces):
        nf = faces[f]
        for k in range(4):
            new_intervals[edge_key(nf[k], nf[(k + 1) % 4])] = intervals[edge_key(face[k], face[(k + 1) % 4])]
    for (a, b) in sorted(doubled):
        fl, fr = conn.edge_face[(a, b)], conn.edge_face[(b, a)]
        ar, br, bl, al = copy_of[(a, fr)], copy_of[(b, fr)], copy_of[(b, fl)], copy_of[(a, fl)]
        faces.append((ar, br, bl, al))
        new_intervals[edge_key(ar, br)] = intervals[(a, b)]
        new_intervals[edge_key(bl, al)] = intervals[(a, b)]
        new_intervals[edge_key(br, bl)] = 0.0
        new_intervals[edge_key(al, ar)] = 0.0
    for vf in vertex_faces:
        faces.append(vf)
        for k in range(len(vf)):
            new_intervals[edge_key(vf[k], vf[(k + 1) % len(vf)])] = 0.0
    verts = np.array([m.vertices[v] for v, _ in copies], dtype=float).reshape(-1, 3)
    h = HybridMesh(verts, tuple(faces), new_intervals, tuple([1] * len(faces)))
    return HybridConversion(h, tuple(v for v, _ in copies), tuple(w for _, w in copies), intervals)


def to_hybrid_topology(m):
    """Convert a knotted quad mesh into a hybrid mesh with first-level geometry.

    Parameters
    ----------
    m : KnotMesh

    Returns
    -------
    HybridMesh
        Validated hybrid mesh at level 1.
    """
    from .subdivision import first_level_geometry

    conv = convert_topology(m)
    return first_level_geometry(m, conv).validate()


# --------------------------------------------------------------------------
# refinement and classification


def refine_topology(h):
    """Split every nonzero-interval edge of a hybrid mesh at its midpoint knot.

    Quads with two nonzero directions become four faces, quads with one
    nonzero direction become two, and zero-measure quads and polygons are
    kept.  New vertices get bilinear placeholder coordinates; the subdivision
    rules live in :func:`thnus.subdivision.refine_geometry`.

    Parameters
    ----------
    h : HybridMesh

    Returns
    -------
    HybridMesh
        The refined mesh with ``origin`` and ``parent`` filled in.
    """
    nv = len(h.vertices)
    origin = [("v", v) for v in range(nv)]
    pos = [p for p in h.vertices]
    edge_id = {}
    for key in sorted(h.intervals):
        if h.intervals[key] > 0.0:
            edge_id[key] = len(origin)
            origin.append(("e",) + key)
            pos.append(0.5 * (h.vertices[key[0]] + h.vertices[key[1]]))
    faces, parent, levels = [], [], []
    intervals = {}

    def put(a, b, value):
        intervals[edge_key(a, b)] = value

    for key, value in h.intervals.items():
        if value > 0.0:
            mid = edge_id[key]
            put(key[0], mid, 0.5 * value)
            put(mid, key[1], 0.5 * value)
        else:
            put(key[0], key[1], 0.0)

    for f, face in enumerate(h.faces):
        lvl = h.levels[f] + 1
        if len(face) != 4:
            children = [face]
        else:
            v0, v1, v2, v3 = face
            iu, iv = h.interval(v0, v1), h.interval(v1, v2)
            if iu > 0 and iv > 0:
                c = len(origin)
                origin.append(("f", f))
                pos.append(np.mean(h.vertices[list(face)], axis=0))
                e01, e12 = edge_id[edge_key(v0, v1)], edge_id[edge_key(v1, v2)]
                e23, e30 = edge_id[edge_key(v2, v3)], edge_id[edge_key(v3, v0)]
                children = [(v0, e01, c, e30), (e01, v1, e12, c), (c, e12, v2, e23), (e30, c, e23, v3)]
                put(e01, c, 0.5 * iv)
                put(c, e23, 0.5 * iv)
                put(e30, c, 0.5 * iu)
                put(c, e12, 0.5 * iu)
            elif iu > 0:
                e01, e23 = edge_id[edge_key(v0, v1)], edge_id[edge_key(v2, v3)]
                children = [(v0, e01, e23, v3), (e01, v1, v2, e23)]
                put(e01, e23, 0.0)
            elif iv > 0:
                e12, e30 = edge_id[edge_key(v1, v2)], edge_id[edge_key(v3, v0)]
                children = [(v0, v1, e12, e30), (e30, e12, v2, v3)]
                put(e30, e12, 0.0)
            else:
                children = [face]
        for c in children:
            faces.append(tuple(c))
            parent.append(f)
            levels.append(lvl)
    return HybridMesh(np.array(pos, dtype=float).reshape(-1, 3), tuple(faces), intervals,
                      tuple(levels), tuple(origin), tuple(parent))


ZERO, REGULAR, IRREGULAR, POLYGON = "zero", "regular", "irregular", "polygon"


def classify_faces(h):
    """Classify every face of a hybrid mesh.

    Returns
    -------
    tuple of str
        One of ``"polygon"``, ``"zero"`` (zero parametric area),
        ``"irregular"`` (nonzero area and sharing a vertex with a polygon) or
        ``"regular"``.
    """
    poly = h.polygon_vertex
    out = []
    for f, face in enumerate(h.faces):
        if len(face) != 4:
            out.append(POLYGON)
            continue
        iu, iv = h.face_intervals(f)
        if iu * iv == 0.0:
            out.append(ZERO)
        elif any(v in poly for v in face):
            out.append(IRREGULAR)
        else:
            out.append(REGULAR)
    return tuple(out)
