import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thnus.mesh import (IRREGULAR, POLYGON, REGULAR, ZERO, HybridMesh, IntervalError, KnotMesh, ParseError,
                        TopologyError, classify_faces, edge_key, format_hybrid, format_mesh, parse_mesh,
                        refine_topology, to_hybrid_topology)
from thnus.meshes import BUILTIN, square_ev35, square_valence, with_spoke_intervals

QUAD = """thnus-mesh 1
vertices 4
0 0 0
1 0 0
1 1 0
0 1 0
faces 1
0 1 2 3
"""


def test_single_quad_defaults():
    m = parse_mesh(QUAD)
    assert len(m.intervals) == 4
    assert set(m.intervals.values()) == {1.0}


def test_comments_and_blank_lines_ignored():
    text = "# header\n\n" + QUAD.replace("faces 1", "faces 1  # one quad")
    assert parse_mesh(text).faces == ((0, 1, 2, 3),)


@pytest.mark.parametrize("text, error", [
    ("thnus-mesh 2\nvertices 0\nfaces 0\n", ParseError),
    (QUAD.replace("faces 1", "faces 2"), ParseError),
    (QUAD.replace("0 1 2 3", "0 1 2"), TopologyError),
    (QUAD.replace("0 1 2 3", "0 1 2 7"), ParseError),
    (QUAD.replace("1 1 0\n", "1 1\n"), ParseError),
    (QUAD + "intervals 1\n0 1 -1\n", IntervalError),
    (QUAD + "intervals 2\n0 1 2\n1 0 3\n", IntervalError),
    (QUAD + "intervals 1\n0 2 1\n", IntervalError),
    (QUAD + "intervals 1\n0 1 2\n", IntervalError),
    (QUAD + "intervals 0\nextra\n", ParseError),
])
def test_parse_errors(text, error):
    with pytest.raises(error):
        parse_mesh(text)


def test_duplicate_equal_listing_allowed():
    text = QUAD + "intervals 4\n0 1 2\n1 0 2\n2 3 2\n1 2 1\n"
    assert parse_mesh(text).interval(3, 2) == 2.0


@pytest.mark.parametrize("name", BUILTIN)
def test_format_roundtrip(builtin, name):
    m = builtin(name)
    again = parse_mesh(format_mesh(m, comment="round trip"))
    assert np.array_equal(again.vertices, m.vertices)
    assert again.faces == m.faces
    assert again.intervals == m.intervals


def test_builtin_extraordinary_valences(builtin):
    m = builtin("square_ev35")
    conn = m.connectivity
    assert sorted(conn.valence(v) for v in m.extraordinary_vertices()) == [3, 5]
    xy = m.vertices[:, :2]
    assert np.allclose(xy.min(axis=0), 0) and np.allclose(xy.max(axis=0), 1)
    for n in (6, 7, 8):
        v = builtin(f"square_v{n}")
        assert [v.connectivity.valence(e) for e in v.extraordinary_vertices()] == [n]


def test_boundary_extraordinary_vertex_rejected():
    # three quads around a corner vertex: boundary vertex with three faces
    verts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [-1, 1, 0], [-1, 0, 0],
                      [-1, -1, 0], [0, -1, 0]], dtype=float)
    faces = ((0, 1, 2, 3), (0, 3, 4, 5), (0, 5, 6, 7))
    intervals = {}
    for f in faces:
        for k in range(4):
            intervals[edge_key(f[k], f[(k + 1) % 4])] = 1.0
    with pytest.raises(TopologyError):
        to_hybrid_topology(KnotMesh(verts, faces, intervals))


def test_extraordinary_vertex_next_to_boundary_rejected():
    with pytest.raises(TopologyError, match="too close to the boundary"):
        to_hybrid_topology(square_ev35(splits=0))


def test_regular_mesh_passes_through():
    m = square_valence(4, splits=1)
    h = to_hybrid_topology(m)
    assert len(h.faces) == len(m.faces)
    assert len(h.vertices) == len(m.vertices)
    assert POLYGON not in classify_faces(h)


@pytest.mark.parametrize("n", [3, 5, 6, 7, 8])
def test_extraordinary_vertex_becomes_polygon(builtin, n):
    m = builtin("square_ev35" if n in (3, 5) else f"square_v{n}")
    h = to_hybrid_topology(m)
    polys = [f for f in h.faces if len(f) == n]
    assert len(polys) == 1
    poly = polys[0]
    kinds = classify_faces(h)
    # every polygon edge is shared with exactly one zero-width spoke quad
    conn = h.connectivity
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        f = conn.edge_face[(b, a)]
        assert len(h.faces[f]) == 4 and kinds[f] == ZERO


def test_classification_examples(builtin):
    h = to_hybrid_topology(builtin("square_v6"))
    kinds = classify_faces(h)
    poly = next(f for f in range(len(h.faces)) if h.is_polygon(f))
    assert kinds[poly] == POLYGON
    touching = [f for f, face in enumerate(h.faces) if kinds[f] == IRREGULAR]
    assert len(touching) == 6
    pv = set(h.faces[poly])
    for f in touching:
        assert sum(v in pv for v in h.faces[f]) == 1
        assert min(h.face_intervals(f)) > 0
    for f, kind in enumerate(kinds):
        if kind == REGULAR:
            assert not pv & set(h.faces[f])


def _lone_face(face, values):
    verts = np.zeros((max(face) + 1, 3))
    intervals = {edge_key(face[k], face[(k + 1) % len(face)]): values[k % len(values)] for k in range(len(face))}
    return HybridMesh(verts, (tuple(face),), intervals, (1,))


def test_refine_full_quad():
    r = refine_topology(_lone_face((0, 1, 2, 3), (1.0, 1.0)))
    assert len(r.faces) == 4
    assert set(r.intervals.values()) == {0.5}
    assert r.parent == (0, 0, 0, 0)


def test_refine_strip_quad():
    r = refine_topology(_lone_face((0, 1, 2, 3), (1.0, 0.0)))
    assert len(r.faces) == 2
    assert sorted(set(r.intervals.values())) == [0.0, 0.5]


def test_polygon_is_kept():
    r = refine_topology(_lone_face((0, 1, 2, 3, 4), (0.0,)))
    assert r.faces == ((0, 1, 2, 3, 4),)


def parametric_area(h):
    return sum(np.prod(h.face_intervals(f)) for f in range(len(h.faces)) if not h.is_polygon(f))


@settings(max_examples=12, deadline=None)
@given(st.lists(st.sampled_from([0.5, 1.0, 2.0, 3.0]), min_size=5, max_size=5))
def test_refinement_keeps_invariants_and_area(spokes):
    m = square_ev35(splits=1)
    ev5 = [v for v in m.extraordinary_vertices() if m.connectivity.valence(v) == 5][0]
    m = with_spoke_intervals(m, ev5, spokes)
    h = to_hybrid_topology(m)
    area = parametric_area(h)
    npoly = sum(map(h.is_polygon, range(len(h.faces))))
    for _ in range(2):
        h = refine_topology(h).validate()
        assert parametric_area(h) == pytest.approx(area, rel=1e-12)
        assert sum(map(h.is_polygon, range(len(h.faces)))) == npoly


def test_hybrid_text_lists_every_interval(builtin):
    h = to_hybrid_topology(builtin("square_v6"))
    text = format_hybrid(h)
    assert text.startswith("thnus-hybrid 1\n")
    assert f"intervals {len(h.intervals)}" in text
