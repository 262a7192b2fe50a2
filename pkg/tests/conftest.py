import numpy as np
import pytest

from thnus.meshes import load_builtin, polygons_to_quads

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def builtin():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_builtin(name)
        return cache[name]

    return get


@pytest.fixture(scope="session")
def record():
    """Store one summary line per acceptance criterion."""

    def rec(number, passed, detail):
        _ACCEPTANCE[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"

    return rec


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[k])


def unit_circle(n):
    ang = 2 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(ang), np.sin(ang)])


def two_triangle_grid(splits=1):
    """3x3 grid whose centre cell is cut into two triangles.

    The two valence-5 corners of the cut lie close together, so faces between
    them need the macro-element treatment.
    """
    g = lambda i, j: 4 * j + i
    pts = [(i / 3, j / 3) for j in range(4) for i in range(4)]
    polys = []
    for j in range(3):
        for i in range(3):
            if (i, j) == (1, 1):
                polys += [[g(1, 1), g(2, 1), g(2, 2)], [g(1, 1), g(2, 2), g(1, 2)]]
            else:
                polys.append([g(i, j), g(i + 1, j), g(i + 1, j + 1), g(i, j + 1)])
    return polygons_to_quads(pts, polys, splits)
