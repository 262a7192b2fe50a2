"""Galerkin solution of the Poisson problem on hybrid-mesh spline spaces.

The geometry is isoparametric: the physical point of an element is its basis
functions applied to the control-vertex positions, so refining the control
mesh leaves the domain unchanged while the space grows.

Quadrature
----------
Regular elements always get the 4x4 Gauss rule.  Irregular elements get the
same 16 points (``reduced``) or 16 points on each of the three tiles of levels
``1 .. depth`` plus 16 on the innermost square (``full``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import check_lambda
from .basis import RegularElement, element_space, gauss_square
from .knots import span_basis
from .mesh import classify_faces, IRREGULAR, to_hybrid_topology
from .subdivision import refine_geometry

SUPPORT_TOL = 1e-14
TRACE_TOL = 1e-13
SOLVE_RTOL = 1e-12


@dataclass(frozen=True)
class QuadratureScheme:
    """Quadrature choice for irregular elements.

    Attributes
    ----------
    kind : {'reduced', 'full'}
    depth : int
        Number of tile levels of the full scheme.
    """

    kind: str = "reduced"
    depth: int = 10

    def __post_init__(self):
        if self.kind not in ("reduced", "full"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.depth < 1:
            raise ValueError("depth must be positive")


FULL = QuadratureScheme("full")
REDUCED = QuadratureScheme("reduced")


def quadrature_points(scheme, element):
    """Parametric points and weights used on one element.

    Returns
    -------
    points : ndarray, shape (q, 2)
    weights : ndarray, shape (q,)
        Summing to the parametric area 1.

    Examples
    --------
    >>> from thnus.basis import RegularElement
    >>> el = RegularElement(0, range(16), [1.0] * 7, [1.0] * 7)
    >>> quadrature_points(REDUCED, el)[0].shape
    (16, 2)
    """
    if isinstance(element, str):
        if element == "regular":
            return gauss_square()
        from .basis import tile_quadrature
        return gauss_square() if scheme.kind == "reduced" else tile_quadrature(scheme.depth)
    return element.quadrature(scheme.kind, scheme.depth)


# --------------------------------------------------------------------------
# manufactured solutions


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact solution ``u`` with gradient and source ``f = -Laplace(u)``."""

    name: str
    u: object
    grad: object
    f: object


SIN_SIN = ManufacturedSolution(
    "sin(pi x) sin(pi y)",
    lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y),
    lambda x, y: (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y), np.pi * np.sin(np.pi * x) * np.cos(np.pi * y)),
    lambda x, y: 2.0 * np.pi ** 2 * np.sin(np.pi * x) * np.sin(np.pi * y),
)


def linear_solution(a, b, c=0.0):
    """``u = a x + b y + c``, reproduced exactly by every isoparametric space."""
    return ManufacturedSolution(
        f"{a} x + {b} y + {c}",
        lambda x, y: a * x + b * y + c,
        lambda x, y: (np.full_like(x, a), np.full_like(y, b)),
        lambda x, y: np.zeros_like(x),
    )


SOLUTIONS = {"sinsin": SIN_SIN, "x": linear_solution(1.0, 0.0), "x+2y": linear_solution(1.0, 2.0)}


@dataclass
class PoissonProblem:
    """Poisson problem on the domain of a hybrid mesh.

    Attributes
    ----------
    mesh : HybridMesh
        Control mesh with geometry.
    lam : float
    solution : ManufacturedSolution
    scheme : QuadratureScheme
    """

    mesh: object
    lam: float
    solution: ManufacturedSolution = SIN_SIN
    scheme: QuadratureScheme = REDUCED

    def __post_init__(self):
        self.lam = check_lambda(self.lam)

    @cached_property
    def space(self):
        return element_space(self.mesh, self.lam)

    def blocks(self, scheme=None):
        scheme = scheme or self.scheme
        cache = self.__dict__.setdefault("_blocks", {})
        if scheme not in cache:
            cache[scheme] = element_blocks(self.space, self.mesh.vertices, scheme)
        return cache[scheme]

    @property
    def n_vertices(self):
        return len(self.mesh.vertices)


# --------------------------------------------------------------------------
# element evaluation


@dataclass
class ElementBlock:
    """Basis data of a group of elements with the same number of functions.

    Arrays are indexed ``[element, point, function]``; ``weights`` already
    include the Jacobian determinant.
    """

    faces: np.ndarray
    dofs: np.ndarray
    values: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    weights: np.ndarray
    xy: np.ndarray


def _physical(faces, dofs, val, du, dv, wts, X):
    ctrl = X[dofs][..., :2]
    xy = np.einsum("eqi,eid->eqd", val, ctrl)
    xu = np.einsum("eqi,eid->eqd", du, ctrl)
    xv = np.einsum("eqi,eid->eqd", dv, ctrl)
    det = xu[..., 0] * xv[..., 1] - xu[..., 1] * xv[..., 0]
    bad = ~(np.abs(det) > 0.0)
    if np.any(bad):
        e, q = np.argwhere(bad)[0]
        raise ArithmeticError(f"singular geometry Jacobian on face {faces[e]} at quadrature point {q}")
    # inverse transpose of [[xu_x, xv_x], [xu_y, xv_y]]
    gx = (xv[..., 1, None] * du - xu[..., 1, None] * dv) / det[..., None]
    gy = (-xv[..., 0, None] * du + xu[..., 0, None] * dv) / det[..., None]
    return ElementBlock(np.asarray(faces), dofs, val, gx, gy, wts * np.abs(det), xy)


def _regular_block(elements, X):
    pts, wts = gauss_square()
    wu = np.array([e.u_window for e in elements])
    wv = np.array([e.v_window for e in elements])
    bu, dbu = span_basis(wu[:, None, :], pts[None, :, 0])
    bv, dbv = span_basis(wv[:, None, :], pts[None, :, 1])
    E, Q = len(elements), len(pts)
    val = np.einsum("eqb,eqa->eqba", bv, bu).reshape(E, Q, 16)
    du = np.einsum("eqb,eqa->eqba", bv, dbu).reshape(E, Q, 16)
    dv = np.einsum("eqb,eqa->eqba", dbv, bu).reshape(E, Q, 16)
    dofs = np.array([e.dofs for e in elements])
    faces = [e.face_id for e in elements]
    return _physical(faces, dofs, val, du, dv, np.broadcast_to(wts, (E, Q)), X)


def element_blocks(space, vertices, scheme):
    """Evaluate every element of a space at its quadrature points."""
    X = np.asarray(vertices, dtype=float)
    regular = [e for e in space.elements if isinstance(e, RegularElement)]
    other = [e for e in space.elements if not isinstance(e, RegularElement)]
    blocks = [_regular_block(regular, X)] if regular else []
    for el in other:
        pts, wts = el.quadrature(scheme.kind, scheme.depth)
        val, du, dv = el.evaluate(pts)
        dofs = np.asarray(el.dofs)[None]
        blocks.append(_physical([el.face_id], dofs, val[None], du[None], dv[None], wts[None], X))
    return blocks


# --------------------------------------------------------------------------
# assembly and solution


def _scatter_matrix(blocks, n, local):
    rows, cols, data = [], [], []
    for blk in blocks:
        k = local(blk)
        nb = blk.dofs.shape[1]
        rows.append(np.repeat(blk.dofs, nb, axis=1).ravel())
        cols.append(np.tile(blk.dofs, (1, nb)).ravel())
        data.append(k.ravel())
    A = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return A.tocsr()


def stiffness_matrix(blocks, n):
    return _scatter_matrix(blocks, n, lambda b: np.einsum("eqi,eqj,eq->eij", b.gx, b.gx, b.weights)
                           + np.einsum("eqi,eqj,eq->eij", b.gy, b.gy, b.weights))


def mass_matrix(blocks, n):
    return _scatter_matrix(blocks, n, lambda b: np.einsum("eqi,eqj,eq->eij", b.values, b.values, b.weights))


def load_vector(blocks, n, f):
    b = np.zeros(n)
    for blk in blocks:
        fq = f(blk.xy[..., 0], blk.xy[..., 1])
        np.add.at(b, blk.dofs, np.einsum("eqi,eq->ei", blk.values, fq * blk.weights))
    return b


def support_measure(blocks, n):
    """Integral of every basis function; zero exactly for functions without support."""
    s = np.zeros(n)
    for blk in blocks:
        np.add.at(s, blk.dofs, np.einsum("eqi,eq->ei", np.abs(blk.values), blk.weights))
    return s


def assemble(problem):
    """Stiffness matrix and load vector over all control vertices.

    Returns
    -------
    A : scipy.sparse.csr_matrix
    b : ndarray
    """
    blocks = problem.blocks()
    n = problem.n_vertices
    return stiffness_matrix(blocks, n), load_vector(blocks, n, problem.solution.f)


def solve(A, b):
    """Solve a symmetric positive definite sparse system directly.

    Raises
    ------
    ArithmeticError
        If the relative residual exceeds ``1e-12``.
    """
    A = sp.csc_matrix(A)
    b = np.asarray(b, dtype=float)
    x = np.atleast_1d(spsolve(A, b))
    res = np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), 1e-300)
    if res > SOLVE_RTOL and np.linalg.norm(b) > 0:
        raise ArithmeticError(f"relative residual {res:.3e} exceeds {SOLVE_RTOL}")
    return x


_EDGES = (("v", 0.0), ("u", 1.0), ("v", 1.0), ("u", 0.0))


def boundary_trace(problem, order=6):
    """Boundary mass matrix and projected data over all boundary element edges.

    An element edge lies on the domain boundary when every function that is
    nonzero on it belongs to a boundary vertex.

    Returns
    -------
    M : csr_matrix
    r : ndarray
    edges : int
        Number of element edges on the boundary.
    """
    h = problem.mesh
    conn = h.connectivity
    n = problem.n_vertices
    is_bnd = np.array([conn.is_boundary(v) for v in range(n)])
    g = problem.solution.u
    X = h.vertices[:, :2]
    t, w = np.polynomial.legendre.leggauss(order)
    t, w = 0.5 * (t + 1.0), 0.5 * w
    rows, cols, data = [], [], []
    r = np.zeros(n)
    count = 0
    for el in problem.space.elements:
        dofs = np.asarray(el.dofs)
        if not is_bnd[dofs].any():
            continue
        for axis, c in _EDGES:
            uv = np.column_stack([t, np.full_like(t, c)]) if axis == "v" else np.column_stack([np.full_like(t, c), t])
            val, du, dv = el.evaluate(uv)
            if np.abs(val[:, ~is_bnd[dofs]]).max(initial=0.0) > TRACE_TOL:
                continue
            tangent = (du if axis == "v" else dv) @ X[dofs]
            ds = np.linalg.norm(tangent, axis=1) * w
            if ds.sum() <= 0.0:
                continue
            count += 1
            xy = val @ X[dofs]
            k = np.einsum("qi,qj,q->ij", val, val, ds)
            rows.append(np.repeat(dofs, len(dofs)))
            cols.append(np.tile(dofs, len(dofs)))
            data.append(k.ravel())
            np.add.at(r, dofs, val.T @ (g(xy[:, 0], xy[:, 1]) * ds))
    if not rows:
        return sp.csr_matrix((n, n)), r, 0
    M = sp.coo_matrix((np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    return M.tocsr(), r, count


@dataclass
class PoissonSolution:
    """Coefficients on all control vertices plus bookkeeping."""

    coefficients: np.ndarray
    free: np.ndarray
    dirichlet: np.ndarray
    ndof: int
    boundary_edges: int


def solve_poisson(problem):
    """Assemble, impose the boundary data and solve.

    Boundary coefficients come from the L2 projection of the exact solution
    onto the boundary traces; the remaining active coefficients are solved
    for.  Vertices whose functions vanish identically stay zero.
    """
    blocks = problem.blocks()
    n = problem.n_vertices
    A, b = assemble(problem)
    active = support_measure(blocks, n) > SUPPORT_TOL
    M, r, edges = boundary_trace(problem)
    bnd = (M.diagonal() > 0.0) & active
    coeffs = np.zeros(n)
    ib = np.flatnonzero(bnd)
    if len(ib):
        coeffs[ib] = solve(M[ib][:, ib], r[ib])
    free = np.flatnonzero(active & ~bnd)
    rhs = b[free] - A[free][:, ib] @ coeffs[ib]
    coeffs[free] = solve(A[free][:, free], rhs)
    return PoissonSolution(coeffs, free, ib, len(free), edges)


def error_norms(problem, solution):
    """L2 and full H1 errors, always integrated with the full scheme.

    Parameters
    ----------
    problem : PoissonProblem
    solution : PoissonSolution or ndarray
        Coefficients on all control vertices.

    Returns
    -------
    l2, h1 : float
    """
    c = solution.coefficients if isinstance(solution, PoissonSolution) else np.asarray(solution, dtype=float)
    blocks = problem.blocks(QuadratureScheme("full", problem.scheme.depth))
    ex = problem.solution
    e2 = g2 = 0.0
    for blk in blocks:
        x, y = blk.xy[..., 0], blk.xy[..., 1]
        cc = c[blk.dofs][:, None, :]
        uh = (blk.values * cc).sum(-1)
        gxh = (blk.gx * cc).sum(-1)
        gyh = (blk.gy * cc).sum(-1)
        gxe, gye = ex.grad(x, y)
        e2 += float(np.sum((ex.u(x, y) - uh) ** 2 * blk.weights))
        g2 += float(np.sum(((gxe - gxh) ** 2 + (gye - gyh) ** 2) * blk.weights))
    return math.sqrt(e2), math.sqrt(e2 + g2)


def max_error(problem, solution):
    """Largest pointwise error over the full-scheme quadrature points."""
    c = solution.coefficients if isinstance(solution, PoissonSolution) else np.asarray(solution, dtype=float)
    worst = 0.0
    for blk in problem.blocks(QuadratureScheme("full", problem.scheme.depth)):
        uh = (blk.values * c[blk.dofs][:, None, :]).sum(-1)
        worst = max(worst, float(np.abs(problem.solution.u(blk.xy[..., 0], blk.xy[..., 1]) - uh).max()))
    return worst


# --------------------------------------------------------------------------
# mesh size and convergence


def element_diameters(problem, samples=3):
    """Physical diameter of every element, estimated from boundary samples.

    Returns
    -------
    faces, diameters : ndarray
    """
    t = np.linspace(0.0, 1.0, samples)
    ring = np.unique(np.concatenate([
        np.column_stack([t, np.zeros_like(t)]), np.column_stack([t, np.ones_like(t)]),
        np.column_stack([np.zeros_like(t), t]), np.column_stack([np.ones_like(t), t])]), axis=0)
    X = problem.mesh.vertices[:, :2]
    faces, diam = [], []
    for el in problem.space.elements:
        p = el.evaluate(ring)[0] @ X[np.asarray(el.dofs)]
        dd = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
        faces.append(el.face_id)
        diam.append(dd.max())
    return np.array(faces), np.array(diam)


def irregular_element_diameters(h, lam):
    """Diameters of the elements touching a polygon of a hybrid mesh."""
    prob = PoissonProblem(h, lam)
    kinds = classify_faces(h)
    faces, diam = element_diameters(prob)
    return diam[[kinds[f] == IRREGULAR for f in faces]]


def refine_levels(mesh, lam, levels):
    """Hybrid meshes of levels ``1 .. levels`` for an input quad mesh."""
    h = to_hybrid_topology(mesh)
    out = [h]
    for _ in range(levels - 1):
        h = refine_geometry(h, lam)
        out.append(h)
    return out


@dataclass
class ConvergenceReport:
    lam: float
    scheme: QuadratureScheme
    levels: list = field(default_factory=list)
    ndof: list = field(default_factory=list)
    h: list = field(default_factory=list)
    err_l2: list = field(default_factory=list)
    err_h1: list = field(default_factory=list)

    def rates(self, which):
        e = np.asarray(getattr(self, which))
        hh = np.asarray(self.h)
        return [None] + [math.log(e[i - 1] / e[i]) / math.log(hh[i - 1] / hh[i]) for i in range(1, len(e))]

    def slope(self, which, last=3):
        """Least-squares slope of log2(error) against log2(h) over the last levels."""
        e = np.log2(np.asarray(getattr(self, which))[-last:])
        hh = np.log2(np.asarray(self.h)[-last:])
        return float(np.polyfit(hh, e, 1)[0])

    def csv(self, header=None):
        lines = [f"# {header}"] if header else []
        lines.append("level,ndof,h,err_l2,err_h1,rate_l2,rate_h1")
        r2, r1 = self.rates("err_l2"), self.rates("err_h1")
        fmt = lambda x: "" if x is None else f"{x:.6f}"
        for i in range(len(self.levels)):
            lines.append(f"{self.levels[i]},{self.ndof[i]},{self.h[i]:.10e},{self.err_l2[i]:.10e},"
                         f"{self.err_h1[i]:.10e},{fmt(r2[i])},{fmt(r1[i])}")
        lines.append(f"# slope_l2={self.slope('err_l2'):.6f} slope_h1={self.slope('err_h1'):.6f}")
        return "\n".join(lines) + "\n"


def convergence_study(mesh, lam, levels, scheme=REDUCED, solution=SIN_SIN, meshes=None):
    """Solve on levels ``1 .. levels`` and record errors.

    Parameters
    ----------
    mesh : KnotMesh
    lam : float
    levels : int
        At least 3.
    scheme : QuadratureScheme
    solution : ManufacturedSolution
    meshes : list of HybridMesh, optional
        Precomputed output of :func:`refine_levels` for the same ``lam``.

    Returns
    -------
    ConvergenceReport
    """
    lam = check_lambda(lam)
    if levels < 3:
        raise ValueError("need at least three levels")
    meshes = meshes or refine_levels(mesh, lam, levels)
    rep = ConvergenceReport(lam, scheme)
    for lvl, h in enumerate(meshes[:levels], start=1):
        prob = PoissonProblem(h, lam, solution, scheme)
        sol = solve_poisson(prob)
        l2, h1 = error_norms(prob, sol)
        _, diam = element_diameters(prob, samples=2)
        rep.levels.append(lvl)
        rep.ndof.append(sol.ndof)
        rep.h.append(float(diam.max()))
        rep.err_l2.append(l2)
        rep.err_h1.append(h1)
    return rep
