"""Control net of the characteristic map and its sign certificate.

All quantities of one sector are expressed as coefficient triples over the
frame ``(p, v, w)``:

* ``p = P^{0,0} - C``, the sector's polygon vertex relative to the centre;
* ``v = E_{i-1} - C`` and ``w = E_i - C``, where ``E_i`` is the interval
  weighted point on the polygon edge after vertex ``i``.

The net ``P[j, k]`` of a sector moves towards ``v`` with ``j`` and towards
``w`` with ``k``. Its first row comes from closed-form spoke formulas, its
first column mirrors the row with ``v`` and ``w`` swapped and the interior
``1 <= j, k <= 3`` comes from the tabulated rational functions in
:mod:`thnus._charmap_tables`. The same tables hold the Bezier differences
``S[j, k] = B[j+1, k] - B[j, k]`` and ``T[j, k] = B[j, k+1] - B[j, k]`` of the
middle patch.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from . import check_lambda
from ._charmap_tables import TABLES
from .spectral import assemble_Sn
from .subdivision import stencil_weights

SIGN_TOL = 1e-12
S_INDICES = tuple((j, k) for j in range(3) for k in range(4))
T_INDICES = tuple((j, k) for j in range(4) for k in range(3))


def _horner(coeffs, x):
    out = np.zeros_like(x, dtype=float)
    for c in coeffs:
        out = out * x + c
    return out


def coefficients(kind, j, k, lam):
    """Coefficient triple ``(c_p, c_v, c_w)`` of a tabulated expression.

    Parameters
    ----------
    kind : {'P', 'S', 'T'}
    j, k : int
    lam : float or ndarray

    Returns
    -------
    ndarray, shape ``np.shape(lam) + (3,)``
    """
    x = np.asarray(lam, dtype=float)
    return np.stack([_horner(num, x) / _horner(den, x) for num, den in TABLES[(kind, j, k)]], axis=-1)


def _spoke_steps(lam):
    """Differences ``P^{1,0}-P^{0,0}``, ``P^{2,0}-P^{1,0}``, ``P^{3,0}-P^{2,0}`` as (along v, along p-v)."""
    l = lam
    return (
        (4 * (1 - l) / (4 * l - 1), 4 * (1 - 2 * l) / (8 * l - 1)),
        (18 * (1 - l) / ((8 * l - 1) * (4 * l - 1)), 18 * (1 - 2 * l) / ((16 * l - 1) * (8 * l - 1))),
        (6 * (1 - l) * (1 + l) / ((8 * l - 1) * l * (4 * l - 1)),
         3 * (1 - 4 * l * l) / ((16 * l - 1) * l * (8 * l - 1))),
    )


def polygon_frame(n, lam, d, sector=0):
    """Centre and frame vectors of one sector for unit-circle polygon vertices.

    Returns
    -------
    centre, p, v, w : ndarray, shape (2,)
    """
    d = np.asarray(d, dtype=float)
    ang = 2 * np.pi * np.arange(n) / n
    P = np.column_stack([np.cos(ang), np.sin(ang)])
    centre = stencil_weights(n, lam, d).beta @ P

    def edge_point(i):
        a, b = d[i % n], d[(i + 2) % n]
        return (a * P[(i + 1) % n] + b * P[i % n]) / (a + b)

    i = sector % n
    return centre, P[i] - centre, edge_point(i - 1) - centre, edge_point(i) - centre


@dataclass(frozen=True)
class CharMapNet:
    """Characteristic-map control net of one sector.

    ``points[j, k]`` is the coefficient triple ``(c_p, c_v, c_w)`` of
    ``P^{j,k} - C``.
    """

    n: int
    lam: float
    d: np.ndarray
    sector: int
    points: np.ndarray
    centre: np.ndarray
    frame: np.ndarray = field(repr=False)

    def coordinates(self):
        """Planar control points, shape (4, 4, 2)."""
        return self.centre + self.points @ self.frame


def charmap_net(n, lam, d, sector=0):
    """Characteristic-map control net of sector ``sector``.

    Examples
    --------
    >>> net = charmap_net(5, 0.5, [1.0] * 5)
    >>> net.points[1, 0].round(12).tolist()
    [1.0, 2.0, 0.0]
    """
    lam = check_lambda(lam)
    d = np.asarray(d, dtype=float)
    if d.shape != (n,) or np.any(d <= 0):
        raise ValueError("need n positive intervals")
    pts = np.zeros((4, 4, 3))
    pts[0, 0] = (1.0, 0.0, 0.0)
    for j, (a, b) in enumerate(_spoke_steps(lam), start=1):
        # a v + b (p - v)
        pts[j, 0] = pts[j - 1, 0] + (b, a - b, 0.0)
        pts[0, j] = pts[0, j - 1] + (b, 0.0, a - b)
    for j in range(1, 4):
        for k in range(1, 4):
            # the tabulated interior is indexed with the w-direction first
            pts[j, k] = coefficients("P", k, j, lam)
    centre, p, v, w = polygon_frame(n, lam, d, sector)
    return CharMapNet(n, lam, d, sector, pts, centre, np.array([p, v, w]))


def bezier_differences(net_or_lam):
    """Tabulated Bezier differences of the middle patch.

    Returns
    -------
    dict
        ``{'S': {(j, k): (c_p, c_v, c_w)}, 'T': {...}}``.
    """
    lam = net_or_lam.lam if isinstance(net_or_lam, CharMapNet) else check_lambda(net_or_lam)
    return {"S": {jk: coefficients("S", *jk, lam) for jk in S_INDICES},
            "T": {jk: coefficients("T", *jk, lam) for jk in T_INDICES}}


@dataclass
class InjectivityCertificate:
    """Result of :func:`certify_injectivity`.

    Margins are the worst values over all samples: ``s_min_pv`` is the
    smallest p or v coefficient of any ``S``, ``s_max_w`` the largest w
    coefficient, and likewise for ``T`` with v and w exchanged.
    ``cone_margin`` is the smallest frame coefficient of any net point in
    the ``(v, w)`` cone.
    """

    samples: int = 0
    s_min_pv: float = np.inf
    s_max_w: float = -np.inf
    t_min_pw: float = np.inf
    t_max_v: float = -np.inf
    cone_margin: float = np.inf
    failures: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.failures


def _sign_margins(lam):
    S = np.array([coefficients("S", *jk, lam) for jk in S_INDICES])
    T = np.array([coefficients("T", *jk, lam) for jk in T_INDICES])
    return S[:, :2].min(), S[:, 2].max(), T[:, [0, 2]].min(), T[:, 1].max()


def _cone_margin(net):
    """Smallest coordinate of the net points in the basis (v, w), per unit length."""
    _, v, w = net.frame
    M = np.column_stack([v, w])
    xy = (net.coordinates() - net.centre).reshape(-1, 2)
    ab = np.linalg.solve(M, xy.T).T
    return ab.min() / np.linalg.norm(ab, axis=1).max()


def certify_injectivity(valences, lambdas, d_samples):
    """Check the sign pattern of the Bezier differences and the sector containment.

    Parameters
    ----------
    valences : iterable of int
    lambdas : iterable of float
    d_samples : callable or iterable
        ``d_samples(n)`` yields interval vectors for valence ``n``; an
        iterable of vectors is used for every valence of matching length.

    Returns
    -------
    InjectivityCertificate
    """
    cert = InjectivityCertificate()
    signs = {}
    for n in valences:
        draws = list(d_samples(n)) if callable(d_samples) else [x for x in d_samples if len(x) == n]
        for lam in lambdas:
            lam = check_lambda(lam)
            if lam not in signs:
                signs[lam] = _sign_margins(lam)
            s_pv, s_w, t_pw, t_v = signs[lam]
            for d in draws:
                cert.samples += 1
                cert.s_min_pv = min(cert.s_min_pv, s_pv)
                cert.s_max_w = max(cert.s_max_w, s_w)
                cert.t_min_pw = min(cert.t_min_pw, t_pw)
                cert.t_max_v = max(cert.t_max_v, t_v)
                cone = min(_cone_margin(charmap_net(n, lam, d, i)) for i in range(n))
                cert.cone_margin = min(cert.cone_margin, cone)
                if s_pv < -SIGN_TOL or s_w > SIGN_TOL or t_pw < -SIGN_TOL or t_v > SIGN_TOL or cone < -SIGN_TOL:
                    cert.failures.append((n, lam, tuple(np.asarray(d).tolist())))
    return cert


def verify_scaling(n, lam, d, scale=None):
    """Max-norm residual of the polygon block acting on unit-circle vertices.

    ``scale`` defaults to ``lam``; passing another value measures how far
    the scaling relation is from holding with that factor.
    """
    m = assemble_Sn(n, lam, d)
    ang = 2 * np.pi * np.arange(n) / n
    P = np.column_stack([np.cos(ang), np.sin(ang)])
    X = P - stencil_weights(n, lam, d).beta @ P
    s = lam if scale is None else scale
    return float(np.abs(m.Q @ X - s * X).max())


def net_scaling_residual(n, lam, d):
    """Residual of the subdivision matrix on the net points nearest the polygon.

    Assembles the ``3n`` points ``P_i^{0,0}``, ``P_i^{1,0}`` and
    ``P_{i-1}^{0,1}`` from the per-sector nets, applies the matrix rows that
    only involve them and compares with scaling by ``lam`` about the centre.
    """
    m = assemble_Sn(n, lam, d)
    nets = [charmap_net(n, lam, d, i) for i in range(n)]
    X = np.zeros((3 * n, 2))
    for i, net in enumerate(nets):
        c = net.coordinates() - net.centre
        X[i] = c[0, 0]
        X[n + 2 * i] = c[1, 0]
        X[n + 2 * ((i + 1) % n) + 1] = c[0, 1]
    A = m.entries[:3 * n, :3 * n]
    return float(np.abs(A @ X - lam * X).max())


def coefficient_table(kind, j, k, lambdas):
    """Rows ``(lambda, c_v, c_p, c_w)`` for one tabulated difference."""
    lams = np.asarray(lambdas, dtype=float)
    c = coefficients(kind, j, k, lams)
    return np.column_stack([lams, c[:, 1], c[:, 0], c[:, 2]])


def coefficients_csv(kind, j, k, lambdas, header=None):
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["lambda", "c_v", "c_p", "c_w"])
    for row in coefficient_table(kind, j, k, lambdas):
        wr.writerow([f"{x:.15g}" for x in row])
    return buf.getvalue()


def plot_coefficients(which, indices, lambdas, outdir, header=None):
    """Write one SVG line plot and one CSV per index pair.

    Returns
    -------
    list of str
        Written paths, SVG and CSV alternating.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    from .io_utils import atomic_write

    valid = S_INDICES if which == "S" else T_INDICES if which == "T" else None
    if valid is None:
        raise ValueError("which must be 'S' or 'T'")
    lams = np.asarray(lambdas, dtype=float)
    if np.any(np.diff(lams) <= 0):
        raise ValueError("lambda grid must increase strictly")
    written = []
    plt.rcParams["svg.hashsalt"] = "thnus"
    for jk in indices:
        jk = tuple(jk)
        if jk not in valid:
            raise ValueError(f"no {which} difference with index {jk}")
        tab = coefficient_table(which, *jk, lams)
        fig, ax = plt.subplots(figsize=(5, 3.5))
        for col, name in ((1, "v"), (2, "p"), (3, "w")):
            ax.plot(tab[:, 0], tab[:, col], label=f"coefficient of {name}")
        ax.axhline(0.0, color="0.6", lw=0.8)
        ax.set_xlabel("lambda")
        ax.set_title(f"{which}[{jk[0]},{jk[1]}]" + (f"  ({header})" if header else ""), fontsize=8)
        ax.legend(fontsize=7)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
        stem = os.path.join(outdir, f"{which}_{jk[0]}_{jk[1]}")
        atomic_write(stem + ".svg", buf.getvalue())
        atomic_write(stem + ".csv", coefficients_csv(which, *jk, lams, header))
        written += [stem + ".svg", stem + ".csv"]
    return written
