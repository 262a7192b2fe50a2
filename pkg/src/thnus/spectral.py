"""Subdivision matrix around a polygon and numerical checks of its spectrum.

The matrix acts on the ``4n`` points nearest to an ``n``-gon once the
intervals next to the spokes have settled (``a_i = d_i``):

* rows ``0 .. n-1``: polygon vertices ``P_j^{00}``;
* rows ``n + 2j`` and ``n + 2j + 1``: the two points on either side of spoke
  ``j``, namely ``P_j^{10}`` and ``P_{j-1}^{01}``;
* rows ``3n + j``: the diagonal points ``P_j^{11}``.

The polygon block ``Q`` holds the tuned polygon rule, each spoke pair forms
a 2x2 block ``E_j`` and the diagonal points only feed themselves through
``1/16``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import check_lambda
from .subdivision import stencil_weights

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class SubdivisionMatrix:
    """Dense ``4n x 4n`` subdivision matrix with its parameters."""

    n: int
    lam: float
    d: np.ndarray
    entries: np.ndarray

    @property
    def Q(self):
        return self.entries[: self.n, : self.n]

    def E(self, j):
        r = self.n + 2 * j
        return self.entries[r:r + 2, r:r + 2]


def assemble_Sn(n, lam, d):
    """Assemble the stationary subdivision matrix of an ``n``-gon.

    Parameters
    ----------
    n : int
    lam : float
        Tuning factor in (1/4, 1).
    d : array_like, shape (n,)
        Positive spoke intervals.

    Returns
    -------
    SubdivisionMatrix

    Examples
    --------
    >>> m = assemble_Sn(5, 0.26, [1.0] * 5)
    >>> round(float(m.Q[0, 0]), 12)
    0.356
    """
    st = stencil_weights(n, lam, d)
    d = st.d
    S = np.zeros((4 * n, 4 * n))
    S[:n, :n] = st.matrix()
    for j in range(n):
        dm, dp = d[(j - 1) % n], d[(j + 1) % n]
        s = 8.0 * (dm + dp)
        r10, r01 = n + 2 * j, n + 2 * j + 1
        jm = (j - 1) % n
        # spoke j separates P_j (with P_j^{10}) from P_{j-1} (with P_{j-1}^{01})
        S[r10, j] += 3.0 * (2.0 * dm + dp) / s
        S[r10, jm] += 3.0 * dp / s
        S[r10, r10] += (2.0 * dm + dp) / s
        S[r10, r01] += dp / s
        S[r01, j] += 3.0 * dm / s
        S[r01, jm] += 3.0 * (dm + 2.0 * dp) / s
        S[r01, r10] += dm / s
        S[r01, r01] += (dm + 2.0 * dp) / s
    for j in range(n):
        r = 3 * n + j
        own01 = n + 2 * ((j + 1) % n) + 1
        S[r, j] += 9.0 / 16.0
        S[r, n + 2 * j] += 3.0 / 16.0
        S[r, own01] += 3.0 / 16.0
        S[r, r] += 1.0 / 16.0
    return SubdivisionMatrix(n, st.lam, d, S)


def spectrum(m):
    """All eigenvalues ordered by decreasing modulus, then decreasing real part.

    Raises
    ------
    ArithmeticError
        If an eigenpair misses the residual bound.
    """
    A = m.entries if isinstance(m, SubdivisionMatrix) else np.asarray(m, dtype=float)
    vals, vecs = np.linalg.eig(A)
    res = np.linalg.norm(A @ vecs - vecs * vals, axis=0) / np.maximum(np.linalg.norm(vecs, axis=0), 1e-300)
    if np.max(res) > RESIDUAL_TOL:
        raise ArithmeticError(f"eigenpair residual {np.max(res):.3e} exceeds {RESIDUAL_TOL}")
    order = np.lexsort((-vals.imag, -np.round(vals.real, 12), -np.round(np.abs(vals), 12)))
    return vals[order]


@dataclass(frozen=True)
class SpectralCertificate:
    n: int
    lam: float
    d: np.ndarray
    eigenvalues: np.ndarray
    gap_one: float
    gap_sub: float
    margin: float
    passed: bool

    @property
    def lam4_abs(self):
        return float(abs(self.eigenvalues[3]))


def certify_spectral_conditions(n, lam, d, tol_one=1e-10, tol_sub=1e-8):
    """Check the dominant, subdominant and remaining eigenvalues.

    Passing means the leading eigenvalue is 1, the next two equal ``lam``
    and every other eigenvalue is strictly smaller than ``lam`` in modulus.

    Returns
    -------
    SpectralCertificate
        ``margin`` is ``lam - |mu_4|``.
    """
    lam = check_lambda(lam)
    ev = spectrum(assemble_Sn(n, lam, d))
    gap_one = float(abs(ev[0] - 1.0))
    gap_sub = float(max(abs(ev[1] - lam), abs(ev[2] - lam)))
    margin = float(lam - abs(ev[3]))
    ok = gap_one <= tol_one and gap_sub <= tol_sub and margin > 0.0
    return SpectralCertificate(n, lam, np.asarray(d, dtype=float), ev, gap_one, gap_sub, margin, ok)


def random_intervals(rng, n, low=0.1, high=10.0):
    """Log-uniform positive intervals."""
    return np.exp(rng.uniform(np.log(low), np.log(high), n))


def spectrum_sweep(valences, lambdas, draws, seed=0):
    """Certificates for every valence, tuning factor and random draw.

    One generator seeded with ``seed`` produces the draws in loop order
    (valence, tuning factor, draw).
    """
    rng = np.random.default_rng(seed)
    out = []
    for n in valences:
        for lam in lambdas:
            for _ in range(draws):
                out.append(certify_spectral_conditions(n, lam, random_intervals(rng, n)))
    return out


def certificates_csv(certs, seed, header=None):
    """CSV text with columns n, lambda, seed, lam1, lam2, lam3, lam4_abs, pass."""
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "lambda", "seed", "lam1", "lam2", "lam3", "lam4_abs", "pass"])
    for c in certs:
        ev = c.eigenvalues
        w.writerow([c.n, f"{c.lam:.6g}", seed, f"{ev[0].real:.15f}", f"{ev[1].real:.15f}",
                    f"{ev[2].real:.15f}", f"{c.lam4_abs:.15f}", int(c.passed)])
    return buf.getvalue()
