"""Cubic B-splines written in knot-interval form.

A cubic B-spline control polygon ``P_0 .. P_m`` is described by the knot
interval on each edge ``(P_j, P_{j+1})``.  Point ``P_j`` sits at the knot
between its two incident intervals, so a span on edge ``(P_j, P_{j+1})`` is
governed by the seven intervals centred on that edge and by the four points
``P_{j-1} .. P_{j+2}``.  Zero intervals produce repeated knots.
"""

from __future__ import annotations

import numpy as np


def span_basis(intervals, xi):
    """Evaluate the four cubic B-splines living on a span.

    Parameters
    ----------
    intervals : array_like, shape (..., 7)
        Knot intervals ``e_{-3} .. e_3`` around the span; the span itself is
        ``e_0`` (index 3) and must be positive.
    xi : array_like
        Local coordinate in ``[0, 1]`` along the span.  Broadcast against the
        leading dimensions of ``intervals``.

    Returns
    -------
    values, derivs : ndarray, shape (..., 4)
        Basis values and derivatives with respect to ``xi``.
    """
    e = np.asarray(intervals, dtype=float)
    xi = np.asarray(xi, dtype=float)
    shape = np.broadcast_shapes(e.shape[:-1], xi.shape)
    e = np.broadcast_to(e, shape + (7,))
    xi = np.broadcast_to(xi, shape)
    knots = np.concatenate([np.zeros(shape + (1,)), np.cumsum(e, axis=-1)], axis=-1)
    span = e[..., 3]
    if np.any(span <= 0.0):
        raise ValueError("span interval must be positive")
    t = knots[..., 3] + xi * span
    left = [None] + [t - knots[..., 4 - j] for j in range(1, 4)]
    right = [None] + [knots[..., 3 + j] - t for j in range(1, 4)]
    # triangular Cox-de Boor table; the denominators always contain the span
    basis = [np.ones(shape)]
    quad = None
    for j in range(1, 4):
        if j == 3:
            quad = list(basis)
        new = []
        saved = np.zeros(shape)
        for r in range(j):
            temp = basis[r] / (right[r + 1] + left[j - r])
            new.append(saved + right[r + 1] * temp)
            saved = left[j - r] * temp
        new.append(saved)
        basis = new
    values = np.stack(basis, axis=-1)
    # derivative from the three quadratics on the span
    d = []
    for i in range(4):
        term = np.zeros(shape)
        if i >= 1:
            term = term + quad[i - 1] / (knots[..., i + 3] - knots[..., i])
        if i <= 2:
            term = term - quad[i] / (knots[..., i + 4] - knots[..., i + 1])
        d.append(3.0 * term)
    derivs = np.stack(d, axis=-1) * span[..., None]
    return values, derivs


def edge_weights(left, edge, right):
    """Mid-knot insertion weights for the new point on an edge.

    Parameters
    ----------
    left, edge, right : float
        Interval before the edge, the edge interval (positive) and the
        interval after it.

    Returns
    -------
    tuple of float
        Weights of the edge's start and end points.
    """
    s = 2.0 * (left + edge + right)
    return (edge + 2.0 * right) / s, (edge + 2.0 * left) / s


def vertex_weights(ll, left, right, rr):
    """Mid-knot insertion weights for the refined copy of a point.

    Parameters
    ----------
    ll, left, right, rr : float
        The two intervals on each side of the point.

    Returns
    -------
    tuple of float
        Weights of the previous point, the point itself and the next point.
        When both adjacent intervals vanish nothing is inserted and the point
        is kept.
    """
    if left + right <= 0.0:
        return 0.0, 1.0, 0.0
    wl = right * (left + 2.0 * right) / (4.0 * (left + right) * (ll + left + right))
    wr = left * (right + 2.0 * left) / (4.0 * (left + right) * (left + right + rr))
    return wl, 1.0 - wl - wr, wr


def split_weights(ll, left, right, rr):
    """Weights of the two copies created by inserting a zero interval at a point.

    Returns
    -------
    before, after : tuple of float
        ``(w_prev, w_self, w_next)`` for the copy on the previous side and on
        the next side.
    """
    s = ll + left + right
    before = (0.0, 1.0, 0.0) if s <= 0.0 else (right / s, (ll + left) / s, 0.0)
    s = left + right + rr
    after = (0.0, 1.0, 0.0) if s <= 0.0 else (0.0, (right + rr) / s, left / s)
    return before, after


def intervals_to_knots(intervals, start=0.0):
    """Cumulative knot values for a sequence of intervals."""
    return start + np.concatenate([[0.0], np.cumsum(np.asarray(intervals, dtype=float))])


def insert_knot(knots, coeffs, t):
    """Insert a single knot with Boehm's algorithm.

    Parameters
    ----------
    knots : array_like, shape (m + 5,)
        Full cubic knot vector for ``m + 1`` coefficients.
    coeffs : array_like, shape (m + 1, ...)
        Control coefficients.
    t : float
        New knot value; must lie inside a span of positive length or on an
        interior knot.

    Returns
    -------
    knots, coeffs : ndarray
        The refined knot vector and coefficients.
    """
    knots = np.asarray(knots, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    k = int(np.searchsorted(knots, t, side="right")) - 1
    out = []
    for i in range(len(coeffs) + 1):
        if i <= k - 3:
            out.append(coeffs[i])
        elif i > k:
            out.append(coeffs[i - 1])
        else:
            a = (t - knots[i]) / (knots[i + 3] - knots[i])
            out.append(a * coeffs[i] + (1.0 - a) * coeffs[i - 1])
    return np.insert(knots, k + 1, t), np.array(out)


def eval_curve(knots, coeffs, t):
    """Evaluate a cubic B-spline curve by de Boor's algorithm."""
    knots = np.asarray(knots, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    k = int(np.searchsorted(knots, t, side="right")) - 1
    k = min(max(k, 3), len(coeffs) - 1)
    d = [coeffs[j + k - 3].copy() for j in range(4)]
    for r in range(1, 4):
        for j in range(3, r - 1, -1):
            den = knots[j + 1 + k - r] - knots[j + k - 3]
            a = 0.0 if den == 0.0 else (t - knots[j + k - 3]) / den
            d[j] = (1.0 - a) * d[j - 1] + a * d[j]
    return d[3]
