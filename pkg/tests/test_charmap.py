from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latex_oracle import evaluate, expressions
from thnus._charmap_tables import TABLES
from thnus.charmap import (S_INDICES, T_INDICES, bezier_differences, charmap_net, certify_injectivity,
                           coefficients, coefficients_csv, net_scaling_residual, plot_coefficients,
                           verify_scaling)
from thnus.spectral import random_intervals

EXACT = [Fraction(3, 8), Fraction(1, 2), Fraction(5, 8)]


@pytest.fixture(scope="module")
def listed():
    return expressions()


def test_listing_is_complete(listed):
    assert len([k for k in listed if k[0] == "P"]) == 9
    assert sorted((j, k) for (c, j, k) in listed if c == "S") == sorted(S_INDICES)
    assert sorted((j, k) for (c, j, k) in listed if c == "T") == sorted(T_INDICES)


@pytest.mark.parametrize("lam", EXACT, ids=str)
def test_tables_match_exact_evaluation(listed, lam):
    for (kind, j, k), text in listed.items():
        exact = np.array([float(x) for x in evaluate(text, lam)])
        got = coefficients(kind, j, k, float(lam))
        assert np.allclose(got, exact, rtol=1e-12, atol=1e-12 * np.abs(exact).max()), (kind, j, k)


def test_spoke_point_at_half():
    # with lam = 1/2 the step along p - v vanishes and the step along v is 2
    assert np.allclose(charmap_net(5, 0.5, [1.0] * 5).points[1, 0], [1.0, 2.0, 0.0], atol=1e-14)


def test_diagonal_point_at_half(listed):
    exact = evaluate(listed[("P", 1, 1)], Fraction(1, 2))
    assert exact == (Fraction(15, 7), Fraction(6, 7), Fraction(6, 7))
    assert np.allclose(charmap_net(6, 0.5, [1.0] * 6).points[1, 1], [15 / 7, 6 / 7, 6 / 7], atol=1e-14)


def test_diagonal_point_eigen_relation():
    """Row ``(9, 3, 3, 1) / 16`` of the matrix fixes the diagonal point of an eigenvector.

    The tabulated interior agrees with it at 1/2 only; the scaling check on
    the inner points is unaffected.
    """
    for lam, agree in ((0.5, True), (0.3, False), (0.7, False)):
        P = charmap_net(5, lam, [1.0] * 5).points
        eig = (9 * P[0, 0] + 3 * P[1, 0] + 3 * P[0, 1]) / (16 * lam - 1)
        assert np.allclose(P[1, 1], eig, atol=1e-12) == agree


def test_coefficients_finite_and_continuous():
    lam = np.arange(0.251, 0.9995, 1e-3)
    for kind, idx in (("P", [(j, k) for j in (1, 2, 3) for k in (1, 2, 3)]), ("S", S_INDICES), ("T", T_INDICES)):
        for jk in idx:
            c = coefficients(kind, *jk, lam)
            assert np.all(np.isfinite(c))
            # continuity: no denominator changes sign between grid points
            for _, den in TABLES[(kind, *jk)]:
                q = np.polyval(den, lam)
                assert np.all(q != 0) and (np.all(q > 0) or np.all(q < 0))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2501, 0.9999))
def test_row_column_mirror(lam):
    for j, k in S_INDICES:
        s = coefficients("S", j, k, lam)
        t = coefficients("T", k, j, lam)
        assert np.allclose(t, s[[0, 2, 1]], rtol=1e-12, atol=1e-14)


def test_sign_pattern_at_half():
    diff = bezier_differences(0.5)
    cp, cv, cw = diff["S"][(0, 0)]
    assert cp > 0 and cv > 0 and cw < 0
    cp, cv, cw = diff["T"][(0, 0)]
    assert cp > 0 and cv < 0 and cw > 0


def test_last_column_keeps_its_signs():
    c = coefficients("T", 3, 0, np.linspace(0.26, 0.99, 400))
    assert np.all(c[:, 1] < 0) and np.all(c[:, 0] > 0) and np.all(c[:, 2] > 0)


@pytest.mark.xfail(strict=True, reason="tabulated p-coefficient of this difference dips below zero above ~0.75")
def test_middle_difference_signs_over_whole_range():
    c = coefficients("S", 1, 1, np.linspace(0.26, 0.99, 400))
    assert np.all(c[:, 1] > 0) and np.all(c[:, 0] > 0) and np.all(c[:, 2] < 0)


def test_p_coefficient_crosses_zero():
    # the sign change sits between 0.74 and 0.75; v and w keep their signs
    lo, hi = coefficients("S", 1, 1, [0.74, 0.75])
    assert lo[0] > 0 > hi[0]
    c = coefficients("S", 1, 1, 0.9)
    assert c[0] == pytest.approx(-0.0210, abs=1e-4)
    assert c[1] > 0 > c[2]


def test_injectivity_certificate_up_to_062():
    lams = np.round(np.arange(0.26, 0.63, 0.04), 2)
    cert = certify_injectivity([5], lams, [[1.0] * 5])
    assert cert.passed and cert.samples == len(lams)
    cert = certify_injectivity([3, 8], lams, lambda n: [random_intervals(np.random.default_rng(n), n)])
    assert cert.passed
    single = certify_injectivity([5], [0.26], [[1.0] * 5])
    assert single.passed and single.cone_margin > 0 and single.s_min_pv > 0


def test_injectivity_certificate_flags_large_lambda():
    cert = certify_injectivity([5], [0.66, 0.9], [[1.0] * 5])
    assert not cert.passed
    assert cert.s_min_pv < 0
    # containment in the sector still holds
    assert cert.cone_margin > 0


def test_scaling_examples():
    assert verify_scaling(5, 0.26, [1.0] * 5) <= 1e-12
    d = random_intervals(np.random.default_rng(11), 7)
    assert verify_scaling(7, 0.65, d) <= 1e-12
    # matrix built at 0.26, scaling factor 0.27: off by 0.01 |P - C| = 0.01
    assert verify_scaling(5, 0.26, [1.0] * 5, scale=0.27) == pytest.approx(0.01, rel=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 8), st.floats(0.2501, 0.98), st.data())
def test_net_reproduces_scaling(n, lam, data):
    d = data.draw(st.lists(st.floats(0.1, 10.0), min_size=n, max_size=n))
    assert net_scaling_residual(n, lam, d) <= 1e-10


@pytest.mark.parametrize("n", [3, 5, 8])
def test_uniform_net_rotational_symmetry(n):
    c, s = np.cos(2 * np.pi / n), np.sin(2 * np.pi / n)
    rot = np.array([[c, -s], [s, c]])
    for i in range(n):
        a = charmap_net(n, 0.4, [1.0] * n, i).coordinates()
        b = charmap_net(n, 0.4, [1.0] * n, (i + 1) % n).coordinates()
        assert np.abs(a @ rot.T - b).max() < 1e-12


def test_csv_rows():
    lams = np.round(np.arange(0.26, 0.99, 0.01), 2)
    lines = coefficients_csv("S", 1, 1, lams, header="h").splitlines()
    assert lines[:2] == ["# h", "lambda,c_v,c_p,c_w"]
    assert len(lines) == 2 + len(lams)
    col = [float(r.split(",")[0]) for r in lines[2:]]
    assert np.all(np.diff(col) > 0)


def test_plots_are_deterministic(tmp_path):
    lams = np.linspace(0.26, 0.98, 50)
    a = plot_coefficients("T", [(3, 0)], lams, tmp_path / "a", header="h")
    b = plot_coefficients("T", [(3, 0)], lams, tmp_path / "b", header="h")
    assert [p.rsplit("/", 1)[1] for p in a] == ["T_3_0.svg", "T_3_0.csv"]
    for x, y in zip(a, b):
        assert open(x, "rb").read() == open(y, "rb").read()
    with pytest.raises(ValueError):
        plot_coefficients("U", [(0, 0)], lams, tmp_path)
