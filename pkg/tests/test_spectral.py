import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thnus.spectral import (assemble_Sn, certificates_csv, certify_spectral_conditions, random_intervals,
                            spectrum, spectrum_sweep)

lams = st.floats(0.2501, 0.99)
spoke = st.floats(0.1, 10.0)


def test_uniform_pentagon_entries():
    m = assemble_Sn(5, 0.26, [1.0] * 5)
    # lam + (1 - lam) beta - 2 (n - 3) lam alpha with alpha = 1/20, beta = 1/5
    assert m.Q[0, 0] == pytest.approx(0.26 + 0.74 * 0.2 - 4 * 0.26 * 0.05, abs=1e-15)
    for j in range(5):
        assert np.allclose(m.E(j), [[3 / 16, 1 / 16], [1 / 16, 3 / 16]], atol=1e-15)


def test_block_eigenvalues():
    rng = np.random.default_rng(4)
    n = 6
    m = assemble_Sn(n, 0.4, random_intervals(rng, n))
    ev = spectrum(m)
    assert np.sum(np.abs(ev - 1 / 16) < 1e-9) == n
    assert np.sum(np.abs(ev - 1 / 4) < 1e-9) >= n
    assert np.sum(np.abs(ev - 1 / 8) < 1e-9) >= n
    for j in range(n):
        assert np.allclose(np.sort(np.linalg.eigvals(m.E(j)).real), [1 / 8, 1 / 4], atol=1e-14)


def test_leading_eigenvalues_uniform():
    ev = spectrum(assemble_Sn(5, 0.26, [1.0] * 5))
    assert np.allclose(ev[:3], [1.0, 0.26, 0.26], atol=1e-12)
    assert abs(ev[3]) < 0.26


def test_out_of_range_lambda():
    with pytest.raises(ValueError):
        certify_spectral_conditions(5, 0.2, [1.0] * 5)


@pytest.mark.parametrize("n, lam", [(3, 0.26), (8, 0.65)])
def test_random_instances_pass(n, lam):
    rng = np.random.default_rng(n)
    assert certify_spectral_conditions(n, lam, random_intervals(rng, n)).passed


@settings(max_examples=150, deadline=None)
@given(st.integers(3, 10), lams, st.data())
def test_rows_sum_to_one(n, lam, data):
    d = data.draw(st.lists(spoke, min_size=n, max_size=n))
    m = assemble_Sn(n, lam, d)
    assert np.allclose(m.entries.sum(axis=1), 1.0, atol=1e-13)
    # block lower-triangular structure
    assert np.all(m.entries[:n, n:] == 0)
    assert np.all(m.entries[n:3 * n, 3 * n:] == 0)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 6, 7, 8]), st.floats(0.2501, 0.7), st.data())
def test_certificate_and_relabel_invariance(n, lam, data):
    d = np.array(data.draw(st.lists(spoke, min_size=n, max_size=n)))
    cert = certify_spectral_conditions(n, lam, d)
    assert cert.passed
    shift = data.draw(st.integers(1, n - 1))
    other = spectrum(assemble_Sn(n, lam, np.roll(d, shift)))
    key = lambda z: np.lexsort((np.round(z.imag, 8), np.round(z.real, 8)))
    a, b = cert.eigenvalues, other
    assert np.allclose(a[key(a)], b[key(b)], atol=1e-10)


def left_unit_vector(S):
    vals, vecs = np.linalg.eig(S.T)
    u = vecs[:, np.argmin(np.abs(vals - 1))].real
    return u / u.sum()


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 6, 7, 8]), st.floats(0.2501, 2 / 3), st.floats(0.1, 10.0))
def test_uniform_intervals_nonnegative(n, lam, d):
    # with equal intervals every entry is at least (2 - 3 lam) / (2 n) >= 0
    S = assemble_Sn(n, lam, [d] * n).entries
    assert S.min() >= -1e-15
    assert left_unit_vector(S).min() >= -1e-12


def test_nonuniform_intervals_can_give_negative_weights():
    S = assemble_Sn(5, 0.5, [1.0, 1.0, 1.0, 4.0, 6.0]).entries
    assert S[:5, :5].min() < -0.01
    assert left_unit_vector(S).min() < 0
    assert certify_spectral_conditions(5, 0.5, [1.0, 1.0, 1.0, 4.0, 6.0]).passed


def test_sweep_is_reproducible():
    a = certificates_csv(spectrum_sweep([3, 5], [0.26, 0.5], 3, seed=7), seed=7, header="h")
    b = certificates_csv(spectrum_sweep([3, 5], [0.26, 0.5], 3, seed=7), seed=7, header="h")
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "# h"
    assert lines[1] == "n,lambda,seed,lam1,lam2,lam3,lam4_abs,pass"
    assert len(lines) == 2 + 12


def test_residual_guard(monkeypatch):
    import thnus.spectral as mod

    eig = np.linalg.eig

    def bad_eig(a):
        vals, vecs = eig(a)
        return vals + 1e-3, vecs

    monkeypatch.setattr(mod.np.linalg, "eig", bad_eig)
    with pytest.raises(ArithmeticError):
        spectrum(np.diag([1.0, 0.5]))
