"""Randomised property checks over generated inputs."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from fsieve.blockboot import trapezoid_taper
from fsieve.fcurve import FunctionalSeries, Grid
from fsieve.fpca import fpca, scores
from fsieve.select import gvr_values, vr_values
from fsieve.stats import p_value, two_sample_statistic
from fsieve.varfit import fit_var

SETTINGS = settings(max_examples=40, deadline=None)


@st.composite
def series(draw, min_n=6, max_n=40):
    n = draw(st.integers(min_n, max_n))
    T = draw(st.integers(5, 15))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    rough = rng.standard_normal((n, T)) @ np.diag(1.0 / np.arange(1, T + 1))
    return FunctionalSeries(Grid.uniform(T), rough)


@SETTINGS
@given(series())
def test_fpca_identities(x):
    mean, eig = fpca(x)
    w = x.grid.weights
    centred = x.values - mean.values
    total = np.mean(centred**2 @ w)
    assert abs(eig.eigenvalues.sum() - total) <= 1e-8 * max(1.0, total)
    gram = (eig.eigenfunctions * w) @ eig.eigenfunctions.T
    np.testing.assert_allclose(gram, np.eye(eig.size), atol=1e-8)
    xi = scores(x, eig, eig.size)
    np.testing.assert_allclose(np.mean(xi**2, axis=0), eig.eigenvalues, atol=1e-8 * max(1.0, total))
    assert np.all(np.diff(eig.eigenvalues) <= 1e-12)


@SETTINGS
@given(series(min_n=15))
def test_ratio_criteria_bounded_and_monotone(x):
    _, eig = fpca(x)
    vr = vr_values(eig.eigenvalues)
    assert np.all(np.diff(vr) >= -1e-12) and abs(vr[-1] - 1) < 1e-10
    gvr = gvr_values(x, eig)
    assert np.all(gvr >= -1e-12) and np.all(gvr <= 1 + 1e-10)
    assert np.all(np.diff(gvr) >= -1e-10)


@SETTINGS
@given(series(min_n=20), st.integers(1, 3), st.integers(1, 2))
def test_yule_walker_stable(x, m, p):
    _, eig = fpca(x)
    m = min(m, eig.size)
    model = fit_var(scores(x, eig, m), p)
    assert model.spectral_radius() < 1


@SETTINGS
@given(st.integers(1, 40), st.floats(0, 0.5))
def test_taper_normalisation(b, c):
    w = trapezoid_taper(b, c)
    assert abs(np.sum(w**2) - b) < 1e-12 * max(1, b)
    np.testing.assert_allclose(w, w[::-1], atol=1e-12)


@SETTINGS
@given(series(), series())
def test_two_sample_symmetry(x, y):
    if x.grid.size != y.grid.size:
        y = FunctionalSeries(x.grid, np.resize(y.values, (y.n, x.grid.size)))
    u = two_sample_statistic(x, y)
    assert u >= 0 and u == two_sample_statistic(y, x)


@SETTINGS
@given(st.floats(0, 10), st.lists(st.floats(0, 10), min_size=1, max_size=50))
def test_p_value_bounds(u, draws):
    p = p_value(u, np.array(draws))
    assert 1 / (len(draws) + 1) <= p <= 1
