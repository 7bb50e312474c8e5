import math

import numpy as np
import pytest

from fsieve.fcurve import FunctionalSeries
from fsieve.fpca import fpca, scores
from fsieve.select import (
    aicc_select,
    aicc_values,
    default_criterion,
    default_p_max,
    dvr_ratio,
    dvr_values,
    fourier_frequencies,
    gvr_select,
    gvr_values,
    m_hat,
    m_n_E,
    score_fft,
    vr_select,
    vr_values,
)


def direct_dft(x, omega):
    """(2 pi n)^-1/2 sum_{t=1}^n x_t e^{-i omega t}, one frequency at a time."""
    n = x.shape[0]
    t = np.arange(1, n + 1)
    return np.array([np.exp(-1j * w * t) @ x for w in omega]) / np.sqrt(2 * np.pi * n)


def naive_gvr(series, eig, m, tail=True):
    """Literal double-sum evaluation of the GVR / DVR ratio."""
    n = series.n
    w = series.grid.weights
    _, omega = fourier_frequencies(n)
    xi = scores(series, eig, eig.size)
    centred = series.values - series.values.mean(axis=0)
    num = 0.0
    for wj in omega:
        J = direct_dft(xi, [wj])[0]
        Jm = direct_dft(xi, [-wj])[0]
        for l in range(m):
            for r in range(m):
                num += abs(J[l] * Jm[r]) ** 2
    num *= 2 * np.pi / n
    den = 0.0
    for wj in omega:
        Jc = direct_dft(centred, [wj])[0]
        kernel = np.outer(Jc, Jc.conj())  # I_{n,w}(tau_1, tau_2)
        den += np.sum(w[:, None] * w[None, :] * np.abs(kernel) ** 2)
    den *= 2 * np.pi / n
    if tail:
        num += np.sum(eig.eigenvalues[m:] ** 2) / (2 * np.pi)
    return num / den


@pytest.fixture
def small_series(rng, grid):
    x = rng.standard_normal((8, grid.size)).cumsum(axis=1) * 0.3
    return FunctionalSeries(grid, x)


class TestVR:
    def test_forced_arithmetic(self):
        rep = vr_select(np.array([4.0, 3, 2, 1]), 0.8)
        assert rep.chosen == 3
        np.testing.assert_allclose(rep.values, [0.4, 0.7, 0.9, 1.0])

    def test_q_one(self):
        assert vr_select(np.array([1.0, 1, 0]), 1.0).chosen == 2

    def test_all_zero(self):
        with pytest.raises(ValueError):
            vr_select(np.zeros(3), 0.5)

    def test_monotone(self, random_series):
        _, eig = fpca(random_series)
        assert np.all(np.diff(vr_values(eig.eigenvalues)) >= 0)


class TestScoreFFT:
    def test_constant_column(self):
        x = np.full((16, 1), 3.0)
        x = x - x.mean(axis=0)
        np.testing.assert_allclose(score_fft(x), 0, atol=1e-14)

    def test_matches_direct_sum(self, rng):
        x = rng.standard_normal((11, 3))
        _, omega = fourier_frequencies(11)
        np.testing.assert_allclose(score_fft(x), direct_dft(x, omega), atol=1e-12)

    def test_cosine_energy(self):
        n, k = 32, 5
        t = np.arange(1, n + 1)
        x = np.cos(2 * np.pi * k * t / n)[:, None]
        j, _ = fourier_frequencies(n)
        power = np.abs(score_fft(x)[:, 0]) ** 2
        peak = set(j[power > 1e-10])
        assert peak == {-k, k}

    def test_conjugate_symmetry(self, rng):
        x = rng.standard_normal((13, 2))
        J = score_fft(x)
        j, _ = fourier_frequencies(13)
        for idx, jj in enumerate(j):
            mirror = int(np.flatnonzero(j == -jj)[0])
            np.testing.assert_allclose(J[mirror], J[idx].conj(), atol=1e-12)

    def test_frequency_set(self):
        j, omega = fourier_frequencies(9)
        assert list(j) == [-4, -3, -2, -1, 1, 2, 3, 4]
        np.testing.assert_allclose(omega, 2 * np.pi * j / 9)


class TestGVR:
    def test_fast_form_matches_naive(self, small_series):
        _, eig = fpca(small_series)
        fast = gvr_values(small_series, eig)
        for m in range(0, 6):
            assert fast[m] == pytest.approx(naive_gvr(small_series, eig, m), rel=1e-10)

    def test_dvr_fast_form_matches_naive(self, small_series):
        _, eig = fpca(small_series)
        fast = dvr_values(small_series, eig)
        for m in range(0, 6):
            assert fast[m] == pytest.approx(naive_gvr(small_series, eig, m, tail=False), rel=1e-10, abs=1e-14)

    def test_exact_span(self, rng, grid):
        # curves in a 2-d span: numerator equals denominator at m = 2
        t = grid.points
        basis = np.stack([np.sin(2 * np.pi * t), t - 0.5])
        series = FunctionalSeries(grid, rng.standard_normal((40, 2)) @ basis)
        _, eig = fpca(series)
        vals = gvr_values(series, eig)
        assert vals[2] == pytest.approx(1.0, abs=1e-10)
        assert gvr_select(series, eig, 0.85).chosen <= 2
        assert dvr_ratio(series, eig, 2) == pytest.approx(1.0, abs=1e-8)

    def test_monotone(self, random_series):
        _, eig = fpca(random_series)
        assert np.all(np.diff(gvr_values(random_series, eig)) >= -1e-12)
        dvr = dvr_values(random_series, eig)
        assert dvr[0] == 0.0
        assert np.all(np.diff(dvr) >= -1e-12)

    def test_constant_data_white_noise(self, grid):
        series = FunctionalSeries(grid, np.tile(np.cos(grid.points), (10, 1)))
        _, eig = fpca(series)
        rep = gvr_select(series, eig)
        assert rep.chosen == 0 and rep.details["white_noise"]
        with pytest.raises(ValueError):
            dvr_values(series, eig)

    def test_short_series(self, grid, rng):
        series = FunctionalSeries(grid, rng.standard_normal((3, grid.size)))
        _, eig = fpca(series)
        with pytest.raises(ValueError):
            gvr_values(series, eig)


class TestMnE:
    def test_direct_evaluation(self):
        n = 10_000
        assert math.sqrt(n) / math.log(n) == pytest.approx(10.857, abs=1e-3)
        assert m_n_E(np.array([1.0, 0.5, 0.01]), n) == 2

    def test_equal_eigenvalues(self):
        assert m_n_E(np.array([2.0, 2.0, 2.0, 0.0]), 50) == 3

    def test_at_least_one(self):
        assert m_n_E(np.array([1.0, 1e-9]), 3) == 1

    def test_log_base(self):
        lam = 1 / np.arange(1, 22) ** 2
        # decimal log gives the larger threshold sqrt(n)/log10(n)
        assert m_n_E(lam, 1000, log_base=10) >= m_n_E(lam, 1000)

    def test_nonpositive_leading(self):
        with pytest.raises(ValueError):
            m_n_E(np.array([0.0, 0.0]), 10)


class TestMHat:
    def test_max_of_parts(self, fma_series):
        _, eig = fpca(fma_series)
        rep = m_hat(fma_series, eig, 0.85, "vr")
        assert rep.chosen == max(rep.details["m_Q"], rep.details["m_E"])
        assert rep.chosen in (rep.details["m_Q"], rep.details["m_E"])

    def test_default_criterion(self):
        assert default_criterion(100) == "vr"
        assert default_criterion(101) == "gvr"

    def test_unknown_criterion(self, fma_series):
        _, eig = fpca(fma_series)
        with pytest.raises(ValueError):
            m_hat(fma_series, eig, 0.85, "bic")


def simulate_ar(coefs, n, rng, burn=200):
    x = np.zeros(n + burn)
    e = rng.standard_normal(n + burn)
    for t in range(n + burn):
        x[t] = e[t] + sum(c * x[t - j - 1] for j, c in enumerate(coefs) if t - j - 1 >= 0)
    return x[burn:, None]


class TestAICC:
    # The residual covariance uses divisor n over the n - p residuals, as in the
    # criterion's definition. That shrinks log|Sigma| by about p/n per order, so on
    # white noise the choice is spread out; the mode is still the smallest order.
    def test_white_noise_modal_order(self):
        chosen = []
        for seed in range(100):
            x = np.random.default_rng(seed).standard_normal((200, 1))
            chosen.append(aicc_select(x - x.mean()).chosen)
        counts = np.bincount(chosen)
        assert int(np.argmax(counts)) == 1

    def test_ar2_found(self):
        chosen = []
        for seed in range(30):
            x = simulate_ar([0.5, -0.6], 300, np.random.default_rng(seed))
            chosen.append(aicc_select(x - x.mean()).chosen)
        assert min(chosen) >= 2  # never underfits a strong AR(2)
        assert int(np.argmax(np.bincount(chosen))) == 2

    def test_formula(self, rng):
        x = rng.standard_normal((60, 2))
        cands, vals = aicc_values(x, 3)
        from fsieve.varfit import autocovariances, raw_residuals, yule_walker_coefficients

        acov = autocovariances(x, 3)
        for p, v in zip(cands, vals):
            e = raw_residuals(x, yule_walker_coefficients(acov, p))
            S = e.T @ e / 60
            ref = 60 * np.log(np.linalg.det(S)) + 60 * (60 * 2 + p * 4) / (60 - 2 * (p + 1) - 1)
            assert v == pytest.approx(ref, rel=1e-12)

    def test_divergent_penalty_never_chosen(self):
        # n - m(p + 1) - 1 = 1 at p = 7 for n = 10, m = 1: penalty 10 * 17
        for seed in range(50):
            x = np.random.default_rng(seed).standard_normal((10, 1))
            rep = aicc_select(x - x.mean(), 7)
            assert rep.chosen < 7
        with pytest.raises(ValueError, match="infeasible"):
            aicc_values(np.ones((10, 1)), 8)

    def test_infeasible(self, rng):
        with pytest.raises(ValueError):
            aicc_values(rng.standard_normal((10, 2)), 4)

    def test_default_p_max(self):
        assert default_p_max(100, 3) == min(10, int((100 / 3 - 1) // 2) - 1)
        assert default_p_max(1000, 2) == 10
        assert default_p_max(50, 0) == 0
