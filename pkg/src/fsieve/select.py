"""Choosing the number of principal components m and the VAR order p.

The generalized variance ratio uses the periodogram operator
``I_{n,w} = J_{n,w} (x) conj(J_{n,w})``, which is rank one. That gives
``||I_{n,w}||_HS^2 = ||J_{n,w}||^4`` and
``sum_{l,r<=m} |I_lr(w)|^2 = (sum_{l<=m} |J_l(w)|^2)^2``, so every criterion
value costs O(n T) after one FFT.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from fsieve.fcurve import FunctionalSeries
from fsieve.fpca import DiagnosticWarning, EigenSystem, scores as score_matrix
from fsieve.varfit import SingularSystemError, autocovariances, raw_residuals, yule_walker_coefficients

DEFAULT_Q = 0.85
SHORT_SERIES = 100
RATIO_SLACK = 1e-12
CONSTANT_TOL = 1e-24


@dataclass
class SelectionReport:
    criterion: str
    chosen: int
    candidates: list[int] = field(default_factory=list)
    values: list[float] = field(default_factory=list)
    threshold: float | None = None
    details: dict = field(default_factory=dict)

    def rows(self) -> list[tuple[int, float, bool]]:
        return [(c, v, c == self.chosen) for c, v in zip(self.candidates, self.values)]


def vr_values(eigenvalues: np.ndarray) -> np.ndarray:
    """``VR(m)`` for m = 1..K: cumulative share of the total variance."""
    lam = np.asarray(eigenvalues, dtype=float)
    total = lam.sum()
    if not total > 0:
        raise ValueError("all eigenvalues are zero; the variance ratio is undefined")
    return np.cumsum(lam) / total


def vr_select(eigenvalues: np.ndarray, Q: float = DEFAULT_Q) -> SelectionReport:
    if not 0 < Q <= 1:
        raise ValueError(f"Q must lie in (0, 1], got {Q}")
    ratios = vr_values(eigenvalues)
    hits = np.flatnonzero(ratios >= Q - RATIO_SLACK)
    chosen = int(hits[0]) + 1
    return SelectionReport(
        "VR", chosen, list(range(1, ratios.size + 1)), ratios.tolist(), Q
    )


def fourier_frequencies(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Indices ``j`` in ``{-N..-1, 1..N}``, ``N = n // 2``, and ``w_j = 2 pi j / n``."""
    N = n // 2
    j = np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])
    return j, 2 * np.pi * j / n


def dft_at_fourier_frequencies(values: np.ndarray) -> np.ndarray:
    """``(2 pi n)^-1/2 sum_{t=1}^n x_t e^{-i w_j t}`` for every column, rows ordered as F_n."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    j, omega = fourier_frequencies(n)
    raw = np.fft.fft(values, axis=0)[np.mod(j, n)]
    # fft sums over t = 0..n-1; shifting to t = 1..n multiplies by e^{-i w}
    phase = np.exp(-1j * omega).reshape((-1,) + (1,) * (values.ndim - 1))
    return raw * phase / np.sqrt(2 * np.pi * n)


def score_fft(scores: np.ndarray) -> np.ndarray:
    scores = np.asarray(scores, dtype=float)
    if scores.shape[0] < 2:
        raise ValueError("need at least two observations")
    return dft_at_fourier_frequencies(scores)


def _periodogram_terms(series: FunctionalSeries, eig: EigenSystem):
    n = series.n
    xi = score_matrix(series, eig, eig.size)
    J_scores = np.abs(dft_at_fourier_frequencies(xi)) ** 2  # (|F_n|, K)
    centred = series.values - series.values.mean(axis=0)
    J_curve = np.abs(dft_at_fourier_frequencies(centred)) ** 2  # (|F_n|, T)
    curve_sq = J_curve @ series.grid.weights  # ||J_{n,w}||^2
    denom = 2 * np.pi / n * np.sum(curve_sq**2)
    cum = np.concatenate([np.zeros((J_scores.shape[0], 1)), np.cumsum(J_scores, axis=1)], axis=1)
    dep = 2 * np.pi / n * np.sum(cum**2, axis=0)  # index m = 0..K
    return dep, denom


def _is_constant(series: FunctionalSeries, eig: EigenSystem) -> bool:
    # total variance at rounding level relative to the size of the curves
    scale = max(1.0, float(np.mean(series.values**2)))
    return float(np.sum(eig.eigenvalues)) <= CONSTANT_TOL * scale


def gvr_values(series: FunctionalSeries, eig: EigenSystem) -> np.ndarray:
    """``GVR_n(m)`` for m = 0..K, with K the number of eigenpairs in ``eig``."""
    if series.n < 4:
        raise ValueError("GVR needs at least 4 observations")
    if _is_constant(series, eig):
        return np.ones(eig.size + 1)
    dep, denom = _periodogram_terms(series, eig)
    if denom <= 0:
        raise ValueError("GVR denominator vanishes for non-degenerate data")
    lam2 = np.asarray(eig.eigenvalues, dtype=float) ** 2
    tail = np.concatenate([np.cumsum(lam2[::-1])[::-1], [0.0]]) / (2 * np.pi)
    return (dep + tail) / denom


def gvr_select(series: FunctionalSeries, eig: EigenSystem, Q: float = DEFAULT_Q) -> SelectionReport:
    """Smallest m >= 0 with ``GVR_n(m) >= Q``.

    m = 0 is reported only when the i.i.d. part alone already reaches Q,
    which is the white-noise situation (and always the case for constant data).
    """
    if not 0 < Q <= 1:
        raise ValueError(f"Q must lie in (0, 1], got {Q}")
    ratios = gvr_values(series, eig)
    hits = np.flatnonzero(ratios >= Q - RATIO_SLACK)
    chosen = int(hits[0]) if hits.size else eig.size
    return SelectionReport(
        "GVR", chosen, list(range(ratios.size)), ratios.tolist(), Q,
        {"white_noise": chosen == 0},
    )


def dvr_values(series: FunctionalSeries, eig: EigenSystem) -> np.ndarray:
    """``DVR_n(m)`` for m = 0..K."""
    if series.n < 4:
        raise ValueError("DVR needs at least 4 observations")
    if _is_constant(series, eig):
        raise ValueError("DVR is undefined for constant data")
    dep, denom = _periodogram_terms(series, eig)
    return dep / denom


def dvr_ratio(series: FunctionalSeries, eig: EigenSystem, m: int) -> float:
    if not 0 <= m <= eig.size:
        raise ValueError(f"m must lie in [0, {eig.size}]")
    return float(dvr_values(series, eig)[m])


def m_n_E(eigenvalues: np.ndarray, n: int, log_base: float = math.e) -> int:
    """Largest j with ``lambda_1 / lambda_j <= sqrt(n) / log(n)`` (at least 1).

    ``log_base=10`` gives the decimal-log threshold, which keeps more
    components at moderate n.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    if not lam.size or lam[0] <= 0:
        raise ValueError("the leading eigenvalue must be positive")
    bound = math.inf if n < 2 else math.sqrt(n) / math.log(n, log_base)
    positive = lam > 0
    ratios = np.full(lam.shape, np.inf)
    ratios[positive] = lam[0] / lam[positive]
    ok = np.flatnonzero(ratios <= bound * (1 + RATIO_SLACK))
    return max(1, int(ok[-1]) + 1)


def default_criterion(n: int) -> str:
    return "vr" if n <= SHORT_SERIES else "gvr"


def m_hat(
    series: FunctionalSeries,
    eig: EigenSystem,
    Q: float = DEFAULT_Q,
    criterion: str | None = None,
    *,
    log_base: float = math.e,
) -> SelectionReport:
    """Combined rule ``max(m_{n,Q}, m_{n,E})``.

    A white-noise outcome of GVR (m = 0) is kept as is: no VAR is fitted and
    the bootstrap reduces to i.i.d. curve resampling.
    """
    criterion = (criterion or default_criterion(series.n)).lower()
    if criterion == "vr":
        sub = vr_select(eig.eigenvalues, Q)
    elif criterion == "gvr":
        sub = gvr_select(series, eig, Q)
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    if sub.chosen == 0:
        return SelectionReport("m_hat", 0, threshold=Q, details={"m_Q": 0, "m_E": None, "sub": sub})
    m_e = m_n_E(eig.eigenvalues, series.n, log_base)
    chosen = max(sub.chosen, m_e)
    return SelectionReport(
        "m_hat", chosen, threshold=Q, details={"m_Q": sub.chosen, "m_E": m_e, "sub": sub}
    )


def default_p_max(n: int, m: int) -> int:
    if m == 0:
        return 0
    return max(0, min(10, int((n / m - 1) // 2) - 1))


def aicc_values(scores: np.ndarray, p_max: int | None = None) -> tuple[list[int], list[float]]:
    scores = np.asarray(scores, dtype=float)
    n, m = scores.shape
    p_max = default_p_max(n, m) if p_max is None else p_max
    if p_max < 1:
        raise ValueError(f"no feasible VAR order for n={n}, m={m}")
    if n - m * (p_max + 1) - 1 <= 0:
        raise ValueError(
            f"p_max={p_max} infeasible: n - m(p_max + 1) - 1 = {n - m * (p_max + 1) - 1} <= 0"
        )
    acov = autocovariances(scores, p_max)
    candidates, values = [], []
    for p in range(1, p_max + 1):
        try:
            A = yule_walker_coefficients(acov, p)
        except SingularSystemError as exc:
            warnings.warn(f"AICC: skipping p={p}: {exc}", DiagnosticWarning, stacklevel=2)
            continue
        e = raw_residuals(scores, A)
        sigma = e.T @ e / n
        sign, logdet = np.linalg.slogdet(sigma)
        if sign <= 0 or not np.isfinite(logdet):
            warnings.warn(f"AICC: singular innovation covariance at p={p}", DiagnosticWarning, stacklevel=2)
            continue
        penalty = n * (n * m + p * m * m) / (n - m * (p + 1) - 1)
        candidates.append(p)
        values.append(float(n * logdet + penalty))
    return candidates, values


def aicc_select(scores: np.ndarray, p_max: int | None = None) -> SelectionReport:
    """VAR order minimising AICC over 1..p_max; ties go to the smaller order."""
    candidates, values = aicc_values(scores, p_max)
    if not candidates:
        raise ValueError("AICC: every candidate order was singular")
    best = int(np.argmin(values))  # first minimum = smallest p
    return SelectionReport("AICC", candidates[best], candidates, values)
