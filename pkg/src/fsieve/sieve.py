"""Functional sieve bootstrap: fit, replicate, and exact bootstrap moments.

A fitted :class:`SieveModel` resamples a series in three layers: a VAR(p)
driven by i.i.d. draws from its centered residual pool generates pseudo
scores, the top-m eigenfunctions turn them into curves, and i.i.d. draws
from the centered functional residuals are added on top.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fsieve.fcurve import FunctionalSeries, Grid
from fsieve.fpca import EigenSystem, fpca, scores as score_matrix, truncated_fit
from fsieve.select import DEFAULT_Q, aicc_select, m_hat
from fsieve.varfit import (
    MAX_PSI_TERMS,
    UnstableModelError,
    VarModel,
    burn_in_length,
    fit_var,
    simulate,
)

PSI_TAIL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SieveModel:
    grid: Grid
    mean: np.ndarray
    eig: EigenSystem
    scores: np.ndarray
    var: VarModel | None
    residual_pool: np.ndarray
    m: int
    p: int
    burn_in: int
    report: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.residual_pool.shape[0]

    @property
    def eigenfunctions(self) -> np.ndarray:
        return self.eig.eigenfunctions[: self.m]

    def residual_covariance(self) -> np.ndarray:
        """Kernel of the empirical covariance operator of the functional residual pool."""
        U = self.residual_pool
        return U.T @ U / U.shape[0]


def _resolve(value, name: str) -> int | None:
    if value is None or (isinstance(value, str) and value.lower() == "auto"):
        return None
    value = int(value)
    if value < 0:
        raise ValueError(f"{name} must be nonnegative")
    return value


def fit(
    series: FunctionalSeries,
    m: int | str | None = "auto",
    p: int | str | None = "auto",
    Q: float = DEFAULT_Q,
    *,
    criterion: str | None = None,
    p_max: int | None = None,
    log_base: float = math.e,
) -> SieveModel:
    """Fit the sieve: FPCA, choose (m, p) when ``"auto"``, Yule-Walker, residual pools."""
    n = series.n
    if n < 4:
        raise ValueError("the sieve bootstrap needs at least 4 curves")
    mean, eig = fpca(series)
    report: dict = {}

    m_fixed = _resolve(m, "m")
    if m_fixed is None:
        sel = m_hat(series, eig, Q, criterion, log_base=log_base)
        m_val = sel.chosen
        report["m_selection"] = sel
    else:
        m_val = m_fixed
    if m_val > eig.size:
        raise ValueError(f"m={m_val} exceeds the grid size {eig.size}")

    xi = score_matrix(series, eig, m_val)
    _, resid = truncated_fit(series, eig, m_val)

    p_fixed = _resolve(p, "p")
    if m_val == 0:
        p_val, var, L = 0, None, 0
    else:
        if p_fixed is None:
            sel_p = aicc_select(xi, p_max)
            p_val = sel_p.chosen
            report["p_selection"] = sel_p
        else:
            p_val = p_fixed
        if n <= m_val * (p_val + 1) + 1:
            raise ValueError(
                f"n={n} too small for m={m_val}, p={p_val}: need n > m(p + 1) + 1"
            )
        var = fit_var(xi, p_val)
        L = burn_in_length(var)
        report["spectral_radius"] = var.spectral_radius()
    report.update(m=m_val, p=p_val, burn_in=L)
    return SieveModel(
        grid=series.grid,
        mean=mean.values,
        eig=eig.truncate(m_val),
        scores=xi,
        var=var,
        residual_pool=resid.values,
        m=m_val,
        p=p_val,
        burn_in=L,
        report=report,
    )


def replicate_many(
    model: SieveModel, count: int, rng: np.random.Generator, *, recentre: bool = True
) -> np.ndarray:
    """``count`` bootstrap series as an array (count, n, T).

    With ``recentre=False`` the sample mean is not added back, so replicates
    have bootstrap mean zero.
    """
    n, T = model.n, model.grid.size
    out = np.empty((count, n, T))
    U = model.residual_pool
    out[...] = U[rng.integers(0, n, size=(count, n))]
    if model.m > 0:
        xi = simulate(model.var, n, rng, burn_in=model.burn_in, batch=count)
        out += xi @ model.eigenfunctions
    if recentre:
        out += model.mean
    return out


def replicate(
    model: SieveModel, rng: np.random.Generator, *, recentre: bool = True
) -> FunctionalSeries:
    return FunctionalSeries(model.grid, replicate_many(model, 1, rng, recentre=recentre)[0])


def _psi_sequence(var: VarModel, extra: int) -> np.ndarray:
    """Psi weights until they (and ``extra`` more) have decayed below the tail tolerance."""
    A, m, p = var.A, var.dim, var.p
    psi = [np.eye(m)]
    quiet = 0
    scale = max(1.0, float(np.linalg.norm(var.sigma_e)))
    while True:
        j = len(psi)
        if j >= MAX_PSI_TERMS:
            raise UnstableModelError(
                f"Psi weights did not decay within {MAX_PSI_TERMS} terms (near-unit root?)"
            )
        nxt = np.zeros((m, m))
        for k in range(1, min(j, p) + 1):
            nxt += A[k - 1] @ psi[j - k]
        psi.append(nxt)
        # p consecutive negligible terms => all later terms are negligible too
        quiet = quiet + 1 if np.linalg.norm(nxt) ** 2 * scale < PSI_TAIL_TOL else 0
        if quiet >= max(p, 1):
            break
    return np.array(psi + [np.zeros((m, m))] * extra)


def bootstrap_score_autocovariance(var: VarModel, h: int) -> np.ndarray:
    """``E*[xi*_t xi*_{t+h}^T] = sum_l Psi_l Sigma Psi_{l+h}^T`` (negative h by transpose)."""
    if not var.is_stable():
        raise UnstableModelError("bootstrap moments need a stable VAR")
    if h < 0:
        return bootstrap_score_autocovariance(var, -h).T
    psi = _psi_sequence(var, h)
    count = psi.shape[0] - h
    return np.einsum("lij,jk,lmk->im", psi[:count], var.sigma_e, psi[h : h + count])


def bootstrap_autocovariance(model: SieveModel, h: int) -> np.ndarray:
    """Kernel ``c*_h(tau, s) = Cov*(X*_{t+h}(tau), X*_t(s))`` on the grid (T x T)."""
    T = model.grid.size
    kernel = np.zeros((T, T))
    if model.m > 0:
        gamma = bootstrap_score_autocovariance(model.var, h)
        V = model.eigenfunctions
        kernel += V.T @ gamma.T @ V
    if h == 0:
        kernel += model.residual_covariance()
    return kernel


def bootstrap_spectral_density(model: SieveModel, omega: float) -> np.ndarray:
    """Complex T x T kernel of ``(2 pi)^-1 sum_h C*_h e^{-i h omega}``."""
    kernel = model.residual_covariance().astype(complex)
    if model.m > 0:
        var = model.var
        if not var.is_stable():
            raise UnstableModelError("spectral density needs a stable VAR")
        poly = np.eye(var.dim, dtype=complex)
        for j in range(1, var.p + 1):
            poly -= var.A[j - 1] * np.exp(-1j * j * omega)
        H = np.linalg.inv(poly)
        f_scores = H @ var.sigma_e @ H.conj().T
        V = model.eigenfunctions
        kernel += V.T @ f_scores @ V
    return kernel / (2 * np.pi)
