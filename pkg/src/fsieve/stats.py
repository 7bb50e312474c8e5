"""Inference with bootstrap series: Fourier transforms, sd of the mean, two-sample test."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from fsieve.blockboot import BlockConfig, block_replicates
from fsieve.fcurve import FunctionalSeries, Grid, GridMismatchError
from fsieve.select import DEFAULT_Q
from fsieve.sieve import SieveModel, fit, replicate_many

Bootstrapper = Union[SieveModel, BlockConfig]

CHUNK = 256


@dataclass(frozen=True, eq=False)
class ComplexCurve:
    grid: Grid
    real: np.ndarray
    imag: np.ndarray

    @property
    def values(self) -> np.ndarray:
        return self.real + 1j * self.imag

    def norm(self) -> float:
        return float(np.sqrt(np.dot(self.grid.weights, self.real**2 + self.imag**2)))


def fourier_transform(
    series: FunctionalSeries, omega: float, *, normalized: bool = False
) -> ComplexCurve:
    """``S_n(w) = sum_{t=1}^n X_t e^{-i t w}``; ``normalized`` divides by ``sqrt(n)``."""
    t = np.arange(1, series.n + 1)
    s = np.exp(-1j * omega * t) @ series.values
    if normalized:
        s = s / np.sqrt(series.n)
    return ComplexCurve(series.grid, s.real.copy(), s.imag.copy())


def replicate_means(
    source: Bootstrapper,
    series: FunctionalSeries | None,
    B: int,
    rng: np.random.Generator,
    *,
    recentre: bool = True,
) -> np.ndarray:
    """Sample means of B bootstrap series, shape (B, T). Block methods need ``series``."""
    means = []
    done = 0
    while done < B:
        k = min(CHUNK, B - done)
        if isinstance(source, SieveModel):
            reps = replicate_many(source, k, rng, recentre=recentre)
        else:
            if series is None:
                raise ValueError("block bootstrap needs the original series")
            reps = block_replicates(series.values, source, k, rng)
        means.append(reps.mean(axis=1))
        done += k
    return np.concatenate(means)


def mean_sd_bootstrap(
    series: FunctionalSeries, source: Bootstrapper, B: int, rng: np.random.Generator
) -> np.ndarray:
    """Per-tau bootstrap sd of ``sqrt(n) * mean*``."""
    if B < 2:
        raise ValueError("need at least two bootstrap replicates")
    means = replicate_means(source, series, B, rng)
    return np.sqrt(series.n) * means.std(axis=0, ddof=1)


def two_sample_statistic(x: FunctionalSeries, y: FunctionalSeries) -> float:
    """``n1 n2 / (n1 + n2) * ||mean(x) - mean(y)||^2``."""
    if not x.grid.same_as(y.grid):
        raise GridMismatchError("samples live on different grids")
    d = x.values.mean(axis=0) - y.values.mean(axis=0)
    return _scaled_sq_norm(d, x.n, y.n, x.grid)


def _scaled_sq_norm(diff: np.ndarray, n1: int, n2: int, grid: Grid) -> np.ndarray | float:
    return n1 * n2 / (n1 + n2) * (diff**2 @ grid.weights)


@dataclass
class TestResult:
    statistic: float
    draws: np.ndarray
    p_value: float
    theta: float
    selections: dict = field(default_factory=dict)

    def reject(self, alpha: float) -> bool:
        return self.p_value <= alpha


def p_value(statistic: float, draws: np.ndarray) -> float:
    draws = np.asarray(draws)
    return float((1 + np.count_nonzero(draws >= statistic)) / (draws.size + 1))


def two_sample_test(
    x: FunctionalSeries,
    y: FunctionalSeries,
    mx: int | str = "auto",
    px: int | str = "auto",
    my: int | str = "auto",
    py: int | str = "auto",
    B: int = 1000,
    rng: np.random.Generator | None = None,
    *,
    Q: float = DEFAULT_Q,
    **fit_kwargs,
) -> TestResult:
    """Sieve bootstrap test of equal mean functions.

    Each sample gets its own sieve; replicates are drawn without the sample
    mean so both bootstrap series satisfy the null.
    """
    rng = np.random.default_rng() if rng is None else rng
    U = two_sample_statistic(x, y)
    model_x = fit(x, mx, px, Q, **fit_kwargs)
    model_y = fit(y, my, py, Q, **fit_kwargs)
    mean_x = replicate_means(model_x, None, B, rng, recentre=False)
    mean_y = replicate_means(model_y, None, B, rng, recentre=False)
    draws = _scaled_sq_norm(mean_x - mean_y, x.n, y.n, x.grid)
    return TestResult(
        statistic=U,
        draws=draws,
        p_value=p_value(U, draws),
        theta=x.n / (x.n + y.n),
        selections={"x": (model_x.m, model_x.p), "y": (model_y.m, model_y.p)},
    )
