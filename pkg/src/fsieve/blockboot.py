"""Moving, tapered and stationary block bootstraps that resample whole curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fsieve.fcurve import FunctionalSeries

METHODS = ("mbb", "tbb", "sb")
DEFAULT_TAPER = 0.43


@dataclass(frozen=True)
class BlockConfig:
    method: str
    b: float
    c: float = DEFAULT_TAPER

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown block method {self.method!r}; expected one of {METHODS}")
        if self.b < 1:
            raise ValueError("block length must be at least 1")
        if self.method != "sb" and int(self.b) != self.b:
            raise ValueError("MBB/TBB block length must be an integer")
        if not 0 <= self.c <= 0.5:
            raise ValueError("taper fraction c must lie in [0, 0.5]")


def _check_length(n: int, b: int) -> None:
    if b > n:
        raise ValueError(f"block length {b} exceeds series length {n}")


def _mbb_indices(n: int, b: int, count: int, rng: np.random.Generator) -> np.ndarray:
    k = math.ceil(n / b)
    starts = rng.integers(0, n - b + 1, size=(count, k))
    return (starts[:, :, None] + np.arange(b)).reshape(count, k * b)[:, :n]


def trapezoid_taper(b: int, c: float = DEFAULT_TAPER) -> np.ndarray:
    """Trapezoidal taper evaluated at ``(i - 1/2)/b``, rescaled so ``sum w^2 = b``."""
    x = (np.arange(1, b + 1) - 0.5) / b
    if c == 0:
        w = np.ones(b)
    else:
        with np.errstate(over="ignore"):  # tiny c: ramp/c overflows to inf, clipped to 1
            w = np.minimum(1.0, np.minimum(x, 1 - x) / c)
    return w * np.sqrt(b / np.sum(w**2))


def _sb_indices(n: int, b_mean: float, count: int, rng: np.random.Generator) -> np.ndarray:
    p_new = 1.0 / b_mean
    idx = np.empty((count, n), dtype=np.int64)
    idx[:, 0] = rng.integers(0, n, size=count)
    for t in range(1, n):
        fresh = rng.random(count) < p_new
        jump = rng.integers(0, n, size=count)
        idx[:, t] = np.where(fresh, jump, (idx[:, t - 1] + 1) % n)
    return idx


def sb_block_lengths(b_mean: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """Geometric block lengths on {1, 2, ...} with mean ``b_mean``."""
    return rng.geometric(1.0 / b_mean, size=size)


def block_replicates(
    values: np.ndarray, config: BlockConfig, count: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` replicates of an (n, T) array of curves, shape (count, n, T)."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if config.method == "sb":
        return values[_sb_indices(n, config.b, count, rng)]
    b = int(config.b)
    _check_length(n, b)
    idx = _mbb_indices(n, b, count, rng)
    if config.method == "mbb":
        return values[idx]
    mean = values.mean(axis=0)
    w = trapezoid_taper(b, config.c)
    weights = np.tile(w, math.ceil(n / b))[:n]
    return mean + weights[None, :, None] * (values[idx] - mean)


def mbb_replicate(series: FunctionalSeries, b: int, rng: np.random.Generator) -> FunctionalSeries:
    return FunctionalSeries(
        series.grid, block_replicates(series.values, BlockConfig("mbb", b), 1, rng)[0]
    )


def tbb_replicate(
    series: FunctionalSeries, b: int, c: float, rng: np.random.Generator
) -> FunctionalSeries:
    return FunctionalSeries(
        series.grid, block_replicates(series.values, BlockConfig("tbb", b, c), 1, rng)[0]
    )


def sb_replicate(
    series: FunctionalSeries, b_mean: float, rng: np.random.Generator
) -> FunctionalSeries:
    return FunctionalSeries(
        series.grid, block_replicates(series.values, BlockConfig("sb", b_mean), 1, rng)[0]
    )
