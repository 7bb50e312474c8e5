"""Functional moving-average generators used in the simulation studies."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import erf

from fsieve.fcurve import DEFAULT_GRID_SIZE, Curve, FunctionalSeries, Grid, fourier_basis_matrix


OPERATORS = ("random", "identity")


def random_operator_matrix(D: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian D x D matrix with entry sd ``1/(j1 j2)``, rescaled to spectral norm 1."""
    j = np.arange(1, D + 1)
    raw = rng.standard_normal((D, D)) / np.outer(j, j)
    return raw / np.linalg.norm(raw, 2)


@dataclass(frozen=True)
class Fma1FourierSpec:
    """``X_t = eps_t + theta0 Psi(eps_{t-1})`` on the span of D Fourier functions.

    Innovation coefficients are independent N(0, j^-2). With
    ``operator="random"`` ``Psi`` acts on coefficient vectors through a fresh
    random matrix on every call; ``operator="identity"`` uses ``Psi = I``,
    which gives an exact sd of ``sqrt(n)`` times the sample mean of 2.146 at
    tau = 0 for n = 100.
    """

    D: int = 21
    theta0: float = 0.8
    grid_size: int = DEFAULT_GRID_SIZE
    operator: str = "random"

    def __post_init__(self) -> None:
        if self.D < 1:
            raise ValueError("basis size D must be at least 1")
        if self.operator not in OPERATORS:
            raise ValueError(f"operator must be one of {OPERATORS}")

    @cached_property
    def grid(self) -> Grid:
        return Grid.uniform(self.grid_size)

    @cached_property
    def basis(self) -> np.ndarray:
        return fourier_basis_matrix(self.grid, self.D)

    @property
    def innovation_sd(self) -> np.ndarray:
        return 1.0 / np.arange(1, self.D + 1)


def fma1_fourier_coefficients(
    spec: Fma1FourierSpec, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Basis coefficients (n, D) of the series and the operator matrix used."""
    if n < 1:
        raise ValueError("n must be positive")
    B = random_operator_matrix(spec.D, rng) if spec.operator == "random" else np.eye(spec.D)
    Z = rng.standard_normal((n + 1, spec.D)) * spec.innovation_sd
    coeffs = Z[1:] + spec.theta0 * Z[:-1] @ B.T
    return coeffs, B


def fma1_fourier(spec: Fma1FourierSpec, n: int, rng: np.random.Generator) -> FunctionalSeries:
    coeffs, _ = fma1_fourier_coefficients(spec, n, rng)
    return FunctionalSeries(spec.grid, coeffs @ spec.basis)


def fma1_fourier_batch(
    spec: Fma1FourierSpec, n: int, count: int, rng: np.random.Generator
) -> np.ndarray:
    """``count`` independent series as an array (count, n, T), each with its own operator."""
    if spec.operator == "random":
        j = np.arange(1, spec.D + 1)
        raw = rng.standard_normal((count, spec.D, spec.D)) / np.outer(j, j)
        B = raw / np.linalg.norm(raw, 2, axis=(1, 2))[:, None, None]
    else:
        B = np.broadcast_to(np.eye(spec.D), (count, spec.D, spec.D))
    Z = rng.standard_normal((count, n + 1, spec.D)) * spec.innovation_sd
    coeffs = Z[:, 1:] + spec.theta0 * Z[:, :-1] @ np.swapaxes(B, 1, 2)
    return coeffs @ spec.basis


def bridge_covariance(grid: Grid) -> np.ndarray:
    s = grid.points
    return np.minimum.outer(s, s) - np.outer(s, s)


def brownian_bridge(grid: Grid, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Exact Brownian bridge draws on the grid; endpoints are pinned to zero.

    Returns shape (T,) or (size, T).
    """
    if grid.points[0] != 0.0 or grid.points[-1] != 1.0:
        raise ValueError("bridge grid must run from 0 to 1")
    inner = bridge_covariance(grid)[1:-1, 1:-1]
    L = np.linalg.cholesky(inner)
    shape = (grid.size - 2,) if size is None else (size, grid.size - 2)
    z = rng.standard_normal(shape)
    out = np.zeros(shape[:-1] + (grid.size,))
    out[..., 1:-1] = z @ L.T
    return out


def brownian_bridge_curve(grid: Grid, rng: np.random.Generator) -> Curve:
    return Curve(grid, brownian_bridge(grid, rng))


def kernel_normaliser() -> float:
    """``4 int_0^1 exp(-x^2) dx``."""
    return 4 * np.sqrt(np.pi) / 2 * erf(1.0)


@dataclass(frozen=True)
class Fma1KernelSpec:
    """``X_t = Theta_1(eps_{t-1}) + eps_t + mu`` with Brownian bridge innovations."""

    grid_size: int = DEFAULT_GRID_SIZE
    grid: Grid = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "grid", Grid.uniform(self.grid_size))

    @cached_property
    def kernel(self) -> np.ndarray:
        t = self.grid.points
        return np.exp(-(t[:, None] ** 2 + t[None, :] ** 2) / 2) / kernel_normaliser()

    @cached_property
    def operator(self) -> np.ndarray:
        """Matrix acting on grid values: ``(Theta x)(t_i) = sum_k theta(t_i, s_k) w_k x(s_k)``."""
        return self.kernel * self.grid.weights[None, :]

    def apply(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values) @ self.operator.T

    def mean_curve(self, gamma: float) -> np.ndarray:
        t = self.grid.points
        return gamma * t * (1 - t)


def fma1_kernel(
    spec: Fma1KernelSpec,
    n: int,
    gamma: float,
    which: str,
    rng: np.random.Generator,
) -> FunctionalSeries:
    """First (mean 0) or second (mean ``gamma tau (1 - tau)``) sample of the two-sample design."""
    if which not in ("first", "second"):
        raise ValueError("which must be 'first' or 'second'")
    if n < 1:
        raise ValueError("n must be positive")
    eps = brownian_bridge(spec.grid, rng, size=n + 1)
    values = eps[1:] + spec.apply(eps[:-1])
    if which == "second":
        values = values + spec.mean_curve(gamma)
    return FunctionalSeries(spec.grid, values)
