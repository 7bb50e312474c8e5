"""Curves sampled on a fixed grid of [0, 1].

Inner products use trapezoidal weights on an equidistant grid that includes
both endpoints, so every integral in the package is a weighted sum
``sum_i w_i f(tau_i)``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

DEFAULT_GRID_SIZE = 21


class GridMismatchError(ValueError):
    """Raised when two curves live on different grids."""


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature grid ``tau_1 = 0 < ... < tau_T = 1`` with positive weights."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if points.ndim != 1 or points.shape != weights.shape:
            raise ValueError("points and weights must be 1-d arrays of equal length")
        if points.size < 2:
            raise ValueError("a grid needs at least two points")
        if points[0] != 0.0 or points[-1] != 1.0:
            raise ValueError("grid must start at 0 and end at 1")
        if np.any(np.diff(points) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        points.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, size: int = DEFAULT_GRID_SIZE) -> Grid:
        """Equidistant grid with trapezoidal weights."""
        if size < 2:
            raise ValueError("grid size must be at least 2")
        points = np.linspace(0.0, 1.0, size)
        h = 1.0 / (size - 1)
        weights = np.full(size, h)
        weights[0] = weights[-1] = h / 2
        return cls(points, weights)

    @property
    def size(self) -> int:
        return self.points.size

    def same_as(self, other: Grid) -> bool:
        return self is other or (
            np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self.same_as(other)

    def __hash__(self) -> int:
        return hash((self.points.tobytes(), self.weights.tobytes()))


@dataclass(frozen=True, eq=False)
class Curve:
    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise ValueError(f"curve needs {self.grid.size} values, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __add__(self, other: Curve) -> Curve:
        _check_grids(self.grid, other.grid)
        return Curve(self.grid, self.values + other.values)

    def __sub__(self, other: Curve) -> Curve:
        _check_grids(self.grid, other.grid)
        return Curve(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> Curve:
        return Curve(self.grid, self.values * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class FunctionalSeries:
    """Ordered curves ``X_1, ..., X_n`` stored row-wise as an ``(n, T)`` array."""

    grid: Grid
    values: np.ndarray
    _curves: tuple[Curve, ...] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != self.grid.size:
            raise ValueError(
                f"series values must have shape (n, {self.grid.size}), got {values.shape}"
            )
        if values.shape[0] < 1:
            raise ValueError("a functional series needs at least one curve")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_curves(cls, curves: Sequence[Curve]) -> FunctionalSeries:
        if not curves:
            raise ValueError("a functional series needs at least one curve")
        grid = curves[0].grid
        for c in curves[1:]:
            _check_grids(grid, c.grid)
        return cls(grid, np.stack([c.values for c in curves]))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, t: int) -> Curve:
        return Curve(self.grid, self.values[t])

    def __iter__(self) -> Iterator[Curve]:
        for row in self.values:
            yield Curve(self.grid, row)

    def mean(self) -> Curve:
        return Curve(self.grid, self.values.mean(axis=0))


def _check_grids(a: Grid, b: Grid) -> None:
    if not a.same_as(b):
        raise GridMismatchError("curves are sampled on different grids")


def inner_product(x: Curve, y: Curve) -> float:
    """Quadrature approximation of the L2 inner product on [0, 1]."""
    _check_grids(x.grid, y.grid)
    return float(np.dot(x.grid.weights, x.values * y.values))


def norm(x: Curve) -> float:
    return float(np.sqrt(max(inner_product(x, x), 0.0)))


def gram(a: np.ndarray, b: np.ndarray, grid: Grid) -> np.ndarray:
    """Matrix of inner products between the rows of ``a`` and the rows of ``b``."""
    return (a * grid.weights) @ b.T


def center(series: FunctionalSeries) -> tuple[FunctionalSeries, Curve]:
    """Subtract the pointwise sample mean; return the centered series and the mean."""
    mean = series.values.mean(axis=0)
    return FunctionalSeries(series.grid, series.values - mean), Curve(series.grid, mean)


def fourier_basis(grid: Grid, size: int) -> list[Curve]:
    """First ``size`` Fourier basis functions: 1, sqrt2 sin(2 pi k t), sqrt2 cos(2 pi k t), ..."""
    return [Curve(grid, row) for row in fourier_basis_matrix(grid, size)]


def fourier_basis_matrix(grid: Grid, size: int) -> np.ndarray:
    if size < 1:
        raise ValueError("basis size must be at least 1")
    tau = grid.points
    out = np.empty((size, tau.size))
    out[0] = 1.0
    for j in range(2, size + 1):
        k = j // 2
        trig = np.sin if j % 2 == 0 else np.cos
        out[j - 1] = np.sqrt(2.0) * trig(2 * np.pi * k * tau)
    return out


def synthesize(coeffs: Sequence[float], basis: Sequence[Curve]) -> Curve:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (len(basis),):
        raise ValueError(f"{coeffs.size} coefficients for {len(basis)} basis curves")
    if not basis:
        raise ValueError("empty basis")
    grid = basis[0].grid
    for b in basis[1:]:
        _check_grids(grid, b.grid)
    return Curve(grid, coeffs @ np.stack([b.values for b in basis]))


def write_csv(series: FunctionalSeries, path: str | Path) -> None:
    """Write ``tau,<tau_1>,...`` then one ``t,<x_t(tau_1)>,...`` row per curve."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tau", *(f"{p:.17g}" for p in series.grid.points)])
        for t, row in enumerate(series.values, start=1):
            writer.writerow([t, *(f"{v:.17g}" for v in row)])


def read_csv(path: str | Path) -> FunctionalSeries:
    """Read the curve CSV format; trapezoid weights are rebuilt from the header points."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows or rows[0][0].strip() != "tau":
        raise ValueError(f"{path}: first row must start with 'tau'")
    points = np.array([float(v) for v in rows[0][1:]])
    values = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    if values.ndim != 2 or values.shape[1] != points.size:
        raise ValueError(f"{path}: every row needs {points.size} values")
    return FunctionalSeries(trapezoid_grid(points), values)


def trapezoid_grid(points: np.ndarray) -> Grid:
    """Trapezoid weights for arbitrary points; equidistant points give exactly ``Grid.uniform``."""
    points = np.asarray(points, dtype=float)
    if points.size >= 2 and np.array_equal(points, np.linspace(0.0, 1.0, points.size)):
        return Grid.uniform(points.size)
    d = np.diff(points)
    weights = np.zeros_like(points)
    weights[:-1] += d / 2
    weights[1:] += d / 2
    return Grid(points, weights)
