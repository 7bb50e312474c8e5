"""Functional principal components of a curve series.

The covariance operator is represented by its kernel on the grid. The
integral operator ``x -> int K(., s) x(s) ds`` becomes ``K W`` with ``W`` the
diagonal matrix of quadrature weights, and we diagonalise the symmetric
matrix ``W^1/2 K W^1/2`` so the eigenfunctions come out orthonormal in the
quadrature inner product.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from fsieve.fcurve import Curve, FunctionalSeries, Grid, center

SYMMETRY_TOL = 1e-8
DEGENERACY_TOL = 1e-10


class DiagnosticWarning(UserWarning):
    """Numerical condition the method assumes away (ties, near-singularity, ...)."""


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues in descending order and eigenfunctions stored row-wise (K, T)."""

    eigenvalues: np.ndarray
    eigenfunctions: np.ndarray
    grid: Grid

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def curves(self, m: int | None = None) -> list[Curve]:
        m = self.size if m is None else m
        return [Curve(self.grid, v) for v in self.eigenfunctions[:m]]

    def truncate(self, m: int) -> EigenSystem:
        if m > self.size:
            raise ValueError(f"cannot keep {m} of {self.size} eigenpairs")
        return EigenSystem(self.eigenvalues[:m], self.eigenfunctions[:m], self.grid)


def covariance_operator(series: FunctionalSeries) -> np.ndarray:
    """Kernel ``n^-1 sum_t (X_t - mean)(tau_i) (X_t - mean)(tau_k)`` as a T x T matrix."""
    if series.n < 2:
        raise ValueError("covariance operator needs at least two curves")
    centred = series.values - series.values.mean(axis=0)
    return centred.T @ centred / series.n


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # largest |coordinate| made positive; argmax returns the first index on ties
    idx = np.argmax(np.abs(vectors), axis=1)
    signs = np.sign(vectors[np.arange(vectors.shape[0]), idx])
    signs[signs == 0] = 1.0
    return vectors * signs[:, None]


def eigendecompose(kernel: np.ndarray, grid: Grid, K: int | None = None) -> EigenSystem:
    """Top-``K`` eigenpairs of the integral operator with the given kernel."""
    kernel = np.asarray(kernel, dtype=float)
    T = grid.size
    if kernel.shape != (T, T):
        raise ValueError(f"kernel must be {T} x {T}, got {kernel.shape}")
    K = T if K is None else K
    if not 0 <= K <= T:
        raise ValueError(f"K must lie in [0, {T}], got {K}")
    scale = max(1.0, float(np.max(np.abs(kernel))))
    if np.max(np.abs(kernel - kernel.T)) > SYMMETRY_TOL * scale:
        raise ValueError("kernel is not symmetric")

    root_w = np.sqrt(grid.weights)
    sym = root_w[:, None] * kernel * root_w[None, :]
    sym = (sym + sym.T) / 2
    vals, vecs = np.linalg.eigh(sym)
    order = np.argsort(vals, kind="stable")[::-1][:K]
    vals = np.clip(vals[order], 0.0, None)
    funcs = (vecs[:, order] / root_w[:, None]).T
    funcs = _fix_signs(funcs)

    if vals.size > 1 and vals[0] > 0:
        gaps = -np.diff(vals)
        positive = vals[1:] > DEGENERACY_TOL * vals[0]
        if np.any((gaps < DEGENERACY_TOL * vals[0]) & positive):
            warnings.warn(
                "near-degenerate eigenvalues; eigenfunction order is solver order",
                DiagnosticWarning,
                stacklevel=2,
            )
    return EigenSystem(vals, funcs, grid)


def fpca(series: FunctionalSeries, K: int | None = None) -> tuple[Curve, EigenSystem]:
    """Sample mean and eigensystem of the sample covariance operator."""
    return series.mean(), eigendecompose(covariance_operator(series), series.grid, K)


def scores(series: FunctionalSeries, eig: EigenSystem, m: int) -> np.ndarray:
    """``(n, m)`` matrix of ``<X_t - mean, v_j>``."""
    if m > eig.size:
        raise ValueError(f"m={m} exceeds the {eig.size} available eigenfunctions")
    if m < 0:
        raise ValueError("m must be nonnegative")
    centred, _ = center(series)
    w = series.grid.weights
    return (centred.values * w) @ eig.eigenfunctions[:m].T


def truncated_fit(
    series: FunctionalSeries, eig: EigenSystem, m: int
) -> tuple[FunctionalSeries, FunctionalSeries]:
    """Rank-``m`` reconstruction of the centered series and the centered residual pool.

    Returns
    -------
    fitted : FunctionalSeries
        ``sum_{j<=m} xi_{j,t} v_j`` for each t (mean not included).
    residuals : FunctionalSeries
        ``X_t - mean - fitted_t``, re-centered to have zero pointwise mean.
    """
    xi = scores(series, eig, m)
    fitted = xi @ eig.eigenfunctions[:m]
    resid = series.values - series.values.mean(axis=0) - fitted
    resid = resid - resid.mean(axis=0)
    return FunctionalSeries(series.grid, fitted), FunctionalSeries(series.grid, resid)
