"""Functional sieve bootstrap for stationary functional time series."""

from fsieve.fcurve import (
    Curve,
    FunctionalSeries,
    Grid,
    center,
    fourier_basis,
    inner_product,
    norm,
    synthesize,
)
from fsieve.fpca import EigenSystem, covariance_operator, eigendecompose, fpca, scores, truncated_fit
from fsieve.sieve import SieveModel, fit, replicate, replicate_many
from fsieve.varfit import VarModel, autocovariances, yule_walker

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "EigenSystem",
    "FunctionalSeries",
    "Grid",
    "SieveModel",
    "VarModel",
    "autocovariances",
    "center",
    "covariance_operator",
    "eigendecompose",
    "fit",
    "fourier_basis",
    "fpca",
    "inner_product",
    "norm",
    "replicate",
    "replicate_many",
    "scores",
    "synthesize",
    "truncated_fit",
    "yule_walker",
]
