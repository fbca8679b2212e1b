"""Polynomial approximations of 1/x for linear-system solvers and their circuit simulations."""

from .approx_family import (
    ErrorReport,
    Family,
    InverseApproxSpec,
    chebiter_coeffs,
    cks_truncate,
    gd_poly,
    min_degree,
    optimality_check,
    qt_eval,
    residual_error,
    supnorm_bound,
)
from .cheb_core import ChebNodes, ChebSeries, cheb_eval, chebfit, interpolate, series_eval

__all__ = [
    "ChebNodes",
    "ChebSeries",
    "ErrorReport",
    "Family",
    "InverseApproxSpec",
    "cheb_eval",
    "chebfit",
    "chebiter_coeffs",
    "cks_truncate",
    "gd_poly",
    "interpolate",
    "min_degree",
    "optimality_check",
    "qt_eval",
    "residual_error",
    "series_eval",
    "supnorm_bound",
]
