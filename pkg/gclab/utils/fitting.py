"""Least-squares fits on log scales.

Both the mixing decay fit and the convergence-study fit reduce to ordinary
least squares of log y against log x (power laws) or against x (geometric
laws).
"""

import math
from typing import NamedTuple

import numpy as np


class LineFit(NamedTuple):
    intercept: float
    slope: float
    r_squared: float
    rms_residual: float
    points: int


def _ols(x: np.ndarray, y: np.ndarray) -> LineFit:
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    residual = y - fitted
    ss_res = float(residual @ residual)
    centered = y - y.mean()
    ss_tot = float(centered @ centered)
    # A flat exact line has zero total variance; treat it as a perfect fit.
    r_squared = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    return LineFit(
        intercept=float(coef[0]),
        slope=float(coef[1]),
        r_squared=r_squared,
        rms_residual=math.sqrt(ss_res / len(y)),
        points=len(y),
    )


def loglog_fit(x, y) -> LineFit:
    """Fits log y = intercept + slope * log x. Inputs must be strictly positive."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.size < 2:
        raise ValueError("loglog_fit needs two equally long vectors with at least 2 points")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("loglog_fit needs strictly positive inputs")
    return _ols(np.log(x), np.log(y))


def semilog_fit(x, y) -> LineFit:
    """Fits log y = intercept + slope * x (geometric decay when slope < 0)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("semilog_fit needs strictly positive values")
    return _ols(x, np.log(y))
