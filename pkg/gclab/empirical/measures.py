"""Empirical measures and exact sup-norm deviations of the empirical cdf."""

from collections.abc import Callable

import numpy as np
from pydantic import model_validator

from gclab.errors import InvalidInputError
from gclab.procgen.laws import ContinuousLaw, DiscreteLaw
from gclab.procgen.spec import SamplePath
from gclab.utils.typing import LabModel, PositiveInt


class Ecdf(LabModel):
    sorted_values: tuple[float, ...]
    n: PositiveInt

    @model_validator(mode="after")
    def _sorted(self) -> "Ecdf":
        if len(self.sorted_values) != self.n:
            raise ValueError("sorted_values must hold n values")
        if any(b < a for a, b in zip(self.sorted_values, self.sorted_values[1:])):
            raise ValueError("sorted_values must be ascending")
        return self

    @classmethod
    def from_path(cls, path: SamplePath) -> "Ecdf":
        return cls(sorted_values=tuple(np.sort(path.array).tolist()), n=path.n)

    def __call__(self, x: float) -> float:
        """F_n(x) = #{i : X_i <= x} / n."""
        return float(np.searchsorted(self.sorted_values, x, side="right")) / self.n

    def left_limit(self, x: float) -> float:
        return float(np.searchsorted(self.sorted_values, x, side="left")) / self.n


def pn_f(path: SamplePath, f: Callable) -> float:
    """P_n(f) = (1/n) sum f(X_i)."""
    values = path.array
    result = np.asarray(f(values), dtype=float)
    if result.shape != values.shape:
        result = np.vectorize(f, otypes=[float])(values)
    return float(result.mean())


def _continuous_deviation(sorted_values: np.ndarray, F: np.ndarray) -> float:
    n = sorted_values.size
    ranks = np.arange(1, n + 1)
    above = ranks / n - F
    below = F - (ranks - 1) / n
    return float(max(above.max(), below.max(), 0.0))


def _discrete_deviation(sorted_values: np.ndarray, law: DiscreteLaw) -> float:
    n = sorted_values.size
    # Both step functions only jump at the atoms and the sample points.
    points = np.union1d(np.asarray(law.atoms, dtype=float), sorted_values)
    right = np.searchsorted(sorted_values, points, side="right") / n
    left = np.searchsorted(sorted_values, points, side="left") / n
    F = law.cdf_many(points)
    F_left = np.array([law.left_cdf(float(p)) for p in points])
    return float(max(np.abs(right - F).max(), np.abs(left - F_left).max()))


def ecdf_sup_deviation(
    path: SamplePath,
    cdf: Callable[[float], float] | ContinuousLaw | DiscreteLaw,
) -> float:
    """sup_x |F_n(x) - F(x)|, computed exactly.

    For a continuous F the sup sits at an order statistic or its left
    limit; for a discrete law both functions are checked at every jump point
    and its left limit.
    """
    return sup_deviation(path.array, cdf)


def sup_deviation(values, cdf: Callable[[float], float] | ContinuousLaw | DiscreteLaw) -> float:
    values = np.asarray(values, dtype=float)
    if values.size < 1:
        raise InvalidInputError("empty sample")
    sorted_values = np.sort(values)
    if isinstance(cdf, DiscreteLaw):
        deviation = _discrete_deviation(sorted_values, cdf)
    else:
        if isinstance(cdf, ContinuousLaw):
            F = cdf.cdf_many(sorted_values)
        else:
            F = np.array([cdf(float(v)) for v in sorted_values])
        deviation = _continuous_deviation(sorted_values, F)
    return min(max(deviation, 0.0), 1.0)
