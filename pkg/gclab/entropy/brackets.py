"""Constructive bracket covers of the half-line indicator class."""

import logging
import math
from typing import Literal

import numpy as np
from pydantic import Field, model_validator
from scipy import integrate

from gclab.errors import InvalidInputError
from gclab.procgen.laws import ContinuousLaw, DiscreteLaw
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)

HALFLINES = "halflines"
SIZE_TOLERANCE = 1e-9
MERGE_TOLERANCE = 1e-12
Metric = Literal["L2_P", "ABS"]


class HalfLineBound(LabModel):
    """The indicator of (-inf, point] when closed, of (-inf, point) otherwise.

    point = -inf gives the zero function and point = +inf the constant one.
    """

    point: float
    closed: bool = True

    def mass(self, law: ContinuousLaw | DiscreteLaw) -> float:
        if self.point == -math.inf:
            return 0.0
        if self.point == math.inf:
            return 1.0
        return law.cdf(self.point) if self.closed else law.left_cdf(self.point)

    def indicates(self, value: float) -> bool:
        """Value of the indicator at `value`."""
        return value <= self.point if self.closed else value < self.point

    def below(self, x: float) -> bool:
        """Whether this indicator is pointwise <= I(-inf, x]."""
        return self.point <= x

    def above(self, x: float) -> bool:
        """Whether this indicator is pointwise >= I(-inf, x]."""
        return x <= self.point if self.closed else x < self.point


class Bracket(LabModel):
    lower: HalfLineBound
    upper: HalfLineBound
    size: float

    def contains(self, x: float) -> bool:
        return self.lower.below(x) and self.upper.above(x)


class BracketCover(LabModel):
    class_id: str = HALFLINES
    epsilon: float = Field(gt=0.0)
    metric_id: Metric = "L2_P"
    law: str
    brackets: tuple[Bracket, ...]
    count: int
    flag: Literal["CONSTRUCTIVE_UPPER_BOUND"] = "CONSTRUCTIVE_UPPER_BOUND"

    @model_validator(mode="after")
    def _consistent(self) -> "BracketCover":
        if self.count != len(self.brackets) or self.count < 1:
            raise ValueError("count must equal the number of brackets (at least one)")
        oversized = [b.size for b in self.brackets if b.size > self.epsilon + SIZE_TOLERANCE]
        if oversized:
            raise ValueError(f"brackets larger than epsilon={self.epsilon}: {oversized}")
        return self


class CoverVerification(LabModel):
    sizes_ok: bool
    cover_ok: bool
    max_size: float
    uncovered: tuple[float, ...] = ()

    @property
    def passed(self) -> bool:
        return self.sizes_ok and self.cover_ok


def _size(gap: float, metric: Metric) -> float:
    gap = max(gap, 0.0)
    return math.sqrt(gap) if metric == "L2_P" else gap


def _gap_budget(epsilon: float, metric: Metric) -> float:
    return epsilon**2 if metric == "L2_P" else epsilon


def _continuous_cover(law: ContinuousLaw, epsilon: float, metric: Metric) -> list[Bracket]:
    # K cells of F-mass 1/K each, with 1/K <= budget.
    budget = _gap_budget(epsilon, metric)
    cells = max(1, math.ceil(1.0 / budget - SIZE_TOLERANCE))
    cuts = [-math.inf, *(law.ppf(j / cells) for j in range(1, cells)), math.inf]
    brackets = []
    for left, right in zip(cuts, cuts[1:]):
        lower, upper = HalfLineBound(point=left), HalfLineBound(point=right)
        brackets.append(Bracket(lower=lower, upper=upper, size=_size(upper.mass(law) - lower.mass(law), metric)))
    return brackets


def _discrete_cover(law: DiscreteLaw, epsilon: float, metric: Metric) -> list[Bracket]:
    """Greedy merge over the atoms.

    A bracket [I(-inf, c], I(-inf, d)) leaves both boundary atoms out of its
    gap, so an atom is absorbed only while the gap stays within budget.
    """
    budget = _gap_budget(epsilon, metric)
    atoms = sorted((a, m) for a, m in zip(law.atoms, law.masses) if m > 0.0)
    brackets = []
    lower = HalfLineBound(point=-math.inf)
    gap = 0.0
    for atom, mass in atoms:
        if gap + mass <= budget + MERGE_TOLERANCE:
            gap += mass
            continue
        upper = HalfLineBound(point=atom, closed=False)
        brackets.append(Bracket(lower=lower, upper=upper, size=_size(gap, metric)))
        lower = HalfLineBound(point=atom, closed=True)
        gap = 0.0
    brackets.append(Bracket(lower=lower, upper=HalfLineBound(point=math.inf), size=_size(gap, metric)))
    return brackets


def check_epsilon(epsilon: float) -> None:
    if not epsilon > 0.0 or not math.isfinite(epsilon):
        raise InvalidInputError(f"epsilon must be a positive real, got {epsilon}")


def bracket_halflines(law: ContinuousLaw | DiscreteLaw, epsilon: float, metric: Metric = "L2_P") -> BracketCover:
    """Finite epsilon-bracket cover of {I(-inf, x] : x real}.

    The count is an upper bound on the bracketing number, not its minimum.
    """
    check_epsilon(epsilon)
    if isinstance(law, DiscreteLaw):
        brackets = _discrete_cover(law, epsilon, metric)
    else:
        brackets = _continuous_cover(law, epsilon, metric)
    log.info(f"bracket cover of half-lines under {law.name}: {len(brackets)} brackets at epsilon={epsilon} ({metric})")
    return BracketCover(
        epsilon=epsilon,
        metric_id=metric,
        law=law.name,
        brackets=tuple(brackets),
        count=len(brackets),
    )


def _integrated_gap(bracket: Bracket, law: ContinuousLaw | DiscreteLaw) -> float:
    """P(lower < upper) recomputed from the density or from the atoms."""
    if isinstance(law, DiscreteLaw):
        return sum(
            mass
            for atom, mass in zip(law.atoms, law.masses)
            if bracket.upper.indicates(atom) and not bracket.lower.indicates(atom)
        )
    lo, hi = law.support
    a = max(bracket.lower.point, lo)
    b = min(bracket.upper.point, hi)
    if b <= a:
        return 0.0
    value, _ = integrate.quad(law.pdf, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


def _parameter_grid(law: ContinuousLaw | DiscreteLaw, grid_size: int) -> np.ndarray:
    lo, hi = law.support
    if not math.isfinite(lo):
        lo = law.ppf(1e-6) if isinstance(law, ContinuousLaw) else lo
    if not math.isfinite(hi):
        hi = law.ppf(1.0 - 1e-6) if isinstance(law, ContinuousLaw) else hi
    grid = np.linspace(lo - 1.0, hi + 1.0, grid_size)
    extra = np.asarray(law.atoms, dtype=float) if isinstance(law, DiscreteLaw) else np.array([])
    return np.union1d(grid, extra)


def verify_cover(cover: BracketCover, law: ContinuousLaw | DiscreteLaw, grid_size: int = 10_000) -> CoverVerification:
    """Re-derives every bracket size and checks the cover on a parameter grid."""
    sizes = [_size(_integrated_gap(b, law), cover.metric_id) for b in cover.brackets]
    max_size = max(sizes)
    uncovered = tuple(
        float(x) for x in _parameter_grid(law, grid_size) if not any(b.contains(float(x)) for b in cover.brackets)
    )
    verification = CoverVerification(
        sizes_ok=max_size <= cover.epsilon + SIZE_TOLERANCE,
        cover_ok=not uncovered,
        max_size=max_size,
        uncovered=uncovered[:10],
    )
    if not verification.passed:
        log.warning(f"bracket cover failed re-verification: {verification}")
    return verification
