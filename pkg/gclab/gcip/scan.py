"""Tabulation of both conditions over a grid and the finite-q boundedness diagnostic."""

import logging
import math
from collections.abc import Callable, Mapping
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from typing import Annotated

import numpy as np
from pydantic import Field, field_validator, model_validator

from gclab.errors import InvalidInputError
from gclab.gcip.conditions import (
    GcipMode,
    Which,
    apply,
    check_delta,
    check_q,
    normalizer,
    replicated_windows,
    resolve_mode,
    sum_variance,
)
from gclab.gcip.sources import (
    CovarianceSequence,
    Source,
    functional_autocovariances,
    indicator_autocovariances,
    partial_sum_variances,
    source_label,
)
from gclab.mixing.profile import MixingKind, MixingProfile
from gclab.utils.fitting import loglog_fit
from gclab.utils.typing import LabModel, PositiveInt, Seed

log = logging.getLogger(__name__)

NEGLIGIBLE_VARIANCE = 1e-14
FINITE_SCALE_NOTE = (
    "boundedness is a finite-q diagnostic over q in [q_max/2, q_max]; "
    "the sup over all q is not verified"
)


class Boundedness(StrEnum):
    BOUNDED = "BOUNDED"
    GROWING = "GROWING"
    INCONCLUSIVE = "INCONCLUSIVE"


class GcipParams(LabModel):
    delta: float = 1.0
    q_max: Annotated[int, Field(ge=2)] = 128
    x_grid: Annotated[tuple[float, ...], Field(min_length=1)]
    mode: GcipMode | None = None
    reps: Annotated[int, Field(ge=2)] = 10_000
    seed: Seed = 0
    slope_tol: float = 0.05
    growth_tol: float = 0.25
    partial_blocks: bool = False

    @field_validator("delta")
    @classmethod
    def _delta(cls, delta: float) -> float:
        if not 0.0 < delta < 3.0:
            raise ValueError(f"delta must lie in (0, 3), got {delta}")
        return delta

    @field_validator("x_grid")
    @classmethod
    def _ascending(cls, grid: tuple[float, ...]) -> tuple[float, ...]:
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("x_grid must be strictly ascending")
        return grid

    @model_validator(mode="after")
    def _tolerances(self) -> "GcipParams":
        if not self.slope_tol < self.growth_tol:
            raise ValueError("slope_tol must be below growth_tol")
        return self


class GcipReport(LabModel):
    source: str
    synthetic: bool = False
    class_id: str = "halflines"
    params: GcipParams
    rows: tuple[str, ...]
    qs: tuple[int, ...]
    s1: tuple[tuple[float, ...], ...]
    s2: tuple[tuple[float, ...], ...]
    s1_stderr: tuple[tuple[float, ...], ...] | None = None
    s2_stderr: tuple[tuple[float, ...], ...] | None = None
    c1_hat: float
    c2_hat: float
    s1_slope: float | None
    s2_slope: float | None
    bounded_verdict: Boundedness
    s2_verdict: Boundedness
    row_verdicts: tuple[Boundedness, ...]
    row_s2_verdicts: tuple[Boundedness, ...]
    notes: tuple[str, ...] = (FINITE_SCALE_NOTE,)

    @model_validator(mode="after")
    def _shape(self) -> "GcipReport":
        for table in (self.s1, self.s2):
            if len(table) != len(self.rows) or any(len(row) != len(self.qs) for row in table):
                raise ValueError("s-tables must have one row per grid point and one column per q")
            if any(value < 0.0 for row in table for value in row):
                raise ValueError("normalized variances must be nonnegative")
        return self

    @property
    def conditions_hold(self) -> bool:
        return self.bounded_verdict is Boundedness.BOUNDED and self.s2_verdict is Boundedness.BOUNDED

    def csv_rows(self) -> list[tuple]:
        return [
            (row, q, self.s1[i][j], self.s2[i][j])
            for i, row in enumerate(self.rows)
            for j, q in enumerate(self.qs)
        ]

    def summary(self) -> dict:
        return {
            "source": self.source,
            "synthetic": self.synthetic,
            "class_id": self.class_id,
            "delta": self.params.delta,
            "q_max": self.params.q_max,
            "mode": self.params.mode,
            "c1_hat": self.c1_hat,
            "c2_hat": self.c2_hat,
            "s1_slope": self.s1_slope,
            "s2_slope": self.s2_slope,
            "bounded_verdict": self.bounded_verdict,
            "s2_verdict": self.s2_verdict,
            "slope_tol": self.params.slope_tol,
            "growth_tol": self.params.growth_tol,
            "notes": list(self.notes),
        }


def top_half(q_max: int) -> np.ndarray:
    return np.arange(max(1, math.ceil(q_max / 2)), q_max + 1)


def boundedness(envelope: np.ndarray, qs: np.ndarray, slope_tol: float, growth_tol: float) -> tuple[Boundedness, float | None]:
    """Verdict from the log-log slope of an s-curve over the top half of the q range."""
    window = qs >= math.ceil(qs[-1] / 2)
    values = envelope[window]
    if np.all(values <= NEGLIGIBLE_VARIANCE):
        return Boundedness.BOUNDED, 0.0
    positive = values > 0.0
    if positive.sum() < 2:
        return Boundedness.INCONCLUSIVE, None
    slope = loglog_fit(qs[window][positive], values[positive]).slope
    if slope <= slope_tol:
        return Boundedness.BOUNDED, slope
    if slope >= growth_tol:
        return Boundedness.GROWING, slope
    return Boundedness.INCONCLUSIVE, slope


def _exact_row(gammas: np.ndarray, qs: np.ndarray, params: GcipParams) -> tuple[np.ndarray, np.ndarray]:
    variances = partial_sum_variances(gammas, 2 * int(qs[-1]) + 1)
    s1 = variances[qs - 1] / qs.astype(float) ** ((3.0 - params.delta) / 2.0)
    if params.partial_blocks:
        blocks = np.maximum.accumulate(variances)[2 * qs]
    else:
        blocks = variances[2 * qs]
    s2 = blocks / qs.astype(float) ** (3.0 - params.delta)
    return s1, s2


def _monte_carlo_row(values: np.ndarray, qs: np.ndarray, params: GcipParams):
    partial = np.cumsum(values, axis=1)
    estimates = [sum_variance(partial[:, L]) for L in range(partial.shape[1])]
    variances = np.array([e.value for e in estimates])
    errors = np.array([e.stderr for e in estimates])
    scale1 = qs.astype(float) ** ((3.0 - params.delta) / 2.0)
    scale2 = qs.astype(float) ** (3.0 - params.delta)
    if params.partial_blocks:
        running = np.maximum.accumulate(variances)
        blocks, block_errors = running[2 * qs], errors[2 * qs]
    else:
        blocks, block_errors = variances[2 * qs], errors[2 * qs]
    return variances[qs - 1] / scale1, blocks / scale2, errors[qs - 1] / scale1, block_errors / scale2


def gcip_scan(
    source: Source,
    params: GcipParams,
    family: Mapping[str, Callable] | None = None,
    workers: int = 1,
) -> GcipReport:
    """Tabulates s1 and s2 for q = 1..q_max over the x grid or a function family.

    Rows are independent and may be computed concurrently; the report does
    not depend on `workers`.
    """
    check_delta(params.delta)
    mode = resolve_mode(source, params.mode, functional=family is not None)
    qs = np.arange(1, params.q_max + 1)
    longest = 2 * params.q_max + 1
    if family is not None and not family:
        raise InvalidInputError("function family must not be empty")
    members: list[tuple[str, Callable | None, float | None]]
    if family is None:
        members = [(repr(float(x)), None, float(x)) for x in params.x_grid]
    else:
        members = [(name, f, None) for name, f in family.items()]

    if mode is GcipMode.EXACT_MARKOV:
        def compute(member):
            _, f, x = member
            gammas = indicator_autocovariances(source, x, longest) if f is None else functional_autocovariances(source, f, longest)
            s1, s2 = _exact_row(gammas, qs, params)
            return s1, s2, None, None
    else:
        windows = replicated_windows(source, longest, params.reps, params.seed)

        def compute(member):
            _, f, x = member
            values = (windows <= x).astype(float) if f is None else apply(f, windows)
            return _monte_carlo_row(values, qs, params)

    log.info(f"gcip scan of {source_label(source)}: {len(members)} rows x {params.q_max} q values ({mode})")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(compute, members))

    s1 = np.array([r[0] for r in results])
    s2 = np.array([r[1] for r in results])
    s1 = np.clip(s1, 0.0, None)
    s2 = np.clip(s2, 0.0, None)
    verdict, slope1 = boundedness(s1.max(axis=0), qs, params.slope_tol, params.growth_tol)
    verdict2, slope2 = boundedness(s2.max(axis=0), qs, params.slope_tol, params.growth_tol)
    row_verdicts = tuple(boundedness(row, qs, params.slope_tol, params.growth_tol)[0] for row in s1)
    row_s2_verdicts = tuple(boundedness(row, qs, params.slope_tol, params.growth_tol)[0] for row in s2)
    if verdict is not Boundedness.BOUNDED:
        log.warning(f"gcip scan of {source_label(source)}: first condition {verdict} (slope {slope1})")

    def table(array):
        return tuple(tuple(row.tolist()) for row in array)

    stderr = mode is GcipMode.MONTE_CARLO
    return GcipReport(
        source=source_label(source),
        synthetic=isinstance(source, CovarianceSequence),
        params=params.model_copy(update={"mode": mode}),
        rows=tuple(m[0] for m in members),
        qs=tuple(int(q) for q in qs),
        s1=table(s1),
        s2=table(s2),
        s1_stderr=table(np.array([r[2] for r in results])) if stderr else None,
        s2_stderr=table(np.array([r[3] for r in results])) if stderr else None,
        c1_hat=float(s1.max()),
        c2_hat=float(s2.max()),
        s1_slope=slope1,
        s2_slope=slope2,
        bounded_verdict=verdict,
        s2_verdict=verdict2,
        row_verdicts=row_verdicts,
        row_s2_verdicts=row_s2_verdicts,
    )


def implication_check(report: GcipReport) -> bool:
    """True unless a row, or the envelope, has a bounded first condition and a growing second one."""
    pairs = [(report.bounded_verdict, report.s2_verdict), *zip(report.row_verdicts, report.row_s2_verdicts)]
    return not any(v1 is Boundedness.BOUNDED and v2 is Boundedness.GROWING for v1, v2 in pairs)


def s1_mixing_bound(profile: MixingProfile, q: int, delta: float, variance: float) -> float:
    """Upper bound on s1 from a mixing profile.

    Each lag-h indicator covariance is replaced by 4 alpha(h) or 2 beta(h),
    which requires the profile to cover lags 1..q-1.
    """
    check_q(q)
    check_delta(delta)
    constant = 4.0 if profile.kind is MixingKind.ALPHA else 2.0
    coefficients = dict(zip(profile.lags, profile.values))
    missing = [h for h in range(1, q) if h not in coefficients]
    if missing:
        raise InvalidInputError(f"profile lacks lags {missing[:5]} needed for q={q}")
    covariance_terms = sum((q - h) * constant * coefficients[h] for h in range(1, q))
    return (q * variance + 2.0 * covariance_terms) / normalizer(q, delta, Which.S1)
