"""Mixing profiles, decay fits and the polynomial-rate thresholds."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from enum import StrEnum
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import Field, computed_field, model_validator

from gclab.errors import FitUndefinedError, InvalidInputError
from gclab.mixing.coefficients import (
    MAX_EXACT_ALPHA_STATES,
    alpha_markov_exact,
    alpha_modulus_estimate,
    beta_markov_exact,
    beta_modulus_estimate,
)
from gclab.procgen.generator import generate
from gclab.procgen.spec import ProcessSpec, TransitionModel
from gclab.utils.fitting import loglog_fit, semilog_fit
from gclab.utils.typing import LabModel, PositiveInt, Seed

log = logging.getLogger(__name__)

RANGE_TOLERANCE = 1e-12
GEOMETRIC_R2 = 0.99
GOOD_FIT_RMS = 0.1
EXPONENT_TOLERANCE = 1e-9
MARKOV_REDUCTION = "pair (sigma(X_0), sigma(X_n)) of a stationary Markov chain"


class MixingKind(StrEnum):
    ALPHA = "ALPHA"
    BETA = "BETA"

    @property
    def upper(self) -> float:
        return 0.25 if self is MixingKind.ALPHA else 1.0


class Provenance(LabModel):
    source: Literal["EXACT", "ESTIMATED"]
    reps: PositiveInt | None = None
    path_length: PositiveInt | None = None

    @model_validator(mode="after")
    def _estimated_has_sizes(self) -> "Provenance":
        if self.source == "ESTIMATED" and (self.reps is None or self.path_length is None):
            raise ValueError("ESTIMATED provenance needs reps and path_length")
        return self


class DecayFit(LabModel):
    """value ~ C n^-a, with a geometric alternative log value ~ log C + n log rate."""

    C: float
    a: float
    r_squared: float
    rms_residual: float
    flag: Literal["polynomial", "super-polynomial"]
    geometric_rate: float | None = None
    points: int
    excluded_lags: tuple[int, ...] = ()

    @property
    def effective_exponent(self) -> float:
        return math.inf if self.flag == "super-polynomial" else self.a


class MixingProfile(LabModel):
    kind: MixingKind
    lags: tuple[int, ...]
    values: tuple[float, ...]
    provenance: Provenance
    fit: DecayFit | None = None
    metadata: dict[str, Any] = {}

    @model_validator(mode="after")
    def _check(self) -> "MixingProfile":
        if len(self.lags) != len(self.values):
            raise ValueError("lags and values must have the same length")
        if any(lag < 1 for lag in self.lags):
            raise ValueError("lags must be positive integers")
        if any(b <= a for a, b in zip(self.lags, self.lags[1:])):
            raise ValueError("lags must be strictly increasing")
        upper = self.kind.upper
        for value in self.values:
            if not -RANGE_TOLERANCE <= value <= upper + RANGE_TOLERANCE:
                raise ValueError(f"{self.kind} value {value} outside [0, {upper}]")
        return self

    def with_fit(self, fit: DecayFit | None) -> "MixingProfile":
        return self.model_copy(update={"fit": fit})

    def csv_rows(self) -> list[tuple]:
        return [(lag, value, self.provenance.source) for lag, value in zip(self.lags, self.values)]


class RateThreshold(LabModel):
    delta: Annotated[float, Field(gt=0.0, lt=1.0)]

    @computed_field
    @property
    def exponent(self) -> float:
        return (1.0 + self.delta) / (1.0 - self.delta)


class ThresholdCheck(LabModel):
    kind: MixingKind
    delta: float
    required_exponent: float
    fitted_exponent: float | None
    flag: str | None
    verdict: Literal["SATISFIED", "VIOLATED", "INCONCLUSIVE"]
    reason: str
    classical: dict[str, bool] = {}
    beta_summable: bool | None = None


def fit_decay(profile: MixingProfile) -> DecayFit:
    """Least squares of log value against log lag over the strictly positive values.

    The fit is flagged super-polynomial when a geometric law fits the same
    points better with R^2 >= 0.99.
    """
    lags = np.asarray(profile.lags, dtype=float)
    values = np.asarray(profile.values, dtype=float)
    positive = values > 0.0
    excluded = tuple(int(lag) for lag in lags[~positive])
    if excluded:
        log.warning(f"fit_decay: dropping {len(excluded)} zero values at lags {list(excluded)}")
    if positive.sum() < 3:
        raise FitUndefinedError(f"need at least 3 strictly positive values, got {int(positive.sum())}")
    power = loglog_fit(lags[positive], values[positive])
    geometric = semilog_fit(lags[positive], values[positive])
    super_polynomial = geometric.r_squared >= GEOMETRIC_R2 and geometric.r_squared > power.r_squared
    chosen = geometric if super_polynomial else power
    return DecayFit(
        C=math.exp(power.intercept),
        a=-power.slope,
        r_squared=chosen.r_squared,
        rms_residual=chosen.rms_residual,
        flag="super-polynomial" if super_polynomial else "polynomial",
        geometric_rate=math.exp(geometric.slope) if super_polynomial else None,
        points=power.points,
        excluded_lags=excluded,
    )


def _vanishing_lag(profile: MixingProfile) -> int | None:
    """First lag from which every value is exactly zero, if any."""
    first = None
    for lag, value in zip(reversed(profile.lags), reversed(profile.values)):
        if value != 0.0:
            break
        first = lag
    return first


def classical_comparisons(exponent: float) -> dict[str, bool]:
    return {
        "a>1": exponent > 1.0,
        "a>2": exponent > 2.0,
        "a>1+sqrt2": exponent > 1.0 + math.sqrt(2.0),
        "a>3": exponent > 3.0,
    }


def check_rate_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise InvalidInputError(f"delta must lie in (0, 1), got {delta}")


def threshold_check(profile: MixingProfile, delta: float) -> ThresholdCheck:
    """Compares the fitted decay with the rate n^-((1+delta)/(1-delta))."""
    check_rate_delta(delta)
    if not profile.values:
        raise InvalidInputError("threshold_check needs a nonempty profile")
    required = RateThreshold(delta=delta).exponent

    def result(verdict: str, reason: str, exponent: float | None = None, flag: str | None = None):
        beta_summable = None
        if profile.kind is MixingKind.BETA and exponent is not None:
            beta_summable = exponent > 1.0
        return ThresholdCheck(
            kind=profile.kind,
            delta=delta,
            required_exponent=required,
            fitted_exponent=exponent,
            flag=flag,
            verdict=verdict,
            reason=reason,
            classical=classical_comparisons(exponent) if exponent is not None else {},
            beta_summable=beta_summable,
        )

    vanishing = _vanishing_lag(profile)
    if vanishing is not None:
        return result("SATISFIED", f"values are exactly 0 from lag {vanishing} on", math.inf, "vanishing")
    try:
        fit = profile.fit if profile.fit is not None else fit_decay(profile)
    except FitUndefinedError as e:
        log.warning(f"threshold_check inconclusive: {e}")
        return result("INCONCLUSIVE", str(e))
    exponent = fit.effective_exponent
    if fit.flag == "super-polynomial":
        return result("SATISFIED", f"geometric decay (rate {fit.geometric_rate:.4g}) beats every polynomial rate", exponent, fit.flag)
    if fit.rms_residual > GOOD_FIT_RMS:
        log.warning(f"threshold_check inconclusive: log residual {fit.rms_residual:.3g} above {GOOD_FIT_RMS}")
        return result("INCONCLUSIVE", f"poor power-law fit (rms log residual {fit.rms_residual:.3g})", exponent, fit.flag)
    if exponent >= required - EXPONENT_TOLERANCE:
        return result("SATISFIED", f"fitted a={exponent:.4g} >= required {required:.4g}", exponent, fit.flag)
    return result("VIOLATED", f"fitted a={exponent:.4g} < required {required:.4g}", exponent, fit.flag)


def _try_fit(profile: MixingProfile) -> DecayFit | None:
    try:
        return fit_decay(profile)
    except FitUndefinedError as e:
        log.info(f"profile left unfitted: {e}")
        return None


def exact_profile(model: TransitionModel, lags, kind: MixingKind | str) -> MixingProfile:
    kind = MixingKind(kind)
    lags = tuple(int(lag) for lag in lags)
    metadata: dict[str, Any] = {"reduction": MARKOV_REDUCTION, "states": model.k}
    if kind is MixingKind.ALPHA:
        values = tuple(alpha_markov_exact(model, lag) for lag in lags)
    else:
        values = tuple(beta_markov_exact(model, lag) for lag in lags)
        # The sup-over-events formula for beta coincides with alpha for this pair.
        if model.k <= MAX_EXACT_ALPHA_STATES:
            metadata["sup_event_form"] = [alpha_markov_exact(model, lag) for lag in lags]
    profile = MixingProfile(kind=kind, lags=lags, values=values, provenance=Provenance(source="EXACT"), metadata=metadata)
    return profile.with_fit(_try_fit(profile))


def estimated_profile(
    spec: ProcessSpec,
    x: float,
    lags,
    reps: int,
    path_length: int,
    seed: int,
    kind: MixingKind | str = MixingKind.ALPHA,
    workers: int = 1,
) -> MixingProfile:
    """Averages per-event modulus estimates over `reps` independent paths.

    Replication r uses stream r of `seed`.
    """
    kind = MixingKind(kind)
    lags = tuple(int(lag) for lag in lags)
    if reps < 1:
        raise InvalidInputError(f"reps must be positive, got {reps}")
    estimator = alpha_modulus_estimate if kind is MixingKind.ALPHA else beta_modulus_estimate

    def replicate(r: int) -> list[float]:
        path = generate(spec, path_length, seed, stream=r)
        return [estimator(path, x, lag) for lag in lags]

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        table = np.array(list(pool.map(replicate, range(reps))))
    means = np.clip(table.mean(axis=0), 0.0, kind.upper)
    stderr = table.std(axis=0, ddof=1) / math.sqrt(reps) if reps > 1 else np.zeros(len(lags))
    profile = MixingProfile(
        kind=kind,
        lags=lags,
        values=tuple(means.tolist()),
        provenance=Provenance(source="ESTIMATED", reps=reps, path_length=path_length),
        metadata={"x": x, "spec": spec.label, "stderr": stderr.tolist()},
    )
    return profile.with_fit(_try_fit(profile))
