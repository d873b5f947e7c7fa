"""The two normalized-variance conditions, exactly or by Monte Carlo.

For q >= 1 and 0 < delta < 3:

    s1(q) = Var(sum_{i=1}^{q} Y_i) / q^((3-delta)/2)
    s2(q) = Var(sum_{i=q^2+1}^{(q+1)^2} Y_i) / q^(3-delta)

with Y_i = I{X_i <= x} or f(X_i). Stationarity reduces the block of s2 to
the first 2q+1 indices.
"""

import logging
import math
from collections.abc import Callable
from enum import StrEnum
from typing import NamedTuple

import numpy as np

from gclab.errors import InsufficientDataError, InvalidInputError
from gclab.gcip.sources import (
    Source,
    functional_autocovariances,
    indicator_autocovariances,
    is_exact,
    partial_sum_variances,
    source_label,
)
from gclab.procgen.generator import generate
from gclab.procgen.spec import ProcessSpec, SamplePath, TransitionModel

log = logging.getLogger(__name__)


class GcipMode(StrEnum):
    EXACT_MARKOV = "EXACT_MARKOV"
    MONTE_CARLO = "MONTE_CARLO"


class Which(StrEnum):
    S1 = "S1"
    S2 = "S2"


class VarianceEstimate(NamedTuple):
    value: float
    stderr: float
    reps: int


def check_delta(delta: float) -> None:
    if not 0.0 < delta < 3.0:
        raise InvalidInputError(f"delta must lie in (0, 3), got {delta}")


def check_q(q: int) -> None:
    if q < 1:
        raise InvalidInputError(f"q must be a positive integer, got {q}")


def block_length(q: int, which: Which) -> int:
    return q if which is Which.S1 else 2 * q + 1


def normalizer(q: int, delta: float, which: Which) -> float:
    power = (3.0 - delta) / 2.0 if which is Which.S1 else 3.0 - delta
    return float(q) ** power


def resolve_mode(source: Source, mode: GcipMode | str | None, functional: bool = False) -> GcipMode:
    """EXACT_MARKOV when exact covariances of the requested quantity exist, else MONTE_CARLO."""
    if mode is None:
        return GcipMode.EXACT_MARKOV if is_exact(source, functional) else GcipMode.MONTE_CARLO
    mode = GcipMode(mode)
    if mode is GcipMode.EXACT_MARKOV and not is_exact(source, functional):
        raise InvalidInputError(f"{source_label(source)} has no exact covariances; use MONTE_CARLO mode")
    return mode


def apply(f: Callable, values: np.ndarray) -> np.ndarray:
    """Evaluates f elementwise, vectorized when f accepts arrays."""
    try:
        result = np.asarray(f(values), dtype=float)
        if result.shape == values.shape:
            return result
    except (TypeError, ValueError):
        pass
    return np.vectorize(f, otypes=[float])(values)


def replicated_windows(source: Source, length: int, reps: int, seed: int) -> np.ndarray:
    """reps x length array of stationary windows.

    A spec or finite chain is sampled afresh, replication r on stream r. A
    single path is cut into non-overlapping blocks instead.
    """
    if isinstance(source, SamplePath):
        blocks = min(reps, source.n // length)
        if blocks < 2:
            raise InsufficientDataError(f"path of length {source.n} holds fewer than 2 blocks of length {length}")
        return source.array[: blocks * length].reshape(blocks, length)
    if isinstance(source, TransitionModel):
        source = ProcessSpec.from_model(source)
    if not isinstance(source, ProcessSpec):
        raise InvalidInputError(f"Monte Carlo needs a process spec or a sample path, got {type(source).__name__}")
    if reps < 2:
        raise InvalidInputError(f"Monte Carlo needs at least 2 replications, got {reps}")
    return np.stack([generate(source, length, seed, stream=r).array for r in range(reps)])


def sum_variance(sums: np.ndarray) -> VarianceEstimate:
    """Sample variance of replicated sums with a delta-method standard error."""
    reps = sums.size
    deviations = sums - sums.mean()
    squared = deviations**2
    value = float(squared.sum() / (reps - 1))
    stderr = float(np.sqrt(np.mean((squared - squared.mean()) ** 2) / reps))
    return VarianceEstimate(value=value, stderr=stderr, reps=reps)


def monte_carlo_variance(source: Source, f: Callable, length: int, reps: int = 10_000, seed: int = 0) -> VarianceEstimate:
    """Monte Carlo Var(sum_{i=1}^{length} f(X_i))."""
    windows = replicated_windows(source, length, reps, seed)
    return sum_variance(apply(f, windows).sum(axis=1))


def _indicator(x: float) -> Callable:
    return lambda values: (np.asarray(values) <= x).astype(float)


def _exact_value(gammas: np.ndarray, q: int, delta: float, which: Which, partial_blocks: bool) -> float:
    length = block_length(q, which)
    variances = partial_sum_variances(gammas, length)
    variance = variances.max() if (partial_blocks and which is Which.S2) else variances[-1]
    return float(variance / normalizer(q, delta, which))


def _s_value(
    source: Source,
    f: Callable | None,
    x: float | None,
    q: int,
    delta: float,
    which: Which,
    mode: GcipMode | str | None,
    reps: int,
    seed: int,
    partial_blocks: bool,
    envelope: float | None = None,
) -> VarianceEstimate:
    check_q(q)
    check_delta(delta)
    mode = resolve_mode(source, mode, functional=f is not None)
    length = block_length(q, which)
    if mode is GcipMode.EXACT_MARKOV:
        if f is None:
            gammas = indicator_autocovariances(source, x, length)
        else:
            gammas = functional_autocovariances(source, f, length)
        return VarianceEstimate(_exact_value(gammas, q, delta, which, partial_blocks), 0.0, 0)
    function = _indicator(x) if f is None else f
    windows = replicated_windows(source, length, reps, seed)
    values = apply(function, windows)
    if envelope is not None and np.max(np.abs(values)) > envelope:
        raise InvalidInputError(f"functional exceeds its declared envelope {envelope}")
    partial = np.cumsum(values, axis=1)
    lengths = range(1, length + 1) if (partial_blocks and which is Which.S2) else (length,)
    best = max((sum_variance(partial[:, L - 1]) for L in lengths), key=lambda e: e.value)
    scale = normalizer(q, delta, which)
    return VarianceEstimate(best.value / scale, best.stderr / scale, best.reps)


def s1_indicator(
    source: Source,
    x: float,
    q: int,
    delta: float = 1.0,
    mode: GcipMode | str | None = None,
    reps: int = 10_000,
    seed: int = 0,
) -> float:
    """q^-((3-delta)/2) Var(sum_{i<=q} I{X_i <= x})."""
    return _s_value(source, None, x, q, delta, Which.S1, mode, reps, seed, False).value


def s2_indicator(
    source: Source,
    x: float,
    q: int,
    delta: float = 1.0,
    mode: GcipMode | str | None = None,
    reps: int = 10_000,
    seed: int = 0,
    partial_blocks: bool = False,
) -> float:
    """q^-(3-delta) Var of the block sum over i = q^2+1..(q+1)^2.

    With partial_blocks the sup over the partial block sums is taken instead.
    """
    return _s_value(source, None, x, q, delta, Which.S2, mode, reps, seed, partial_blocks).value


def s_functional(
    source: Source,
    f: Callable,
    q: int,
    delta: float = 1.0,
    which: Which | str = Which.S1,
    mode: GcipMode | str | None = None,
    envelope: float | None = None,
    reps: int = 10_000,
    seed: int = 0,
    partial_blocks: bool = False,
) -> float:
    """Same normalized variances for a bounded functional f(X_i).

    Monte Carlo evaluation needs `envelope`, a bound on |f|.
    """
    which = Which(which)
    if resolve_mode(source, mode, functional=True) is GcipMode.MONTE_CARLO:
        if envelope is None or not math.isfinite(envelope):
            raise InvalidInputError("Monte Carlo evaluation of a functional needs a finite envelope bound on |f|")
    return _s_value(source, f, None, q, delta, which, mode, reps, seed, partial_blocks, envelope).value


def inside_normalized_variance(sums: np.ndarray, q: int, delta: float) -> float:
    """Var(q^-((3-delta)/4) sum f), the inside-the-variance form of the first condition."""
    scaled = np.asarray(sums, dtype=float) / float(q) ** ((3.0 - delta) / 4.0)
    return float(scaled.var(ddof=1))
