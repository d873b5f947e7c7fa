"""Exact and estimated mixing coefficients of finite-state stationary chains.

Coefficients between the full past and future are computed for the pair
(sigma(X_0), sigma(X_n)), which is exact for stationary Markov chains.
"""

import logging

import numpy as np

from gclab.errors import FeasibilityError, InsufficientDataError, InvalidInputError
from gclab.procgen.spec import SamplePath, TransitionModel

log = logging.getLogger(__name__)

MAX_EXACT_ALPHA_STATES = 20
MIN_OVERLAP = 30
ROW_DRIFT_TOLERANCE = 1e-12
_CHUNK = 1 << 16


def _renormalize(matrix: np.ndarray) -> np.ndarray:
    drift = np.max(np.abs(matrix.sum(axis=1) - 1.0))
    if drift > ROW_DRIFT_TOLERANCE:
        log.warning(f"renormalizing rows of a matrix power (row drift {drift:.3e})")
        matrix = np.clip(matrix, 0.0, None)
        matrix = matrix / matrix.sum(axis=1, keepdims=True)
    return matrix


def transition_power(model: TransitionModel, n: int) -> np.ndarray:
    """P^n by repeated squaring."""
    if n < 0:
        raise InvalidInputError(f"lag must be nonnegative, got {n}")
    result = np.eye(model.k)
    base = model.P
    while n:
        if n & 1:
            result = _renormalize(result @ base)
        n >>= 1
        if n:
            base = _renormalize(base @ base)
    return result


def joint_law(model: TransitionModel, lag: int) -> np.ndarray:
    """Matrix of P(X_0 = s_i, X_lag = s_j)."""
    return model.stationary[:, None] * transition_power(model, lag)


def _check_lag(n: int) -> None:
    if n < 1:
        raise InvalidInputError(f"mixing lag must be a positive integer, got {n}")


def alpha_markov_exact(model: TransitionModel, n: int) -> float:
    """sup over A, B of |P(X_0 in A, X_n in B) - P(X_0 in A) P(X_n in B)|.

    For a fixed A the best B collects either all positive or all negative
    entries of the row sum over A, so only the subsets A are enumerated.
    A and its complement give the same value, hence the last state is
    never put in A.
    """
    _check_lag(n)
    k = model.k
    if k > MAX_EXACT_ALPHA_STATES:
        raise FeasibilityError(
            f"exact alpha enumerates 2^{k - 1} events for k={k} > {MAX_EXACT_ALPHA_STATES}; "
            "use beta_markov_exact (alpha <= beta) or alpha_modulus_estimate instead"
        )
    pi = model.stationary
    deviation = joint_law(model, n) - np.outer(pi, pi)
    if k == 1:
        return 0.0
    free = deviation[: k - 1]
    shifts = np.arange(k - 1, dtype=np.int64)
    best = 0.0
    total = 1 << (k - 1)
    for start in range(0, total, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        picks = ((masks[:, None] >> shifts) & 1).astype(float)
        sums = picks @ free
        gains = np.maximum(np.clip(sums, 0.0, None).sum(axis=1), np.clip(-sums, 0.0, None).sum(axis=1))
        best = max(best, float(gains.max()))
    return float(min(max(best, 0.0), 0.25))


def beta_markov_exact(model: TransitionModel, n: int) -> float:
    """sum_i pi_i * TV(P^n(i, .), pi), the finest-partition value of beta."""
    _check_lag(n)
    pi = model.stationary
    distances = 0.5 * np.abs(transition_power(model, n) - pi[None, :]).sum(axis=1)
    return float(min(max(pi @ distances, 0.0), 1.0))


def indicator_covariance_exact(model: TransitionModel, x: float, n: int) -> float:
    """Cov(I{X_0 <= x}, I{X_n <= x}) under the stationary chain."""
    indicator = (model.values <= x).astype(float)
    mass = float(model.stationary @ indicator)
    return float(indicator @ joint_law(model, n) @ indicator - mass * mass)


def alpha_modulus_exact(model: TransitionModel, x: float, n: int) -> float:
    """Mixing modulus alpha(x, n) for the events {X_0 <= x}, {X_n <= x}.

    Both sigma-algebras are binary, so every event pair gives the same
    covariance magnitude.
    """
    _check_lag(n)
    return abs(indicator_covariance_exact(model, x, n))


def beta_modulus_exact(model: TransitionModel, x: float, n: int) -> float:
    """beta(x, n) over the two-cell partitions {X <= x}, {X > x}."""
    _check_lag(n)
    return 2.0 * abs(indicator_covariance_exact(model, x, n))


def _lagged_indicators(path: SamplePath, x: float, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    _check_lag(n)
    if path.n <= n + MIN_OVERLAP:
        raise InsufficientDataError(
            f"path of length {path.n} is too short for lag {n} (needs more than {n + MIN_OVERLAP})"
        )
    indicator = (path.array <= x).astype(float)
    return indicator, indicator[:-n], indicator[n:]


def alpha_modulus_estimate(path: SamplePath, x: float, n: int) -> float:
    """Absolute sample lag-n autocovariance of the indicator series I{X_t <= x}."""
    indicator, head, tail = _lagged_indicators(path, x, n)
    mean = indicator.mean()
    return float(abs(np.mean(head * tail) - mean * mean))


def beta_modulus_estimate(path: SamplePath, x: float, n: int) -> float:
    return 2.0 * alpha_modulus_estimate(path, x, n)


def modulus_stderr(path: SamplePath, x: float, n: int, batches: int = 20) -> float:
    """Batch-means standard error of the alpha modulus estimate."""
    indicator, head, tail = _lagged_indicators(path, x, n)
    if batches < 2 or head.size < 2 * batches:
        raise InsufficientDataError(f"cannot form {batches} batches from {head.size} lagged pairs")
    mean = indicator.mean()
    products = (head - mean) * (tail - mean)
    usable = head.size - head.size % batches
    batch_means = products[:usable].reshape(batches, -1).mean(axis=1)
    return float(batch_means.std(ddof=1) / np.sqrt(batches))
