"""Autocovariance sequences of indicator and bounded functionals.

An exact source is anything whose stationary autocovariances of f(X_t) can be
computed without sampling: finite-state chains, iid specs, Gaussian AR(1) and
Gaussian m-dependent specs (indicators only), and injected covariance
sequences.
"""

import logging
import math
from typing import Annotated, Literal

import numpy as np
from pydantic import Field
from scipy import integrate, stats

from gclab.covcheck.inequalities import StateFunction, on_states
from gclab.errors import InvalidInputError
from gclab.procgen.generator import marginal_law
from gclab.procgen.spec import (
    Ar1Process,
    IidProcess,
    MarkovProcess,
    MDependentProcess,
    ProcessSpec,
    SamplePath,
    TransitionModel,
)
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)

NEGLIGIBLE_CORRELATION = 1e-15


class CovarianceSequence(LabModel):
    """Synthetic stationary covariances: Cov(h) = scale * h^-decay for h >= 1."""

    variance: Annotated[float, Field(gt=0.0)] = 0.25
    scale: float = 0.2
    decay: Annotated[float, Field(gt=0.0)] = 0.2
    label: str = "synthetic-long-memory"
    synthetic: Literal[True] = True

    def autocovariances(self, max_lag: int) -> np.ndarray:
        lags = np.arange(1, max_lag + 1, dtype=float)
        return np.concatenate(([self.variance], self.scale * lags**-self.decay))


Source = TransitionModel | ProcessSpec | CovarianceSequence | SamplePath


def source_label(source: Source) -> str:
    if isinstance(source, TransitionModel):
        return f"markov-{source.k}"
    if isinstance(source, SamplePath):
        return source.spec_label
    return source.label


def is_exact(source: Source, functional: bool = False) -> bool:
    """Whether exact autocovariances exist, for indicators or for a general functional."""
    if isinstance(source, TransitionModel):
        return True
    if isinstance(source, CovarianceSequence):
        return not functional
    if isinstance(source, ProcessSpec):
        process = source.process
        if functional:
            return isinstance(process, (MarkovProcess, IidProcess))
        if isinstance(process, MDependentProcess):
            return process.base.family == "normal"
        return True
    return False


def chain_autocovariances(model: TransitionModel, values: np.ndarray, max_lag: int) -> np.ndarray:
    """gamma(h) = Cov(v(X_0), v(X_h)) for h = 0..max_lag by repeated P v products."""
    if np.ptp(values) == 0.0:
        return np.zeros(max_lag + 1)
    pi = model.stationary
    P = model.P
    mean = float(pi @ values)
    gammas = np.empty(max_lag + 1)
    forward = values.copy()
    for h in range(max_lag + 1):
        gammas[h] = float(pi @ (values * forward)) - mean * mean
        forward = P @ forward
    return gammas


def gaussian_indicator_covariance(z: float, rho: float) -> float:
    """Cov(I{U <= z}, I{V <= z}) for standard bivariate normal (U, V) with correlation rho.

    Integrates the bivariate density along the correlation:
    Phi_2(z, z; rho) - Phi(z)^2 = (1/2pi) int_0^rho exp(-z^2/(1+t)) / sqrt(1-t^2) dt.
    """
    if abs(rho) < NEGLIGIBLE_CORRELATION:
        return 0.0
    if rho >= 1.0:
        mass = stats.norm.cdf(z)
        return float(mass * (1.0 - mass))
    value, _ = integrate.quad(
        lambda t: math.exp(-z * z / (1.0 + t)) / math.sqrt(1.0 - t * t),
        0.0,
        rho,
        epsabs=1e-15,
        epsrel=1e-12,
    )
    return value / (2.0 * math.pi)


def _gaussian_correlations(process: Ar1Process | MDependentProcess, max_lag: int) -> tuple[np.ndarray, float]:
    lags = np.arange(max_lag + 1)
    if isinstance(process, Ar1Process):
        return process.rho ** lags.astype(float), process.stationary_sd
    window = process.m + 1
    return np.clip((window - lags) / window, 0.0, None), 1.0


def indicator_autocovariances(source: Source, x: float, max_lag: int) -> np.ndarray:
    """Exact gamma(0..max_lag) of I{X_t <= x}."""
    if isinstance(source, CovarianceSequence):
        return source.autocovariances(max_lag)
    if isinstance(source, TransitionModel):
        return chain_autocovariances(source, (source.values <= x).astype(float), max_lag)
    if isinstance(source, ProcessSpec) and is_exact(source):
        process = source.process
        if isinstance(process, MarkovProcess):
            model = process.model
            return chain_autocovariances(model, (model.values <= x).astype(float), max_lag)
        if isinstance(process, IidProcess):
            mass = marginal_law(source).cdf(x)
            gammas = np.zeros(max_lag + 1)
            gammas[0] = mass * (1.0 - mass)
            return gammas
        correlations, sd = _gaussian_correlations(process, max_lag)
        z = x / sd
        return np.array([gaussian_indicator_covariance(z, float(rho)) for rho in correlations])
    raise InvalidInputError(f"no exact indicator covariances for {source_label(source)}; use MONTE_CARLO mode")


def functional_autocovariances(source: Source, f: StateFunction, max_lag: int) -> np.ndarray:
    """Exact gamma(0..max_lag) of f(X_t) for finite-state and iid sources."""
    model = None
    if isinstance(source, TransitionModel):
        model = source
    elif isinstance(source, ProcessSpec) and isinstance(source.process, MarkovProcess):
        model = source.process.model
    if model is not None:
        return chain_autocovariances(model, on_states(model, f), max_lag)
    if isinstance(source, ProcessSpec) and isinstance(source.process, IidProcess):
        law = marginal_law(source)
        first, _ = integrate.quad(lambda u: float(f(law.ppf(u))), 0.0, 1.0, limit=200)
        second, _ = integrate.quad(lambda u: float(f(law.ppf(u))) ** 2, 0.0, 1.0, limit=200)
        gammas = np.zeros(max_lag + 1)
        gammas[0] = max(second - first * first, 0.0)
        return gammas
    raise InvalidInputError(
        f"no exact covariances of a general functional for {source_label(source)}; use MONTE_CARLO mode with an envelope"
    )


def partial_sum_variances(gammas: np.ndarray, max_length: int) -> np.ndarray:
    """Var(sum_{i=1}^L Y_i) for L = 1..max_length from stationary autocovariances.

    Uses Var = L gamma_0 + 2 sum_{h=1}^{L-1} (L - h) gamma_h.
    """
    if gammas.size < max_length:
        raise InvalidInputError(f"need {max_length} autocovariances, got {gammas.size}")
    lengths = np.arange(1, max_length + 1, dtype=float)
    tail = gammas[1:max_length]
    # Sums over h = 1..L-1 for each L.
    plain = np.concatenate(([0.0], np.cumsum(tail)))
    weighted = np.concatenate(([0.0], np.cumsum(np.arange(1, max_length) * tail)))
    variances = lengths * gammas[0] + 2.0 * (lengths * plain - weighted)
    return np.clip(variances, 0.0, None)
