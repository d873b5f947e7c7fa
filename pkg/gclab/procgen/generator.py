"""Sampling and marginal laws for every ProcessSpec kind."""

import logging

import numpy as np
from scipy import signal, stats

from gclab.errors import InvalidInputError
from gclab.procgen.laws import (
    ContinuousLaw,
    DiscreteLaw,
    from_scipy,
    standardized_gamma,
    standardized_irwin_hall,
)
from gclab.procgen.spec import (
    Ar1Process,
    IidProcess,
    MarkovProcess,
    MDependentProcess,
    ProcessSpec,
    SamplePath,
    TransitionModel,
)
from gclab.procgen.streams import stream_rng

log = logging.getLogger(__name__)


def _markov_states(model: TransitionModel, n: int, rng: np.random.Generator) -> np.ndarray:
    cumulative = np.cumsum(model.P, axis=1)
    cumulative[:, -1] = 1.0
    start = np.cumsum(model.stationary)
    start[-1] = 1.0
    uniforms = rng.random(n)
    index = np.empty(n, dtype=np.int64)
    state = int(np.searchsorted(start, uniforms[0], side="right"))
    index[0] = state
    for t in range(1, n):
        state = int(np.searchsorted(cumulative[state], uniforms[t], side="right"))
        index[t] = state
    return index


def _sample(spec: ProcessSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    process = spec.process
    match process:
        case IidProcess(marginal=marginal):
            return marginal.frozen().rvs(size=n, random_state=rng)
        case Ar1Process(rho=rho, innovation_sd=sd):
            first = rng.normal(0.0, process.stationary_sd)
            if n == 1:
                return np.array([first])
            innovations = rng.normal(0.0, sd, size=n - 1)
            rest, _ = signal.lfilter([1.0], [1.0, -rho], innovations, zi=[rho * first])
            return np.concatenate(([first], rest))
        case MarkovProcess(model=model):
            return model.values[_markov_states(model, n, rng)]
        case MDependentProcess(m=m, base=base):
            law = base.frozen()
            draws = law.rvs(size=n + m, random_state=rng)
            window = np.convolve(draws, np.ones(m + 1), mode="valid")
            mean, sd = law.mean(), law.std()
            return (window - (m + 1) * mean) / (np.sqrt(m + 1) * sd)
    raise InvalidInputError(f"unsupported process kind {spec.kind!r}")


def generate(spec: ProcessSpec, n: int, seed: int, stream: int = 0) -> SamplePath:
    """Draws X_1..X_n from the stationary law of `spec`.

    The result depends only on (spec, n, seed, stream).
    """
    if n < 1:
        raise InvalidInputError(f"path length must be positive, got {n}")
    rng = stream_rng(seed, stream)
    values = _sample(spec, n, rng)
    log.debug(f"generated {n} values for {spec.label} (seed={seed}, stream={stream})")
    return SamplePath(
        values=tuple(np.asarray(values, dtype=float).tolist()),
        spec_label=spec.label,
        seed=seed,
        n=n,
        stream=stream,
    )


def marginal_law(spec: ProcessSpec) -> ContinuousLaw | DiscreteLaw:
    process = spec.process
    match process:
        case IidProcess(marginal=marginal):
            return from_scipy(marginal.frozen(), marginal.family)
        case Ar1Process():
            return from_scipy(stats.norm(0.0, process.stationary_sd), "ar1-stationary-normal")
        case MarkovProcess(model=model):
            return DiscreteLaw(atoms=model.states, masses=model.pi, name="markov-stationary")
        case MDependentProcess(m=m, base=base):
            if base.family == "normal":
                return from_scipy(stats.norm(), "standard-normal")
            if base.family == "uniform":
                return standardized_irwin_hall(m + 1)
            return standardized_gamma(m + 1)
    raise InvalidInputError(f"unsupported process kind {spec.kind!r}")


def marginal_cdf(spec: ProcessSpec, x: float) -> float:
    """Exact stationary F(x)."""
    return marginal_law(spec).cdf(x)


def random_transition_model(rng: np.random.Generator, k: int, states=None) -> TransitionModel:
    """Chain with iid flat-Dirichlet rows; states default to 0..k-1."""
    if k < 1:
        raise InvalidInputError(f"need at least one state, got k={k}")
    matrix = rng.dirichlet(np.ones(k), size=k)
    # Dirichlet rows are exact to a few ulps; pin them onto the simplex.
    matrix = matrix / matrix.sum(axis=1, keepdims=True)
    if states is None:
        states = np.arange(k, dtype=float)
    return TransitionModel.from_matrix(states, matrix)
