"""Declarative descriptions of stationary generators and their sample paths."""

import logging
from typing import Annotated, Literal, Union

import numpy as np
from pydantic import Field, field_validator, model_validator
from scipy import stats

from gclab.utils.typing import LabModel, PositiveInt, Seed

log = logging.getLogger(__name__)

ROW_TOLERANCE = 1e-12
STATIONARY_TOLERANCE = 1e-10


def stationary_distribution(matrix: np.ndarray) -> np.ndarray:
    """Solves pi P = pi with sum(pi) = 1 by least squares."""
    k = matrix.shape[0]
    system = np.vstack((matrix.T - np.eye(k), np.ones((1, k))))
    rhs = np.zeros(k + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


class Marginal(LabModel):
    """A location-scale marginal law backed by scipy.stats."""

    family: Literal["uniform", "normal", "exponential"]
    loc: float = 0.0
    scale: Annotated[float, Field(gt=0.0)] = 1.0

    def frozen(self):
        if self.family == "uniform":
            return stats.uniform(loc=self.loc, scale=self.scale)
        if self.family == "normal":
            return stats.norm(loc=self.loc, scale=self.scale)
        return stats.expon(loc=self.loc, scale=self.scale)


class TransitionModel(LabModel):
    """Finite-state stationary Markov chain.

    `pi` may be omitted on input; it is then solved from the matrix.
    """

    states: tuple[float, ...]
    matrix: tuple[tuple[float, ...], ...]
    pi: tuple[float, ...] | None = None

    @model_validator(mode="before")
    @classmethod
    def _fill_stationary(cls, data):
        if isinstance(data, dict) and data.get("pi") is None and data.get("matrix") is not None:
            matrix = np.asarray(data["matrix"], dtype=float)
            if matrix.ndim == 2 and matrix.shape[0] == matrix.shape[1] and matrix.size:
                data = {**data, "pi": tuple(float(v) for v in stationary_distribution(matrix))}
        return data

    @model_validator(mode="after")
    def _check_chain(self) -> "TransitionModel":
        k = len(self.states)
        if k < 1:
            raise ValueError("a chain needs at least one state")
        if any(b <= a for a, b in zip(self.states, self.states[1:])):
            raise ValueError("states must be distinct and ascending")
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (k, k):
            raise ValueError(f"transition matrix must be {k}x{k}, got {matrix.shape}")
        if np.any(matrix < 0.0) or not np.all(np.isfinite(matrix)):
            raise ValueError("transition probabilities must be finite and nonnegative")
        row_error = np.max(np.abs(matrix.sum(axis=1) - 1.0))
        if row_error > ROW_TOLERANCE:
            raise ValueError(f"rows must sum to 1 (max deviation {row_error:.3e})")
        pi = np.asarray(self.pi, dtype=float)
        if pi.shape != (k,) or np.any(pi < 0.0):
            raise ValueError("pi must be a nonnegative vector with one entry per state")
        if abs(pi.sum() - 1.0) > STATIONARY_TOLERANCE:
            raise ValueError("pi must sum to 1")
        drift = np.max(np.abs(pi @ matrix - pi))
        if drift > STATIONARY_TOLERANCE:
            raise ValueError(f"pi is not stationary for the matrix (max drift {drift:.3e})")
        return self

    @property
    def k(self) -> int:
        return len(self.states)

    @property
    def P(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    @property
    def stationary(self) -> np.ndarray:
        return np.array(self.pi, dtype=float)

    @property
    def values(self) -> np.ndarray:
        return np.array(self.states, dtype=float)

    @classmethod
    def from_matrix(cls, states, matrix) -> "TransitionModel":
        return cls(
            states=tuple(float(s) for s in states),
            matrix=tuple(tuple(float(v) for v in row) for row in np.asarray(matrix, dtype=float)),
        )

    @classmethod
    def constant(cls, value: float = 0.0) -> "TransitionModel":
        return cls(states=(float(value),), matrix=((1.0,),), pi=(1.0,))


class IidProcess(LabModel):
    kind: Literal["iid"] = "iid"
    marginal: Marginal


class Ar1Process(LabModel):
    kind: Literal["ar1"] = "ar1"
    rho: float
    innovation_sd: Annotated[float, Field(gt=0.0)] = 1.0

    @field_validator("rho")
    @classmethod
    def _stationary(cls, rho: float) -> float:
        if not abs(rho) < 1.0:
            raise ValueError(f"AR(1) needs |rho| < 1 for stationarity, got {rho}")
        return rho

    @property
    def stationary_sd(self) -> float:
        return self.innovation_sd / np.sqrt(1.0 - self.rho**2)


class MarkovProcess(LabModel):
    kind: Literal["markov"] = "markov"
    model: TransitionModel


class MDependentProcess(LabModel):
    """Standardized moving sum of m+1 consecutive iid base draws."""

    kind: Literal["m_dependent"] = "m_dependent"
    m: Annotated[int, Field(ge=0)]
    base: Marginal


ProcessKind = Annotated[
    Union[IidProcess, Ar1Process, MarkovProcess, MDependentProcess],
    Field(discriminator="kind"),
]


class ProcessSpec(LabModel):
    label: str
    process: ProcessKind

    @property
    def kind(self) -> str:
        return self.process.kind

    @classmethod
    def iid(cls, family: str = "uniform", loc: float = 0.0, scale: float = 1.0, label: str | None = None) -> "ProcessSpec":
        return cls(
            label=label or f"iid-{family}",
            process=IidProcess(marginal=Marginal(family=family, loc=loc, scale=scale)),
        )

    @classmethod
    def ar1(cls, rho: float, innovation_sd: float = 1.0, label: str | None = None) -> "ProcessSpec":
        return cls(label=label or f"ar1-{rho}", process=Ar1Process(rho=rho, innovation_sd=innovation_sd))

    @classmethod
    def markov(cls, states, matrix, label: str | None = None) -> "ProcessSpec":
        model = TransitionModel.from_matrix(states, matrix)
        return cls(label=label or f"markov-{model.k}", process=MarkovProcess(model=model))

    @classmethod
    def from_model(cls, model: TransitionModel, label: str | None = None) -> "ProcessSpec":
        return cls(label=label or f"markov-{model.k}", process=MarkovProcess(model=model))

    @classmethod
    def m_dependent(cls, m: int, family: str = "normal", label: str | None = None) -> "ProcessSpec":
        return cls(
            label=label or f"m{m}-dependent-{family}",
            process=MDependentProcess(m=m, base=Marginal(family=family)),
        )


class SamplePath(LabModel):
    values: tuple[float, ...]
    spec_label: str
    seed: Seed
    n: PositiveInt
    stream: Annotated[int, Field(ge=0)] = 0

    @model_validator(mode="after")
    def _length(self) -> "SamplePath":
        if len(self.values) != self.n:
            raise ValueError(f"path has {len(self.values)} values but n={self.n}")
        return self

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)
