"""Covariance inequalities under alpha- and beta-mixing, certified on finite chains."""

import logging
import math
from collections.abc import Callable, Sequence
from enum import StrEnum

import numpy as np
from pydantic import computed_field, model_validator

from gclab.errors import InvalidInputError
from gclab.mixing.coefficients import alpha_markov_exact, beta_markov_exact, joint_law
from gclab.procgen.spec import TransitionModel
from gclab.utils.storage import canonical_digest
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)

HOLDER_TOLERANCE = 1e-12
SLACK_TOLERANCE = -1e-10

StateFunction = Callable[[float], float] | Sequence[float] | np.ndarray


class InequalityId(StrEnum):
    ALPHA_8 = "ALPHA_8"
    ALPHA_4_SUP = "ALPHA_4_SUP"
    BETA_2_SUP = "BETA_2_SUP"


class HolderTriple(LabModel):
    """Exponents with 1/p + 1/q + 1/r = 1; math.inf is allowed."""

    p: float
    q: float
    r: float

    @model_validator(mode="after")
    def _conjugate(self) -> "HolderTriple":
        for name in ("p", "q", "r"):
            if not getattr(self, name) >= 1.0:
                raise ValueError(f"Hölder exponent {name} must be >= 1 or infinite")
        total = 1.0 / self.p + 1.0 / self.q + 1.0 / self.r
        if abs(total - 1.0) > HOLDER_TOLERANCE:
            raise ValueError(f"1/p + 1/q + 1/r = {total!r}, expected 1")
        return self


class BoundCertificate(LabModel):
    lhs: float
    rhs: float
    slack: float
    inequality_id: InequalityId
    inputs_digest: str

    @computed_field
    @property
    def passed(self) -> bool:
        return self.slack >= SLACK_TOLERANCE


def on_states(model: TransitionModel, f: StateFunction) -> np.ndarray:
    """Values f(s_i) for every state, from a callable or a per-state vector."""
    if callable(f):
        values = np.array([float(f(s)) for s in model.states])
    else:
        values = np.asarray(f, dtype=float)
        if values.shape != (model.k,):
            raise InvalidInputError(f"function table has shape {values.shape}, expected ({model.k},)")
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("function values must be finite")
    return values


def cov_exact(model: TransitionModel, f: StateFunction, g: StateFunction, lag: int) -> float:
    """Cov(f(X_0), g(X_lag)) under the stationary chain; lag 0 uses the diagonal law."""
    fv = on_states(model, f)
    gv = on_states(model, g)
    pi = model.stationary
    return float(fv @ joint_law(model, lag) @ gv - (pi @ fv) * (pi @ gv))


def norm_p(model: TransitionModel, f: StateFunction, p: float) -> float:
    """L^p norm of f(X) under pi; p = inf takes the max over charged states."""
    if not p >= 1.0:
        raise InvalidInputError(f"norm order must be >= 1, got {p}")
    values = np.abs(on_states(model, f))
    pi = model.stationary
    charged = values[pi > 0.0]
    top = float(charged.max()) if charged.size else 0.0
    if math.isinf(p) or top == 0.0:
        return top
    # Scaled by the sup norm so large p cannot overflow.
    return top * float((pi[pi > 0.0] @ (charged / top) ** p) ** (1.0 / p))


def _certificate(lhs: float, rhs: float, inequality: InequalityId, inputs: dict) -> BoundCertificate:
    certificate = BoundCertificate(
        lhs=lhs,
        rhs=rhs,
        slack=rhs - lhs,
        inequality_id=inequality,
        inputs_digest=canonical_digest(inputs),
    )
    if not certificate.passed:
        log.error(f"{inequality} violated: |cov|={lhs!r} > bound={rhs!r}")
    return certificate


def _inputs(model: TransitionModel, fv: np.ndarray, gv: np.ndarray, lag: int, **extra) -> dict:
    return {
        "model": model.model_dump(mode="json"),
        "f": fv.tolist(),
        "g": gv.tolist(),
        "lag": lag,
        **extra,
    }


def check_alpha_holder(model: TransitionModel, f, g, lag: int, triple: HolderTriple) -> BoundCertificate:
    """|Cov(f(X_0), g(X_lag))| <= 8 alpha^(1/r) ||f||_p ||g||_q."""
    fv, gv = on_states(model, f), on_states(model, g)
    lhs = abs(cov_exact(model, fv, gv, lag))
    alpha = alpha_markov_exact(model, lag)
    rhs = 8.0 * alpha ** (1.0 / triple.r) * norm_p(model, fv, triple.p) * norm_p(model, gv, triple.q)
    return _certificate(lhs, rhs, InequalityId.ALPHA_8, _inputs(model, fv, gv, lag, triple=triple.model_dump(mode="json")))


def check_alpha_sup(model: TransitionModel, f, g, lag: int) -> BoundCertificate:
    """|Cov| <= 4 alpha sup|f| sup|g|."""
    fv, gv = on_states(model, f), on_states(model, g)
    lhs = abs(cov_exact(model, fv, gv, lag))
    rhs = 4.0 * alpha_markov_exact(model, lag) * norm_p(model, fv, math.inf) * norm_p(model, gv, math.inf)
    return _certificate(lhs, rhs, InequalityId.ALPHA_4_SUP, _inputs(model, fv, gv, lag))


def check_beta_sup(model: TransitionModel, f, g, lag: int) -> BoundCertificate:
    """|Cov| <= 2 beta sup|f| sup|g|."""
    fv, gv = on_states(model, f), on_states(model, g)
    lhs = abs(cov_exact(model, fv, gv, lag))
    rhs = 2.0 * beta_markov_exact(model, lag) * norm_p(model, fv, math.inf) * norm_p(model, gv, math.inf)
    return _certificate(lhs, rhs, InequalityId.BETA_2_SUP, _inputs(model, fv, gv, lag))
