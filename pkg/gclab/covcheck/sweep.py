import logging
from collections.abc import Sequence

import numpy as np

from gclab.covcheck.inequalities import (
    HolderTriple,
    InequalityId,
    check_alpha_holder,
    check_alpha_sup,
    check_beta_sup,
)
from gclab.errors import InvalidInputError
from gclab.procgen.generator import random_transition_model
from gclab.procgen.streams import stream_rng
from gclab.utils.tracing import JsonLinesSink
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)


class SweepSummary(LabModel):
    models: int
    certificates: int
    failures: dict[InequalityId, int]
    min_slack: dict[InequalityId, float]

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())


def random_triple(rng: np.random.Generator) -> HolderTriple:
    """Hölder triple from a flat Dirichlet draw of the reciprocals."""
    weights = rng.dirichlet(np.ones(3))
    p, q, r = (float(1.0 / w) for w in weights)
    return HolderTriple(p=p, q=q, r=r)


def sweep(
    count: int,
    seed: int,
    lags: Sequence[int] = (1, 2, 3, 4, 5),
    state_counts: Sequence[int] = (2, 3, 4, 5, 6),
    sink: JsonLinesSink | None = None,
) -> SweepSummary:
    """Certifies all three inequalities on `count` random chains and bounded f, g.

    Model i is drawn from stream i of `seed`.
    """
    if count < 1 or not lags:
        raise InvalidInputError("a sweep needs at least one model and one lag")
    failures = {inequality: 0 for inequality in InequalityId}
    min_slack = {inequality: float("inf") for inequality in InequalityId}
    certificates = 0
    for case in range(count):
        rng = stream_rng(seed, case)
        k = int(rng.choice(state_counts))
        model = random_transition_model(rng, k)
        f = rng.uniform(-1.0, 1.0, size=k) * rng.uniform(0.1, 10.0)
        g = rng.uniform(-1.0, 1.0, size=k) * rng.uniform(0.1, 10.0)
        triple = random_triple(rng)
        for lag in lags:
            for certificate in (
                check_alpha_holder(model, f, g, lag, triple),
                check_alpha_sup(model, f, g, lag),
                check_beta_sup(model, f, g, lag),
            ):
                certificates += 1
                inequality = certificate.inequality_id
                min_slack[inequality] = min(min_slack[inequality], certificate.slack)
                if not certificate.passed:
                    failures[inequality] += 1
                if sink is not None:
                    sink.export(
                        {"model_case": case, "k": k, **certificate.model_dump(mode="json")},
                        passed=certificate.passed,
                    )
    summary = SweepSummary(models=count, certificates=certificates, failures=failures, min_slack=min_slack)
    log.info(f"covariance sweep: {certificates} certificates over {count} models, failures={failures}")
    return summary
