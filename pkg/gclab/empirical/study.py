"""Replicated sup-norm convergence studies and the iid DKW tail harness."""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import model_validator

from gclab.errors import InvalidInputError
from gclab.empirical.measures import sup_deviation
from gclab.procgen.generator import generate, marginal_law
from gclab.procgen.spec import ProcessSpec
from gclab.utils.fitting import loglog_fit
from gclab.utils.typing import LabModel, PositiveInt, Seed

log = logging.getLogger(__name__)

DKW_EPSILONS = (0.05, 0.1)
FIT_STATISTIC = "mean"


class StudyRow(LabModel):
    n: int
    mean: float
    median: float
    max: float
    q10: float
    q90: float


class StudyFit(LabModel):
    """mean deviation ~ C n^-b."""

    C: float
    b: float
    r_squared: float


class ConvergenceStudy(LabModel):
    spec_label: str
    spec_kind: str
    seed: Seed
    n_grid: tuple[int, ...]
    reps: PositiveInt
    deviations: tuple[tuple[float, ...], ...]
    summary: tuple[StudyRow, ...]
    fit: StudyFit | None
    fit_statistic: str = FIT_STATISTIC

    @model_validator(mode="after")
    def _check(self) -> "ConvergenceStudy":
        if len(self.deviations) != len(self.n_grid) or any(len(row) != self.reps for row in self.deviations):
            raise ValueError("deviations must be an n_grid x reps table")
        if any(not 0.0 <= d <= 1.0 for row in self.deviations for d in row):
            raise ValueError("sup-norm deviations lie in [0, 1]")
        return self

    def csv_rows(self) -> list[tuple]:
        return [(n, r, d) for n, row in zip(self.n_grid, self.deviations) for r, d in enumerate(row)]

    def plot_rows(self) -> list[tuple]:
        return [(row.n, row.mean, row.q10, row.q90) for row in self.summary]


class DkwCheck(LabModel):
    n: int
    epsilon: float
    observed: float
    bound: float
    stderr: float
    passed: bool
    vacuous: bool


class DkwReport(LabModel):
    spec_label: str
    reps: int
    checks: tuple[DkwCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)


def check_study(n_grid: Sequence[int], reps: int) -> tuple[int, ...]:
    grid = tuple(int(n) for n in n_grid)
    if not grid or grid[0] < 1 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidInputError(f"n_grid must be ascending positive integers, got {list(n_grid)}")
    if reps < 1:
        raise InvalidInputError(f"reps must be positive, got {reps}")
    return grid


def convergence_study(
    spec: ProcessSpec,
    n_grid: Sequence[int],
    reps: int,
    seed: int,
    workers: int = 1,
) -> ConvergenceStudy:
    """sup|F_n - F| over nested prefixes of `reps` independent paths.

    Replication r draws one path of length max(n_grid) from stream r, so the
    table is the same for any number of workers.
    """
    grid = check_study(n_grid, reps)
    law = marginal_law(spec)

    def replicate(r: int) -> list[float]:
        values = generate(spec, grid[-1], seed, stream=r).array
        return [sup_deviation(values[:n], law) for n in grid]

    log.info(f"convergence study of {spec.label}: n_grid={list(grid)}, reps={reps}")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        table = np.array(list(pool.map(replicate, range(reps)))).T

    summary = tuple(
        StudyRow(
            n=n,
            mean=float(row.mean()),
            median=float(np.median(row)),
            max=float(row.max()),
            q10=float(np.quantile(row, 0.1)),
            q90=float(np.quantile(row, 0.9)),
        )
        for n, row in zip(grid, table)
    )
    means = np.array([row.mean for row in summary])
    fit = None
    if len(grid) >= 2 and np.all(means > 0.0):
        line = loglog_fit(grid, means)
        fit = StudyFit(C=math.exp(line.intercept), b=-line.slope, r_squared=line.r_squared)
        log.info(f"{spec.label}: mean deviation ~ {fit.C:.4g} n^-{fit.b:.4f} (R^2={fit.r_squared:.4f})")
    else:
        log.info(f"{spec.label}: no decay fit (mean deviation vanishes or single n)")
    return ConvergenceStudy(
        spec_label=spec.label,
        spec_kind=spec.kind,
        seed=seed,
        n_grid=grid,
        reps=reps,
        deviations=tuple(tuple(row.tolist()) for row in table),
        summary=summary,
        fit=fit,
    )


def dkw_tail_check(study: ConvergenceStudy, epsilons: Sequence[float] = DKW_EPSILONS) -> DkwReport:
    """Compares exceedance frequencies with 2 exp(-2 n eps^2) plus 3 binomial standard errors."""
    if study.spec_kind != "iid":
        raise InvalidInputError(f"the DKW bound holds for iid samples only, got a {study.spec_kind} study")
    checks = []
    for n, row in zip(study.n_grid, study.deviations):
        deviations = np.asarray(row)
        for epsilon in epsilons:
            bound = 2.0 * math.exp(-2.0 * n * epsilon**2)
            p = min(bound, 1.0)
            stderr = math.sqrt(p * (1.0 - p) / study.reps)
            observed = float(np.mean(deviations > epsilon))
            checks.append(
                DkwCheck(
                    n=n,
                    epsilon=epsilon,
                    observed=observed,
                    bound=bound,
                    stderr=stderr,
                    passed=bound >= 1.0 or observed <= bound + 3.0 * stderr,
                    vacuous=bound >= 1.0,
                )
            )
    report = DkwReport(spec_label=study.spec_label, reps=study.reps, checks=tuple(checks))
    if not report.passed:
        log.warning(f"DKW tail check failed for {study.spec_label}")
    return report
