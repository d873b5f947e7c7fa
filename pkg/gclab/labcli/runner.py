"""Executes one experiment and persists its artifacts with a run record."""

import logging
import os
from collections.abc import Callable
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from gclab import __version__
from gclab.covcheck.sweep import sweep
from gclab.empirical.study import check_study, convergence_study, dkw_tail_check
from gclab.entropy.brackets import bracket_halflines, check_epsilon, verify_cover
from gclab.entropy.vc import check_max_n, closed_intervals, halflines, vc_index, verify_vc_report
from gclab.entropy.verdict import check_bound_constants, gc_verdict
from gclab.gcip.conditions import check_delta, resolve_mode
from gclab.gcip.scan import GcipParams, gcip_scan, implication_check
from gclab.labcli.config import ExperimentConfig, Task
from gclab.mixing.profile import MixingKind, check_rate_delta, estimated_profile, exact_profile, threshold_check
from gclab.procgen.generator import generate, marginal_law
from gclab.procgen.laws import DiscreteLaw
from gclab.procgen.spec import MarkovProcess
from gclab.utils.storage import canonical_digest, create_dir_if_not_exists, sha256_file, write_csv, write_json
from gclab.utils.tracing import JsonLinesSink
from gclab.utils.typing import LabModel

log = logging.getLogger(__name__)

RUN_RECORD = "run_record.json"
DEFAULT_OUTPUT_ROOT = "runs"


class ManifestEntry(LabModel):
    path: str
    sha256: str


class RunRecord(LabModel):
    experiment_id: str
    task: Task
    config_digest: str
    tool_version: str
    started_at: str
    finished_at: str
    summary: dict[str, Any]
    manifest: tuple[ManifestEntry, ...]


class _Artifacts:
    """Collects the digests of every file a task writes."""

    def __init__(self, run_dir: Path) -> None:
        self.run_dir = run_dir
        self.entries: list[ManifestEntry] = []

    def csv(self, name: str, header, rows) -> None:
        self.entries.append(ManifestEntry(path=name, sha256=write_csv(self.run_dir / name, header, rows)))

    def json(self, name: str, payload) -> None:
        self.entries.append(ManifestEntry(path=name, sha256=write_json(self.run_dir / name, payload)))

    def add(self, name: str) -> None:
        self.entries.append(ManifestEntry(path=name, sha256=sha256_file(self.run_dir / name)))


def default_workers() -> int:
    return max(1, int(os.environ.get("GCLAB_WORKERS", "1")))


def default_x_grid(config: ExperimentConfig) -> tuple[float, ...]:
    """Deciles of a continuous marginal, or points between and around the atoms of a discrete one."""
    if config.params.x_grid is not None:
        return config.params.x_grid
    if config.spec is None:
        return (0.0,)
    law = marginal_law(config.spec)
    if isinstance(law, DiscreteLaw):
        atoms = sorted(set(law.atoms))
        mids = [(a + b) / 2.0 for a, b in zip(atoms, atoms[1:])]
        return (atoms[0] - 0.5, *mids, atoms[-1] + 0.5)
    return tuple(float(law.ppf(j / 10.0)) for j in range(1, 10))


def _gcip_source(config: ExperimentConfig):
    if config.covariance is not None:
        return config.covariance
    process = config.spec.process
    return process.model if isinstance(process, MarkovProcess) else config.spec


def _gcip_params(config: ExperimentConfig, source) -> GcipParams:
    p = config.params
    return GcipParams(
        delta=p.delta,
        q_max=p.q_max,
        x_grid=default_x_grid(config),
        mode=resolve_mode(source, p.mode),
        reps=max(2, p.reps),
        seed=config.seed,
        partial_blocks=p.partial_blocks,
    )


def _gcip_report(config: ExperimentConfig, workers: int):
    source = _gcip_source(config)
    return gcip_scan(source, _gcip_params(config, source), workers=workers)


def _generate(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    path = generate(config.spec, config.params.n, config.seed)
    out.csv("path.csv", ("t", "value"), enumerate(path.values, start=1))
    return {"n": path.n, "mean": float(np.mean(path.values)), "spec": config.spec.label}


def _mixing_profile(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    p = config.params
    process = config.spec.process
    summary: dict[str, Any] = {}
    for kind in p.kinds:
        if isinstance(process, MarkovProcess):
            profile = exact_profile(process.model, p.lags, kind)
        else:
            x = p.x if p.x is not None else float(marginal_law(config.spec).ppf(0.5))
            profile = estimated_profile(
                config.spec, x, p.lags, p.reps, p.path_length, config.seed, kind=kind, workers=workers
            )
        checks = [threshold_check(profile, delta) for delta in p.threshold_deltas]
        name = kind.lower()
        out.csv(f"mixing_{name}.csv", ("lag", "value", "provenance"), profile.csv_rows())
        out.json(f"mixing_{name}.json", profile)
        out.json(f"thresholds_{name}.json", [c.model_dump(mode="json") for c in checks])
        summary[kind] = {
            "provenance": profile.provenance.source,
            "fit": profile.fit.model_dump(mode="json") if profile.fit else None,
            "thresholds": [
                {
                    "delta": c.delta,
                    "required": c.required_exponent,
                    "fitted": c.fitted_exponent,
                    "flag": c.flag,
                    "verdict": c.verdict,
                }
                for c in checks
            ],
        }
    return summary


def _covcheck_sweep(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    p = config.params
    with JsonLinesSink(out.run_dir / "certificates.jsonl", label="covcheck") as sink:
        result = sweep(p.sweep_models, config.seed, lags=p.sweep_lags, sink=sink)
    out.add("certificates.jsonl")
    out.json("sweep_summary.json", result)
    if not result.passed:
        log.error(f"covariance sweep found violations: {result.failures}")
    return {"passed": result.passed, **result.model_dump(mode="json")}


def _gcip(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    report = _gcip_report(config, workers)
    out.csv("gcip.csv", ("x", "q", "s1", "s2"), report.csv_rows())
    summary = {**report.summary(), "implication_holds": implication_check(report)}
    out.json("gcip_summary.json", summary)
    return summary


def _ks_study(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    p = config.params
    study = convergence_study(config.spec, p.n_grid, p.reps, config.seed, workers=workers)
    out.csv("ks_deviations.csv", ("n", "rep", "deviation"), study.csv_rows())
    out.csv("ks_plot.csv", ("n", "mean", "q10", "q90"), study.plot_rows())
    summary: dict[str, Any] = {
        "spec": study.spec_label,
        "fit_statistic": study.fit_statistic,
        "rows": [row.model_dump(mode="json") for row in study.summary],
        "fit": study.fit.model_dump(mode="json") if study.fit else None,
    }
    if study.spec_kind == "iid":
        dkw = dkw_tail_check(study)
        summary["dkw_passed"] = dkw.passed
        out.json("dkw.json", dkw)
    out.json("ks_summary.json", summary)
    return summary


def _universe(config: ExperimentConfig) -> tuple[float, ...]:
    return config.params.universe or tuple(float(i) for i in range(1, 21))


def _entropy(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    p = config.params
    law = marginal_law(config.spec)
    covers, summary = [], {"brackets": [], "vc": {}}
    for epsilon in p.epsilons:
        for metric in ("L2_P", "ABS"):
            cover = bracket_halflines(law, epsilon, metric)
            check = verify_cover(cover, law)
            covers.append(cover.model_dump(mode="json"))
            summary["brackets"].append(
                {"epsilon": epsilon, "metric": metric, "count": cover.count, "verified": check.passed}
            )
    out.json("brackets.json", covers)
    reports = []
    for set_class in (halflines(_universe(config)), closed_intervals(_universe(config))):
        report = vc_index(set_class, p.max_n)
        reports.append(report.model_dump(mode="json"))
        summary["vc"][set_class.class_id] = {
            "index": report.index,
            "not_found_up_to": report.not_found_up_to,
            "verified": verify_vc_report(report, set_class),
        }
    out.json("vc.json", reports)
    return summary


def _gc_verdict(config: ExperimentConfig, out: _Artifacts, workers: int) -> dict:
    p = config.params
    law = marginal_law(config.spec)
    covers = [bracket_halflines(law, epsilon) for epsilon in p.epsilons]
    report = _gcip_report(config, workers)
    vc_report = vc_index(halflines(_universe(config)), p.max_n)
    verdict = gc_verdict(covers, report, vc_report, K=p.K, r=p.r, law=law)
    out.csv("gcip.csv", ("x", "q", "s1", "s2"), report.csv_rows())
    out.json("verdict.json", verdict)
    return verdict.model_dump(mode="json")


TASKS: dict[Task, Callable[[ExperimentConfig, _Artifacts, int], dict]] = {
    Task.GENERATE: _generate,
    Task.MIXING_PROFILE: _mixing_profile,
    Task.COVCHECK_SWEEP: _covcheck_sweep,
    Task.GCIP_SCAN: _gcip,
    Task.KS_STUDY: _ks_study,
    Task.ENTROPY: _entropy,
    Task.GC_VERDICT: _gc_verdict,
}


def preflight(config: ExperimentConfig) -> None:
    """Validates the parameters the task will use with their owning modules.

    Nothing is written before this passes, and `validate` runs the same checks.
    """
    p = config.params
    task = config.task
    if task is Task.MIXING_PROFILE:
        for delta in p.threshold_deltas:
            check_rate_delta(delta)
    if task in (Task.GCIP_SCAN, Task.GC_VERDICT):
        check_delta(p.delta)
        _gcip_params(config, _gcip_source(config))
    if task is Task.KS_STUDY:
        check_study(p.n_grid, p.reps)
    if task in (Task.ENTROPY, Task.GC_VERDICT):
        for epsilon in p.epsilons:
            check_epsilon(epsilon)
        check_max_n(p.max_n)
        halflines(_universe(config))
    if task is Task.GC_VERDICT:
        check_bound_constants(p.K, p.r)


def run_dir_for(config: ExperimentConfig, output_root: str | Path | None = None) -> Path:
    root = config.output_dir or output_root or os.environ.get("GCLAB_OUTPUT_ROOT", DEFAULT_OUTPUT_ROOT)
    return Path(root) / config.experiment_id


def run(config: ExperimentConfig, output_root: str | Path | None = None, workers: int | None = None) -> RunRecord:
    """Runs the configured task and writes its artifacts plus run_record.json."""
    workers = workers or default_workers()
    preflight(config)
    started = datetime.now(timezone.utc)
    run_dir = create_dir_if_not_exists(run_dir_for(config, output_root))
    log.info(f"Running {config.task} for experiment {config.experiment_id} in {run_dir}")
    artifacts = _Artifacts(run_dir)
    summary = TASKS[config.task](config, artifacts, workers)
    record = RunRecord(
        experiment_id=config.experiment_id,
        task=config.task,
        config_digest=canonical_digest(config),
        tool_version=__version__,
        started_at=started.isoformat(),
        finished_at=datetime.now(timezone.utc).isoformat(),
        summary=summary,
        manifest=tuple(artifacts.entries),
    )
    write_json(run_dir / RUN_RECORD, record)
    log.info(f"Finished {config.task} for {config.experiment_id}: {len(record.manifest)} artifacts")
    return record
