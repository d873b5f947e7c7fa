"""Experiment documents: one JSON object per experiment."""

import json
import logging
from enum import StrEnum
from pathlib import Path
from typing import Annotated

from pydantic import Field, model_validator

from gclab.errors import ConfigError
from gclab.gcip.conditions import GcipMode
from gclab.gcip.sources import CovarianceSequence
from gclab.mixing.profile import MixingKind
from gclab.procgen.spec import ProcessSpec
from gclab.utils.typing import LabModel, PositiveInt, Seed

log = logging.getLogger(__name__)


class Task(StrEnum):
    GENERATE = "GENERATE"
    MIXING_PROFILE = "MIXING_PROFILE"
    COVCHECK_SWEEP = "COVCHECK_SWEEP"
    GCIP_SCAN = "GCIP_SCAN"
    KS_STUDY = "KS_STUDY"
    ENTROPY = "ENTROPY"
    GC_VERDICT = "GC_VERDICT"


SPEC_TASKS = {Task.GENERATE, Task.MIXING_PROFILE, Task.KS_STUDY, Task.ENTROPY, Task.GC_VERDICT}
COVARIANCE_TASKS = {Task.GCIP_SCAN, Task.GC_VERDICT}


class TaskParams(LabModel):
    """Parameters of every task, with their defaults.

    Each task reads only the fields it needs; the owning module validates them.
    """

    n: PositiveInt = 1000
    delta: float = 1.0
    threshold_deltas: tuple[float, ...] = (1.0 / 3.0, 0.5)
    q_max: Annotated[int, Field(ge=2)] = 128
    x_grid: tuple[float, ...] | None = None
    mode: GcipMode | None = None
    partial_blocks: bool = False
    n_grid: tuple[PositiveInt, ...] = (100, 316, 1000, 3162, 10000)
    reps: PositiveInt = 200
    epsilons: tuple[float, ...] = (0.5, 0.1)
    lags: tuple[PositiveInt, ...] = tuple(range(1, 11))
    kinds: tuple[MixingKind, ...] = (MixingKind.ALPHA, MixingKind.BETA)
    x: float | None = None
    path_length: PositiveInt = 10_000
    sweep_models: PositiveInt = 1000
    sweep_lags: tuple[PositiveInt, ...] = (1, 2, 3, 4, 5)
    universe: tuple[float, ...] | None = None
    max_n: PositiveInt = 6
    K: float = 1.0
    r: float = 2.0


class ExperimentConfig(LabModel):
    experiment_id: Annotated[str, Field(min_length=1, pattern=r"^[A-Za-z0-9._-]+$")]
    spec: ProcessSpec | None = None
    covariance: CovarianceSequence | None = None
    task: Task
    params: TaskParams = TaskParams()
    seed: Seed
    output_dir: str | None = None

    @model_validator(mode="after")
    def _sources(self) -> "ExperimentConfig":
        if self.covariance is not None and self.task not in COVARIANCE_TASKS:
            raise ValueError(f"an injected covariance sequence is not used by task {self.task}")
        if self.task in SPEC_TASKS and self.spec is None:
            raise ValueError(f"task {self.task} needs a process spec")
        if self.task is Task.GCIP_SCAN and self.spec is None and self.covariance is None:
            raise ValueError("GCIP_SCAN needs a process spec or a covariance sequence")
        return self


def parse_config(text: str) -> ExperimentConfig:
    """Parses an experiment document.

    Malformed JSON raises ConfigError; a well-formed document that breaks a
    field rule raises a pydantic ValidationError.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.model_validate(document)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    config = parse_config(text)
    log.info(f"Loaded experiment {config.experiment_id} ({config.task}) from {path}")
    return config
