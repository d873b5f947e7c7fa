from gclab.labcli.config import ExperimentConfig, Task, TaskParams, load_config, parse_config
from gclab.labcli.report import render
from gclab.labcli.runner import RunRecord, run

__all__ = [
    "ExperimentConfig",
    "RunRecord",
    "Task",
    "TaskParams",
    "load_config",
    "parse_config",
    "render",
    "run",
]
