import json
import logging
import os
from contextlib import contextmanager

import anyio
import asyncclick as click
from dotenv import load_dotenv

from gclab import __version__
from gclab.errors import category_for, exit_code_for
from gclab.labcli import report as report_module
from gclab.labcli import runner
from gclab.labcli.config import load_config

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(filename)s:%(lineno)d - %(message)s"


@contextmanager
def exit_on_error():
    """Turns failures into one JSON line on stderr and the category's exit status."""
    try:
        yield
    except (click.exceptions.Exit, click.exceptions.Abort, SystemExit):
        raise
    except Exception as e:
        category = category_for(e)
        log.error(f"{category}: {e}")
        click.echo(json.dumps({"error": category, "message": str(e)}), err=True)
        raise SystemExit(exit_code_for(e)) from e


@click.group()
@click.version_option(__version__, prog_name="gclab")
@click.option("--log-level", default=None, help="Logging level; defaults to GCLAB_LOG_LEVEL or INFO.")
def cli(log_level: str | None) -> None:
    """Glivenko-Cantelli verification lab for mixing sequences."""
    load_dotenv()
    level = (log_level or os.environ.get("GCLAB_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=level, format=LOG_FORMAT)


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--output-root", default=None, help="Overrides GCLAB_OUTPUT_ROOT.")
async def run(config_path: str, output_root: str | None) -> None:
    """Run the experiment described by CONFIG_PATH."""
    with exit_on_error():
        config = load_config(config_path)
        record = await anyio.to_thread.run_sync(runner.run, config, output_root)
        run_dir = runner.run_dir_for(config, output_root)
        click.echo(json.dumps({"experiment_id": record.experiment_id, "run_dir": str(run_dir), "artifacts": len(record.manifest)}))


@cli.command()
@click.argument("run_dir", type=click.Path(file_okay=False))
def report(run_dir: str) -> None:
    """Summarize the run stored in RUN_DIR."""
    with exit_on_error():
        click.echo(report_module.render(run_dir))


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
def validate(config_path: str) -> None:
    """Check CONFIG_PATH without running it."""
    with exit_on_error():
        config = load_config(config_path)
        runner.preflight(config)
        click.echo(json.dumps({"experiment_id": config.experiment_id, "task": config.task, "valid": True}))


def main() -> None:
    cli()
