# Why does this file exist, and why not put this in `__main__`?
#
# You might be tempted to import things from `__main__` later,
# but that will cause problems: the code will get executed twice:
#
# - When you run `python -m plasmoncoherence` python will execute
#   `__main__.py` as a script. That means there won't be any
#   `plasmoncoherence.__main__` in `sys.modules`.
# - When you import `__main__` it will get executed again (as a module) because
#   there's no `plasmoncoherence.__main__` in `sys.modules`.
"""Module that contains the command line application."""

from __future__ import annotations

import argparse
import logging

from plasmoncoherence import Scenario

from .argparser import build_parser
from .commands import Analyze, Command, Dispersion, Simulate
from .config import ExperimentConfig, default_config, load_config
from .errors import ExitCode, PlasmonCoherenceError

LOGGER = logging.getLogger(__name__)


def get_parser() -> argparse.ArgumentParser:
    """
    Return the CLI argument parser.

    Returns:
        An argparse parser.
    """
    return build_parser()


def configure_logging(level: str) -> None:
    """Send log records to stderr at `level`."""
    logging.basicConfig(
        level=level.upper(),
        format="%(asctime)s [%(levelname)s] %(name)s - %(message)s",
    )


def resolve_config(opts: argparse.Namespace) -> ExperimentConfig:
    """Load the configuration and apply command-line overrides."""
    config = load_config(opts.config) if opts.config else default_config()
    scenario = getattr(opts, "scenario", None)
    if scenario is not None and scenario != config.scenario:
        config = config.for_scenario(Scenario(scenario))
    if opts.seed is not None:
        config = config.with_seed(opts.seed)
    return config


def make_command(opts: argparse.Namespace, config: ExperimentConfig) -> Command:
    """Instantiate the command selected on the command line."""
    if opts.command == "simulate":
        return Simulate(config, opts.out, workers=opts.workers)
    if opts.command == "analyze":
        return Analyze(config, opts.counts, opts.out)
    return Dispersion(config, opts.out, spectrum_path=opts.spectrum)


def main(args: list[str] | None = None) -> int:
    """
    Run the main program.

    This function is executed when you type `plasmoncoherence` or
    `python -m plasmoncoherence`.

    Arguments:
        args: Arguments passed from the command line.

    Returns:
        An exit code.
    """
    parser = get_parser()
    opts = parser.parse_args(args=args)
    configure_logging(opts.log)
    try:
        config = resolve_config(opts)
        written = make_command(opts, config).run()
    except PlasmonCoherenceError as e:
        LOGGER.error("%s (%s)", e, ExitCode.get_exit_code_name(e.exit_code))  # noqa: TRY400
        return e.exit_code
    except OSError as e:
        LOGGER.error("%s", e)  # noqa: TRY400
        return ExitCode.DATA_ERROR
    for path in written:
        LOGGER.info("Output: %s", path)
    return ExitCode.SUCCESS
