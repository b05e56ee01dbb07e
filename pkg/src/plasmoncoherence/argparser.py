"""
Common set of arguments for the subcommands. Used by the CLI and by the tests, so
factored out.
"""

import argparse

from plasmoncoherence import DEFAULT_LOGGING, Scenario

DEFAULT_CONFIG = None
DEFAULT_OUT_DIR = "."
DEFAULT_WORKERS = 1


def auto_int(x: str) -> int:
    """Convert a string to an int, with support for hex and octal strings."""
    return int(x, 0)


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Options every subcommand takes."""
    parser.add_argument(
        "-c",
        "--config",
        default=DEFAULT_CONFIG,
        help="JSON experiment configuration; defaults apply when omitted",
    )
    parser.add_argument(
        "-s",
        "--seed",
        type=auto_int,
        default=None,
        help="Override the configuration's 64-bit random seed",
    )
    parser.add_argument(
        "-o",
        "--out",
        default=DEFAULT_OUT_DIR,
        help="Directory to write outputs to",
    )
    parser.add_argument("-l", "--log", default=DEFAULT_LOGGING, help="Logging level")


def build_parser() -> argparse.ArgumentParser:
    """Parser with the simulate, analyze and dispersion subcommands."""
    parser = argparse.ArgumentParser(
        prog="plasmoncoherence",
        description="Simulate and analyze entangled photons crossing a plasmonic channel.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser(
        "simulate",
        help="Simulate a scenario's coincidence counts and analyze them",
    )
    add_common_arguments(simulate)
    simulate.add_argument(
        "--scenario",
        choices=[s.value for s in Scenario],
        default=None,
        help="Override the configuration's scenario",
    )
    simulate.add_argument(
        "-w",
        "--workers",
        type=int,
        default=DEFAULT_WORKERS,
        help="Threads used to draw counts; results do not depend on it",
    )

    analyze = subparsers.add_parser("analyze", help="Analyze a counts CSV file")
    add_common_arguments(analyze)
    analyze.add_argument(
        "counts",
        help="Counts file with columns alpha_deg,beta_deg,time_s,counts",
    )

    dispersion = subparsers.add_parser(
        "dispersion",
        help="Band structure, EOT resonances and timescales",
    )
    add_common_arguments(dispersion)
    dispersion.add_argument(
        "--spectrum",
        default=None,
        help="Transmission spectrum (wavelength_nm,transmission) for a lifetime fit",
    )
    return parser
