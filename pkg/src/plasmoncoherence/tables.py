"""
CSV codecs for the files the tool reads and writes.

Every table has a fixed header that must match exactly. Floats are written with six
significant digits; counts are written as integers.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from .counting import CountRecord
from .errors import ChannelError, SchemaError

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from .dispersion import BandPoint, Resonance
    from .estimation import FringeFit

LOGGER = logging.getLogger(__name__)

COUNTS_HEADER = ("alpha_deg", "beta_deg", "time_s", "counts")
OPTICAL_CONSTANTS_HEADER = ("wavelength_nm", "n", "k")
FRINGES_HEADER = ("beta_deg", "alpha_deg", "model_counts")
BAND_HEADER = ("energy_ev", "k_folded_rad_per_um", "branch", "light_line_rad_per_um")
RESONANCES_HEADER = ("order_i", "order_j", "wavelength_nm")
SPECTRUM_HEADER = ("wavelength_nm", "transmission")

FRINGE_CURVE_STEP_DEG = 1.0


def format_float(value: float) -> str:
    """Six significant digits, no trailing noise."""
    return f"{value:.6g}"


def _read_rows(
    path: str | Path,
    header: Sequence[str],
) -> list[tuple[int, list[str]]]:
    """Rows after an exactly matching header, with their 1-based line numbers."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            found = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: file is empty") from None
        if tuple(found) != tuple(header):
            raise SchemaError(
                f"{path}:1: expected header {','.join(header)!r}, "
                f"found {','.join(found)!r}",
            )
        rows = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(header):
                raise SchemaError(
                    f"{path}:{reader.line_num}: expected {len(header)} fields, "
                    f"found {len(row)}",
                )
            rows.append((reader.line_num, row))
    return rows


def _write_rows(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence[str]],
) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    LOGGER.debug("Wrote %s", path)
    return path


def read_counts(path: str | Path) -> list[CountRecord]:
    """Load count records from `alpha_deg,beta_deg,time_s,counts`."""
    records = []
    for line, (alpha, beta, time, counts) in _read_rows(path, COUNTS_HEADER):
        try:
            records.append(
                CountRecord(
                    alpha=float(alpha),
                    beta=float(beta),
                    integration_time=float(time),
                    counts=int(counts),
                ),
            )
        except (ValueError, ChannelError) as e:
            raise SchemaError(f"{path}:{line}: {e}") from e
    LOGGER.info("Read %d count records from %s", len(records), path)
    return records


def write_counts(path: str | Path, records: Sequence[CountRecord]) -> Path:
    """Write count records, one row per setting."""
    return _write_rows(
        path,
        COUNTS_HEADER,
        (
            (
                format_float(r.alpha),
                format_float(r.beta),
                format_float(r.integration_time),
                str(r.counts),
            )
            for r in records
        ),
    )


def read_optical_constants(path: str | Path) -> list[tuple[float, float, float]]:
    """Load (wavelength nm, n, k) rows."""
    rows = []
    for line, fields in _read_rows(path, OPTICAL_CONSTANTS_HEADER):
        try:
            wavelength, n, k = (float(x) for x in fields)
        except ValueError as e:
            raise SchemaError(f"{path}:{line}: {e}") from e
        rows.append((wavelength, n, k))
    return rows


def read_spectrum(path: str | Path) -> list[tuple[float, float]]:
    """Load a transmission spectrum as (wavelength nm, transmission) pairs."""
    rows = []
    for line, fields in _read_rows(path, SPECTRUM_HEADER):
        try:
            wavelength, transmission = (float(x) for x in fields)
        except ValueError as e:
            raise SchemaError(f"{path}:{line}: {e}") from e
        rows.append((wavelength, transmission))
    return rows


def write_fringes(
    path: str | Path,
    fits: Sequence[FringeFit],
    step: float = FRINGE_CURVE_STEP_DEG,
) -> Path:
    """Fitted fringe curves for plotting, alpha over [0, 360) per beta."""
    alphas = np.arange(0.0, 360.0, step)
    return _write_rows(
        path,
        FRINGES_HEADER,
        (
            (format_float(fit.beta), format_float(alpha), format_float(model))
            for fit in fits
            for alpha, model in zip(alphas, fit.model(alphas), strict=True)
        ),
    )


def write_band_structure(path: str | Path, points: Sequence[BandPoint]) -> Path:
    """Folded SPP branches, one row per (energy, branch)."""
    return _write_rows(
        path,
        BAND_HEADER,
        (
            (
                format_float(point.energy),
                format_float(k_folded),
                str(branch),
                format_float(point.light_line),
            )
            for point in points
            for branch, k_folded in point.branches
        ),
    )


def write_resonances(path: str | Path, resonances: Sequence[Resonance]) -> Path:
    """EOT orders and the wavelengths where they resonate."""
    return _write_rows(
        path,
        RESONANCES_HEADER,
        (
            (str(r.order[0]), str(r.order[1]), format_float(r.wavelength))
            for r in resonances
        ),
    )
