"""Summary documents written by the commands, with provenance."""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

from plasmoncoherence import __version__

if TYPE_CHECKING:
    from .config import ExperimentConfig
    from .dispersion import SppPoint, Timescales
    from .estimation import Analysis, DephasingBound

LOGGER = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 6


def rounded(value: Any) -> Any:
    """
    Round every float in a nested structure to six significant digits.

    Non-finite floats become the strings "inf", "-inf" and "nan", which strict JSON
    parsers accept.
    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            return str(value)
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {str(k): rounded(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [rounded(v) for v in value]
    return value


def file_sha256(path: str | Path) -> str:
    """Hex SHA-256 of a file's bytes."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def angle_key(angle: float) -> str:
    """Degrees as a compact JSON key, e.g. '45' or '22.5'."""
    return f"{angle:g}"


@dataclass(frozen=True)
class SummaryReport:
    """Estimates of one count data set, and where they came from."""

    scenario: str
    v: float
    sigma_v: float
    s: float
    sigma_s: float
    bell_violation: bool
    t2star_bound_fs: float | None
    t2star_order_of_magnitude_fs: float | None
    timescales: dict[str, float] | None
    visibilities: dict[str, dict[str, float]]
    redundancy: dict[str, Any] | None
    chsh: dict[str, Any]
    version: str
    config_hash: str
    seed: int
    counts_file: str
    counts_sha256: str

    def to_dict(self) -> dict[str, Any]:
        """Plain-data form with statistics rounded to six significant digits."""
        return rounded(asdict(self))


def timescales_dict(timescales: Timescales | None) -> dict[str, float] | None:
    """Timescales keyed with their units."""
    if timescales is None:
        return None
    return {
        "t_p_fs": timescales.t_p,
        "t1_fs": timescales.t1,
        "t2_fs": timescales.t2,
    }


def build_summary(
    config: ExperimentConfig,
    analysis: Analysis,
    counts_path: str | Path,
    timescales: Timescales | None,
    bound: DephasingBound | None,
) -> SummaryReport:
    """Collect the estimates of `analysis` into a report tied to its inputs."""
    chsh = analysis.chsh
    redundancy = analysis.redundancy
    return SummaryReport(
        scenario=str(config.scenario),
        v=analysis.primary.v,
        sigma_v=analysis.primary.sigma_v,
        s=chsh.s,
        sigma_s=chsh.sigma_s,
        bell_violation=chsh.bell_violation,
        t2star_bound_fs=bound.model_bound_fs if bound else None,
        t2star_order_of_magnitude_fs=bound.order_of_magnitude_fs if bound else None,
        timescales=timescales_dict(timescales),
        visibilities={
            angle_key(beta): {"v": est.v, "sigma_v": est.sigma_v}
            for beta, est in sorted(analysis.visibilities.items())
        },
        redundancy=(
            {
                "difference": redundancy.difference,
                "combined_sigma": redundancy.combined_sigma,
                "consistent": redundancy.consistent,
            }
            if redundancy
            else None
        ),
        chsh={
            "angles_deg": list(chsh.angles),
            "e_values": list(chsh.e_values),
            "sigma_e": list(chsh.sigma_e),
            "k": chsh.k,
        },
        version=__version__,
        config_hash=config.config_hash(),
        seed=config.seed,
        counts_file=Path(counts_path).name,
        counts_sha256=file_sha256(counts_path),
    )


def interface_dict(point: SppPoint) -> dict[str, float]:
    """One interface of the dispersion report."""
    return {
        "energy_ev": point.energy,
        "k_re_rad_per_um": point.k.real,
        "k_im_rad_per_um": point.k.imag,
        "v_g_c": point.v_g,
        "l_prop_um": point.l_prop,
    }


def write_json(path: str | Path, data: dict[str, Any]) -> Path:
    """Write sorted, indented, strictly valid JSON."""
    path = Path(path)
    text = json.dumps(rounded(data), sort_keys=True, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    LOGGER.info("Wrote %s", path)
    return path


def write_summary(path: str | Path, report: SummaryReport) -> Path:
    """Write the summary document."""
    return write_json(path, report.to_dict())
