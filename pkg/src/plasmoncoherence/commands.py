"""The commands behind the CLI subcommands."""

from __future__ import annotations

import abc
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any

from plasmoncoherence import __version__

from .config import DIELECTRICS
from .counting import run_scenario
from .dispersion import (
    Timescales,
    band_structure,
    eot_resonances,
    group_velocity,
    spp_point,
    timescales,
)
from .errors import NoBoundError
from .estimation import analyze, dephasing_bound, fit_lorentzian
from .report import (
    build_summary,
    interface_dict,
    rounded,
    timescales_dict,
    write_json,
    write_summary,
)
from .tables import (
    read_counts,
    read_spectrum,
    write_band_structure,
    write_counts,
    write_fringes,
    write_resonances,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .config import ExperimentConfig
    from .counting import CountRecord
    from .estimation import DephasingBound, VisibilityEstimate
    from .report import SummaryReport

LOGGER = logging.getLogger(__name__)

COUNTS_FILE = "counts.csv"
FRINGES_FILE = "fringes.csv"
SUMMARY_FILE = "summary.json"
BAND_FILE = "band_structure.csv"
RESONANCES_FILE = "eot_resonances.csv"
TIMESCALES_FILE = "timescales.json"


class Command(abc.ABC):
    """Abstract base class for commands."""

    config: ExperimentConfig
    out_dir: Path

    def __init__(self, config: ExperimentConfig, out_dir: str | Path) -> None:
        """Remember the configuration and where outputs go."""
        self.config = config
        self.out_dir = Path(out_dir)

    @abc.abstractmethod
    def run(self) -> list[Path]:
        """Execute the command and return the files it wrote."""

    def output_path(self, file_name: str) -> Path:
        """Path of an output file, creating the output directory if needed."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / file_name

    def sample_timescales(self) -> Timescales | None:
        """Timescales of the scenario's sample, or None without a sample."""
        dielectric = self.config.sample_dielectric()
        if dielectric is None:
            return None
        dispersion = self.config.dispersion
        v_g = group_velocity(
            self.config.materials.metal,
            self.config.materials.dielectric(dielectric),
            dispersion.wavelength_nm,
            dispersion.delta_nm,
        )
        return timescales(
            v_g,
            self.config.hole_array.hop_distance,
            self.config.hole_array.absorption_length_um,
        )

    def bound_for(
        self,
        visibility: VisibilityEstimate,
        sample: Timescales | None,
    ) -> DephasingBound | None:
        """Dephasing bound over the configured or derived propagation time."""
        t_p = self.config.t_p_fs
        if t_p is None and sample is not None:
            t_p = sample.t_p
        if t_p is None:
            return None
        try:
            return dephasing_bound(visibility, t_p, self.config.n_sigma)
        except NoBoundError as e:
            LOGGER.warning("%s", e)
            return None

    def summarize(
        self,
        records: Sequence[CountRecord],
        counts_path: Path,
    ) -> list[Path]:
        """Estimate everything from `records`; write the fringe curves and the summary."""
        analysis = analyze(
            records,
            self.config.beta_list,
            self.config.chsh_angles,
            self.config.bell_k,
        )
        sample = self.sample_timescales()
        report: SummaryReport = build_summary(
            self.config,
            analysis,
            counts_path,
            sample,
            self.bound_for(analysis.primary, sample),
        )
        LOGGER.info(
            "V = %.4f +- %.4f, S = %.4f +- %.4f, violation: %s",
            report.v,
            report.sigma_v,
            report.s,
            report.sigma_s,
            report.bell_violation,
        )
        return [
            write_fringes(self.output_path(FRINGES_FILE), list(analysis.fits.values())),
            write_summary(self.output_path(SUMMARY_FILE), report),
        ]


class Simulate(Command):
    """Simulate a scenario's sweep, write the counts, then analyze them."""

    def __init__(
        self,
        config: ExperimentConfig,
        out_dir: str | Path,
        workers: int | None = None,
    ) -> None:
        """Set up a simulation; `workers` threads draw the counts."""
        super().__init__(config, out_dir)
        self.workers = workers

    def run(self) -> list[Path]:
        """Write counts.csv, fringes.csv and summary.json."""
        _, records = run_scenario(self.config.scenario, self.config, self.workers)
        counts_path = write_counts(self.output_path(COUNTS_FILE), records)
        # Analyze what was written, so a later `analyze` of the file agrees exactly
        return [counts_path, *self.summarize(read_counts(counts_path), counts_path)]


class Analyze(Command):
    """Analyze an existing counts file."""

    def __init__(
        self,
        config: ExperimentConfig,
        counts_path: str | Path,
        out_dir: str | Path,
    ) -> None:
        """Set up the analysis of `counts_path`."""
        super().__init__(config, out_dir)
        self.counts_path = Path(counts_path)

    def run(self) -> list[Path]:
        """Write fringes.csv and summary.json."""
        return self.summarize(read_counts(self.counts_path), self.counts_path)


class Dispersion(Command):
    """Band structure, EOT resonances and the timescale report."""

    def __init__(
        self,
        config: ExperimentConfig,
        out_dir: str | Path,
        spectrum_path: str | Path | None = None,
    ) -> None:
        """Set up; an optional transmission spectrum adds a resonance lifetime."""
        super().__init__(config, out_dir)
        self.spectrum_path = Path(spectrum_path) if spectrum_path else None

    def run(self) -> list[Path]:
        """Write band_structure.csv, eot_resonances.csv and timescales.json."""
        config = self.config
        dispersion = config.dispersion
        spec = config.hole_array_spec()
        band = band_structure(spec, dispersion.energies())
        resonances = eot_resonances(spec, dispersion.search_range_nm)
        written = [
            write_band_structure(self.output_path(BAND_FILE), band),
            write_resonances(self.output_path(RESONANCES_FILE), resonances),
        ]
        written.append(write_json(self.output_path(TIMESCALES_FILE), self.report()))
        return written

    def report(self) -> dict[str, Any]:
        """Interfaces at the working wavelength, their ratios and the timescales."""
        config = self.config
        dispersion = config.dispersion
        points = {
            name: spp_point(
                config.materials.metal,
                config.materials.dielectric(name),
                dispersion.wavelength_nm,
                dispersion.delta_nm,
            )
            for name in DIELECTRICS
        }
        hole_array = config.hole_array
        sample = timescales(
            points[hole_array.dielectric].v_g,
            hole_array.hop_distance,
            hole_array.absorption_length_um,
        )
        report: dict[str, Any] = {
            "wavelength_nm": dispersion.wavelength_nm,
            "interfaces": {name: interface_dict(p) for name, p in points.items()},
            "wavevector_ratio_silicon_air": points["silicon"].k.real
            / points["air"].k.real,
            "group_velocity_ratio_reference_silicon": points["reference"].v_g
            / points["silicon"].v_g,
            "group_velocity_ratio_air_silicon": points["air"].v_g / points["silicon"].v_g,
            "hole_array": {
                "dielectric": hole_array.dielectric,
                "period_nm": hole_array.period_nm,
                "max_order": hole_array.max_order,
                "hop_distance_um": hole_array.hop_distance,
                "absorption_length_um": hole_array.absorption_length_um,
            },
            "timescales": timescales_dict(sample),
            "t2star_order_of_magnitude_fs": 10.0 ** round(math.log10(sample.t_p)),
            "version": __version__,
            "config_hash": config.config_hash(),
        }
        if self.spectrum_path is not None:
            fit = fit_lorentzian(read_spectrum(self.spectrum_path))
            report["lorentzian"] = {
                "center_ev": fit.center_ev,
                "gamma_ev": fit.gamma_ev,
                "lifetime_fs": fit.lifetime_fs,
            }
        LOGGER.info(
            "v_g at %s nm: air %.3f c, silicon %.3f c, reference %.3f c",
            dispersion.wavelength_nm,
            points["air"].v_g,
            points["silicon"].v_g,
            points["reference"].v_g,
        )
        return rounded(report)
