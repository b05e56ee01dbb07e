"""Synthetic coincidence data: expected rates, Poisson draws and angle sweeps."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from plasmoncoherence import (
    DEFAULT_ACCIDENTAL_RATE,
    DEFAULT_ALPHA_STEP,
    DEFAULT_BETA_LIST,
    DEFAULT_CHSH_ANGLES,
    DEFAULT_INTEGRATION_TIME,
    DEFAULT_PAIR_RATE,
    DEFAULT_SEED,
    Scenario,
)

from .errors import ChannelError, ConfigError
from .state import ChannelParams, PolarizerPair, coincidence_probability

if TYPE_CHECKING:
    from collections.abc import Sequence

    from .config import ExperimentConfig

LOGGER = logging.getLogger(__name__)

MAX_SEED = 2**64 - 1
ORTHOGONAL_DEG = 90.0
FULL_TURN_DEG = 360.0


@dataclass(frozen=True)
class SourceParams:
    """Pair source, detection and acquisition settings."""

    pair_rate: float = DEFAULT_PAIR_RATE
    integration_time: float = DEFAULT_INTEGRATION_TIME
    channel_survival: float = 1.0
    accidental_rate: float = DEFAULT_ACCIDENTAL_RATE
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        """Check the source parameters."""
        if not self.pair_rate > 0:
            raise ChannelError(f"pair_rate must be > 0, not {self.pair_rate}")
        if not self.integration_time > 0:
            raise ChannelError(
                f"integration_time must be > 0, not {self.integration_time}",
            )
        if not 0 < self.channel_survival <= 1:
            raise ChannelError(
                f"channel_survival must be in (0, 1], not {self.channel_survival}",
            )
        if not self.accidental_rate >= 0:
            raise ChannelError(
                f"accidental_rate must be >= 0, not {self.accidental_rate}",
            )
        if not 0 <= self.seed <= MAX_SEED:
            raise ChannelError(f"seed must be a 64-bit unsigned integer, not {self.seed}")


@dataclass(frozen=True)
class CountRecord:
    """Coincidences observed at one polarizer setting (angles in degrees)."""

    alpha: float
    beta: float
    integration_time: float
    counts: int

    def __post_init__(self) -> None:
        """Angles and time are finite, counts are non-negative and time is positive."""
        values = (self.alpha, self.beta, self.integration_time)
        if not all(math.isfinite(x) for x in values):
            raise ChannelError(
                f"alpha, beta and time must be finite, not "
                f"({self.alpha}, {self.beta}, {self.integration_time})",
            )
        if self.counts < 0:
            raise ChannelError(f"counts must be >= 0, not {self.counts}")
        if not self.integration_time > 0:
            raise ChannelError(
                f"integration_time must be > 0, not {self.integration_time}",
            )

    @property
    def setting(self) -> PolarizerPair:
        """The polarizer pair of this record."""
        return PolarizerPair.from_degrees(self.alpha, self.beta)


@dataclass(frozen=True)
class ScenarioPreset:
    """Channel and source values a scenario starts from."""

    env_overlap: complex
    channel_survival: float = 1.0
    integration_time: float = DEFAULT_INTEGRATION_TIME


SCENARIO_PRESETS: dict[Scenario, ScenarioPreset] = {
    # Source alone, no plasmonic sample in the path
    Scenario.CALIBRATION: ScenarioPreset(env_overlap=0.99),
    # Photon-like plasmons on a gold/air array
    Scenario.HOLEARRAY_AIR: ScenarioPreset(env_overlap=0.99, channel_survival=0.05),
    # Highly dispersive gold/a-Si array, intrinsically low transmission
    Scenario.HOLEARRAY_SILICON: ScenarioPreset(
        env_overlap=0.98,
        channel_survival=0.01,
        integration_time=25.0,
    ),
    Scenario.CUSTOM: ScenarioPreset(env_overlap=1.0),
}


def expected_count(source: SourceParams, p_cc: float) -> float:
    """Mean coincidences: signal pairs surviving the channel plus accidentals."""
    if not 0.0 <= p_cc <= 1.0:
        raise ChannelError(f"Coincidence probability must be in [0, 1], not {p_cc}")
    return (
        source.pair_rate * source.channel_survival * source.integration_time * p_cc
        + source.accidental_rate * source.integration_time
    )


def setting_rng(seed: int, index: int) -> np.random.Generator:
    """Independent generator for setting `index`, a pure function of (seed, index)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def sample_counts(
    source: SourceParams,
    settings: Sequence[PolarizerPair],
    channel: ChannelParams,
    delta_phi_c: float,
    max_workers: int | None = None,
) -> list[CountRecord]:
    """
    Draw Poisson coincidence counts for every setting.

    Each setting draws from its own substream, so the output does not depend on
    evaluation order or on how many worker threads are used.
    """
    if not settings:
        raise ChannelError("At least one polarizer setting is required")

    def draw(item: tuple[int, PolarizerPair]) -> CountRecord:
        index, setting = item
        mu = expected_count(
            source,
            coincidence_probability(channel, delta_phi_c, setting),
        )
        counts = int(setting_rng(source.seed, index).poisson(mu))
        alpha_deg, beta_deg = setting.degrees
        return CountRecord(
            alpha=round(alpha_deg, 9),
            beta=round(beta_deg, 9),
            integration_time=source.integration_time,
            counts=counts,
        )

    items = list(enumerate(settings))
    if max_workers is None or max_workers <= 1:
        records = [draw(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            records = list(pool.map(draw, items))
    LOGGER.debug("Sampled %d settings with seed %d", len(records), source.seed)
    return records


def standard_sweep(
    beta_list: Sequence[float] = DEFAULT_BETA_LIST,
    alpha_step: float = DEFAULT_ALPHA_STEP,
) -> list[PolarizerPair]:
    """For each fixed beta, alpha over [0, 360) degrees in `alpha_step` increments."""
    if not alpha_step > 0:
        raise ChannelError(f"alpha_step must be > 0, not {alpha_step}")
    n_alpha = math.ceil(FULL_TURN_DEG / alpha_step - 1e-9)
    return [
        PolarizerPair.from_degrees(i * alpha_step, beta)
        for beta in beta_list
        for i in range(n_alpha)
    ]


def chsh_settings(
    angles: Sequence[float] = DEFAULT_CHSH_ANGLES,
) -> list[PolarizerPair]:
    """The 16 CHSH settings: every (a, b) pair and its orthogonal complements."""
    a1, a2, b1, b2 = angles
    settings = []
    for a in (a1, a2):
        for b in (b1, b2):
            settings.extend(
                PolarizerPair.from_degrees(alpha, beta)
                for alpha, beta in (
                    (a, b),
                    (a + ORTHOGONAL_DEG, b),
                    (a, b + ORTHOGONAL_DEG),
                    (a + ORTHOGONAL_DEG, b + ORTHOGONAL_DEG),
                )
            )
    return settings


def run_scenario(
    scenario_name: str,
    config: ExperimentConfig,
    max_workers: int | None = None,
) -> tuple[list[PolarizerPair], list[CountRecord]]:
    """
    Simulate the standard fringe sweep plus the CHSH settings of a scenario.

    The configuration is re-resolved for `scenario_name`, so preset values apply
    wherever the configuration file left a value unset.
    """
    try:
        scenario = Scenario(scenario_name)
    except ValueError:
        known = ", ".join(s.value for s in Scenario)
        raise ConfigError(
            f"Unknown scenario {scenario_name!r}; expected one of {known}",
        ) from None
    if scenario != config.scenario:
        config = config.for_scenario(scenario)

    settings = standard_sweep(config.beta_list, config.alpha_step) + chsh_settings(
        config.chsh_angles,
    )
    LOGGER.info(
        "Running scenario %s: %d settings, env_overlap=%s, survival=%s",
        scenario,
        len(settings),
        config.channel.env_overlap,
        config.source.channel_survival,
    )
    records = sample_counts(
        config.source,
        settings,
        config.channel,
        config.delta_phi_c,
        max_workers=max_workers,
    )
    return settings, records
