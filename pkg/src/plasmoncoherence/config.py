"""
Experiment configuration: a versioned JSON document resolved against scenario presets.

Every section is optional. Values missing from the file come from the scenario preset
(channel overlap, survival, integration time) or from the package defaults.
Validation errors name the offending key and the line it sits on.
"""

from __future__ import annotations

import copy
import hashlib
import json
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

from plasmoncoherence import (
    CONFIG_SCHEMA_VERSION,
    DEFAULT_ABSORPTION_LENGTH_UM,
    DEFAULT_ACCIDENTAL_RATE,
    DEFAULT_ALPHA_STEP,
    DEFAULT_BELL_K,
    DEFAULT_BETA_LIST,
    DEFAULT_CHSH_ANGLES,
    DEFAULT_DELTA_NM,
    DEFAULT_DEPHASING_N_SIGMA,
    DEFAULT_ENERGY_GRID,
    DEFAULT_EPS_AIR,
    DEFAULT_EPS_REFERENCE,
    DEFAULT_EPS_SILICON,
    DEFAULT_MAX_ORDER,
    DEFAULT_PAIR_RATE,
    DEFAULT_PERIOD_NM,
    DEFAULT_SCENARIO,
    DEFAULT_SEARCH_RANGE_NM,
    DEFAULT_SEED,
    DEFAULT_WAVELENGTH_NM,
    Scenario,
)

from .counting import MAX_SEED, SCENARIO_PRESETS, SourceParams
from .dispersion import HoleArraySpec
from .errors import ChannelError, ConfigError, DataError
from .materials import (
    ConstantModel,
    DrudeModel,
    MaterialModel,
    PerfectConductor,
    gold,
    gold_drude,
    load_optical_constants,
)
from .state import ChannelParams

if TYPE_CHECKING:
    from collections.abc import Mapping

LOGGER = logging.getLogger(__name__)

DIELECTRICS = ("air", "silicon", "reference")

# Which dielectric clads the sample of each scenario; calibration has no sample
SCENARIO_DIELECTRIC: dict[Scenario, str | None] = {
    Scenario.CALIBRATION: None,
    Scenario.HOLEARRAY_AIR: "air",
    Scenario.HOLEARRAY_SILICON: "silicon",
    Scenario.CUSTOM: "hole_array",
}

SECTION_KEYS: dict[str, frozenset[str]] = {
    "": frozenset(
        {
            "schema_version",
            "scenario",
            "seed",
            "channel",
            "source",
            "sweep",
            "chsh_angles",
            "bell_k",
            "dephasing",
            "materials",
            "hole_array",
            "dispersion",
        },
    ),
    "channel": frozenset({"h", "v", "delta_phi_c_deg", "env_overlap"}),
    "source": frozenset(
        {"pair_rate", "integration_time", "channel_survival", "accidental_rate"},
    ),
    "sweep": frozenset({"beta_list", "alpha_step"}),
    "dephasing": frozenset({"t_p_fs", "n_sigma"}),
    "materials": frozenset({"metal", "dielectrics"}),
    "materials.dielectrics": frozenset(DIELECTRICS),
    "hole_array": frozenset(
        {
            "period_nm",
            "max_order",
            "hop_distance_um",
            "absorption_length_um",
            "dielectric",
        },
    ),
    "dispersion": frozenset(
        {"wavelength_nm", "energy_grid", "search_range_nm", "delta_nm"},
    ),
}


@dataclass(frozen=True)
class MaterialsConfig:
    """The metal and the three dielectrics the tool knows about."""

    metal: MaterialModel
    air: MaterialModel
    silicon: MaterialModel
    reference: MaterialModel

    def dielectric(self, name: str) -> MaterialModel:
        """Look up a dielectric by name."""
        return getattr(self, name)


@dataclass(frozen=True)
class HoleArrayConfig:
    """Geometry of the hole array and its absorption length."""

    period_nm: float = DEFAULT_PERIOD_NM
    max_order: int = DEFAULT_MAX_ORDER
    hop_distance_um: float | None = None
    absorption_length_um: float = DEFAULT_ABSORPTION_LENGTH_UM
    dielectric: str = "silicon"

    @property
    def hop_distance(self) -> float:
        """Distance between diagonal neighbours, in um, unless configured."""
        if self.hop_distance_um is not None:
            return self.hop_distance_um
        return self.period_nm * math.sqrt(2.0) / 1000.0


@dataclass(frozen=True)
class DispersionConfig:
    """Where and how finely the dispersion is evaluated."""

    wavelength_nm: float = DEFAULT_WAVELENGTH_NM
    energy_grid: tuple[float, float, float] = DEFAULT_ENERGY_GRID
    search_range_nm: tuple[float, float] = DEFAULT_SEARCH_RANGE_NM
    delta_nm: float = DEFAULT_DELTA_NM

    def energies(self) -> list[float]:
        """Energies from start to stop inclusive, in steps."""
        start, stop, step = self.energy_grid
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment configuration."""

    scenario: Scenario
    seed: int
    channel: ChannelParams
    source: SourceParams
    beta_list: tuple[float, ...]
    alpha_step: float
    chsh_angles: tuple[float, float, float, float]
    bell_k: float
    t_p_fs: float | None
    n_sigma: float
    materials: MaterialsConfig
    hole_array: HoleArrayConfig
    dispersion: DispersionConfig
    document: dict[str, Any] = field(default_factory=dict, repr=False)
    text: str | None = field(default=None, repr=False)
    source_name: str = "<config>"
    base_dir: Path = field(default_factory=Path.cwd, repr=False)

    @property
    def delta_phi_c(self) -> float:
        """Setup phase between |HH> and |VV>, radians."""
        return self.channel.delta_phi_c

    def for_scenario(self, scenario: Scenario) -> ExperimentConfig:
        """Re-resolve the same document for another scenario's presets."""
        document = copy.deepcopy(self.document)
        document["scenario"] = str(scenario)
        return resolve(document, self.text, self.source_name, self.base_dir)

    def with_seed(self, seed: int) -> ExperimentConfig:
        """Same configuration with another seed."""
        document = copy.deepcopy(self.document)
        document["seed"] = seed
        return resolve(document, self.text, self.source_name, self.base_dir)

    def effective_document(self) -> dict[str, Any]:
        """The document with scenario, seed and schema version made explicit."""
        document = copy.deepcopy(self.document)
        document["schema_version"] = CONFIG_SCHEMA_VERSION
        document["scenario"] = str(self.scenario)
        document["seed"] = self.seed
        return document

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON of the effective document."""
        canonical = json.dumps(
            self.effective_document(),
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def sample_dielectric(self) -> str | None:
        """Name of the dielectric cladding this scenario's sample, if any."""
        name = SCENARIO_DIELECTRIC[self.scenario]
        return self.hole_array.dielectric if name == "hole_array" else name

    def hole_array_spec(self, dielectric: str | None = None) -> HoleArraySpec:
        """Hole array over the named dielectric (the configured one by default)."""
        return HoleArraySpec(
            period=self.hole_array.period_nm,
            dielectric=self.materials.dielectric(dielectric or self.hole_array.dielectric),
            metal=self.materials.metal,
            max_order=self.hole_array.max_order,
        )


class _Reader:
    """Typed access to the raw document, raising ConfigError with line numbers."""

    def __init__(
        self,
        document: Mapping[str, Any],
        text: str | None,
        source_name: str,
        base_dir: Path,
    ) -> None:
        self.document = document
        self.lines = text.splitlines() if text is not None else []
        self.source_name = source_name
        self.base_dir = base_dir

    def line_of(self, path: str) -> int | None:
        """1-based line of the last key in a dotted path, searching nested keys in order."""
        start = 0
        line = None
        for key in path.split("."):
            pattern = re.compile(rf'"{re.escape(key)}"\s*:')
            for index in range(start, len(self.lines)):
                if pattern.search(self.lines[index]):
                    line = index + 1
                    start = index
                    break
            else:
                return line
        return line

    def error(self, path: str, message: str) -> ConfigError:
        line = self.line_of(path) if path else None
        where = f"{self.source_name}:{line}" if line else self.source_name
        subject = f"{path} " if path else ""
        return ConfigError(f"{where}: {subject}{message}", line=line)

    def section(self, path: str) -> Mapping[str, Any]:
        value = self.get(path, {})
        if not isinstance(value, dict):
            raise self.error(path, "must be an object")
        unknown = set(value) - SECTION_KEYS[path]
        if unknown:
            first = sorted(unknown)[0]
            raise self.error(f"{path}.{first}" if path else first, "is not a known key")
        return value

    def get(self, path: str, default: Any = None) -> Any:
        node: Any = self.document
        for key in path.split(".") if path else []:
            if not isinstance(node, dict) or key not in node:
                return default
            node = node[key]
        return node

    def number(
        self,
        path: str,
        default: float,
        *,
        positive: bool = False,
        non_negative: bool = False,
    ) -> float:
        value = self.get(path, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(path, f"must be a number, not {value!r}")
        if not math.isfinite(value):
            raise self.error(path, "must be finite")
        if positive and not value > 0:
            raise self.error(path, f"must be > 0, not {value}")
        if non_negative and not value >= 0:
            raise self.error(path, f"must be >= 0, not {value}")
        return float(value)

    def optional_number(self, path: str, *, positive: bool = False) -> float | None:
        if self.get(path) is None:
            return None
        return self.number(path, 0.0, positive=positive)

    def integer(self, path: str, default: int, minimum: int, maximum: int) -> int:
        value = self.get(path, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.error(path, f"must be an integer, not {value!r}")
        if not minimum <= value <= maximum:
            raise self.error(path, f"must be in [{minimum}, {maximum}], not {value}")
        return value

    def complex_value(self, path: str, default: complex) -> complex:
        """A real number or a [re, im] pair."""
        value = self.get(path, default)
        if isinstance(value, complex):
            return value
        if isinstance(value, list):
            if len(value) != 2 or not all(  # noqa: PLR2004
                isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
            ):
                raise self.error(path, "must be a number or a [re, im] pair")
            return complex(value[0], value[1])
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self.error(path, f"must be a number, not {value!r}")
        if not math.isfinite(value):
            raise self.error(path, "must be finite")
        return complex(value)

    def numbers(
        self,
        path: str,
        default: tuple[float, ...],
        length: int | None = None,
    ) -> tuple[float, ...]:
        value = self.get(path, list(default))
        if not isinstance(value, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in value
        ):
            raise self.error(path, "must be a list of numbers")
        if length is not None and len(value) != length:
            raise self.error(path, f"must have {length} entries, not {len(value)}")
        if not value:
            raise self.error(path, "must not be empty")
        return tuple(float(x) for x in value)

    def material(self, path: str, default: Any) -> MaterialModel:
        """A named material, a CSV path, a Drude object or a constant permittivity."""
        value = self.get(path, default)
        try:
            if isinstance(value, dict):
                if set(value) != {"eps_inf", "omega_p", "gamma"}:
                    raise self.error(path, "Drude object needs eps_inf, omega_p, gamma")
                return DrudeModel(
                    eps_inf=float(value["eps_inf"]),
                    omega_p=float(value["omega_p"]),
                    gamma=float(value["gamma"]),
                    name=path.rsplit(".", 1)[-1],
                )
            if isinstance(value, str):
                named = {
                    "gold": gold,
                    "gold-drude": gold_drude,
                    "perfect-conductor": PerfectConductor,
                }
                if value in named:
                    return named[value]()
                csv_path = self.base_dir / value
                if not csv_path.is_file():
                    raise self.error(path, f"file {value!r} does not exist")
                return load_optical_constants(csv_path)
            return ConstantModel(self.complex_value(path, value), name=path.rsplit(".", 1)[-1])
        except (ChannelError, DataError, TypeError, ValueError) as e:
            raise self.error(path, str(e)) from e


def resolve(
    document: Mapping[str, Any],
    text: str | None = None,
    source_name: str = "<config>",
    base_dir: Path | None = None,
) -> ExperimentConfig:
    """Validate a parsed document and resolve it against the scenario presets."""
    base_dir = base_dir or Path.cwd()
    reader = _Reader(document, text, source_name, base_dir)
    if not isinstance(document, dict):
        raise reader.error("", "top level must be a JSON object")
    reader.section("")

    version = reader.get("schema_version", CONFIG_SCHEMA_VERSION)
    if version != CONFIG_SCHEMA_VERSION:
        raise reader.error(
            "schema_version",
            f"must be {CONFIG_SCHEMA_VERSION}, not {version!r}",
        )

    scenario_name = reader.get("scenario", str(DEFAULT_SCENARIO))
    try:
        scenario = Scenario(scenario_name)
    except ValueError:
        known = ", ".join(s.value for s in Scenario)
        raise reader.error("scenario", f"must be one of {known}, not {scenario_name!r}") from None
    preset = SCENARIO_PRESETS[scenario]
    seed = reader.integer("seed", DEFAULT_SEED, 0, MAX_SEED)

    reader.section("channel")
    h = reader.complex_value("channel.h", 1.0)
    v = reader.complex_value("channel.v", 1.0)
    env_overlap = reader.complex_value("channel.env_overlap", preset.env_overlap)
    delta_phi_c = math.radians(reader.number("channel.delta_phi_c_deg", 0.0))
    try:
        channel = ChannelParams(h=h, v=v, delta_phi_c=delta_phi_c, env_overlap=env_overlap)
    except ChannelError as e:
        raise reader.error("channel", str(e)) from e

    reader.section("source")
    survival = reader.number(
        "source.channel_survival",
        preset.channel_survival,
        positive=True,
    )
    if survival > 1:
        raise reader.error("source.channel_survival", f"must be <= 1, not {survival}")
    source = SourceParams(
        pair_rate=reader.number("source.pair_rate", DEFAULT_PAIR_RATE, positive=True),
        integration_time=reader.number(
            "source.integration_time",
            preset.integration_time,
            positive=True,
        ),
        channel_survival=survival,
        accidental_rate=reader.number(
            "source.accidental_rate",
            DEFAULT_ACCIDENTAL_RATE,
            non_negative=True,
        ),
        seed=seed,
    )

    reader.section("sweep")
    beta_list = reader.numbers("sweep.beta_list", DEFAULT_BETA_LIST)
    alpha_step = reader.number("sweep.alpha_step", DEFAULT_ALPHA_STEP, positive=True)
    chsh_angles = reader.numbers("chsh_angles", DEFAULT_CHSH_ANGLES, length=4)
    bell_k = reader.number("bell_k", DEFAULT_BELL_K, positive=True)

    reader.section("dephasing")
    t_p_fs = reader.optional_number("dephasing.t_p_fs", positive=True)
    n_sigma = reader.number("dephasing.n_sigma", DEFAULT_DEPHASING_N_SIGMA, non_negative=True)

    reader.section("materials")
    reader.section("materials.dielectrics")
    materials = MaterialsConfig(
        metal=reader.material("materials.metal", "gold"),
        air=reader.material("materials.dielectrics.air", DEFAULT_EPS_AIR),
        silicon=reader.material("materials.dielectrics.silicon", DEFAULT_EPS_SILICON),
        reference=reader.material(
            "materials.dielectrics.reference",
            DEFAULT_EPS_REFERENCE,
        ),
    )

    reader.section("hole_array")
    dielectric = reader.get("hole_array.dielectric", "silicon")
    if dielectric not in DIELECTRICS:
        raise reader.error(
            "hole_array.dielectric",
            f"must be one of {', '.join(DIELECTRICS)}, not {dielectric!r}",
        )
    hole_array = HoleArrayConfig(
        period_nm=reader.number("hole_array.period_nm", DEFAULT_PERIOD_NM, positive=True),
        max_order=reader.integer("hole_array.max_order", DEFAULT_MAX_ORDER, 1, 1000),
        hop_distance_um=reader.optional_number("hole_array.hop_distance_um", positive=True),
        absorption_length_um=reader.optional_number(
            "hole_array.absorption_length_um",
            positive=True,
        )
        or DEFAULT_ABSORPTION_LENGTH_UM,
        dielectric=dielectric,
    )

    reader.section("dispersion")
    energy_grid = reader.numbers("dispersion.energy_grid", DEFAULT_ENERGY_GRID, length=3)
    start, stop, step = energy_grid
    if not (0 < start <= stop and step > 0):
        raise reader.error(
            "dispersion.energy_grid",
            "needs 0 < start <= stop and step > 0",
        )
    search_range = reader.numbers(
        "dispersion.search_range_nm",
        DEFAULT_SEARCH_RANGE_NM,
        length=2,
    )
    if not 0 < search_range[0] < search_range[1]:
        raise reader.error("dispersion.search_range_nm", "needs 0 < low < high")
    dispersion = DispersionConfig(
        wavelength_nm=reader.number(
            "dispersion.wavelength_nm",
            DEFAULT_WAVELENGTH_NM,
            positive=True,
        ),
        energy_grid=energy_grid,  # type: ignore[arg-type]
        search_range_nm=search_range,  # type: ignore[arg-type]
        delta_nm=reader.number("dispersion.delta_nm", DEFAULT_DELTA_NM, positive=True),
    )

    config = ExperimentConfig(
        scenario=scenario,
        seed=seed,
        channel=channel,
        source=source,
        beta_list=beta_list,
        alpha_step=alpha_step,
        chsh_angles=chsh_angles,  # type: ignore[arg-type]
        bell_k=bell_k,
        t_p_fs=t_p_fs,
        n_sigma=n_sigma,
        materials=materials,
        hole_array=hole_array,
        dispersion=dispersion,
        document=copy.deepcopy(dict(document)),
        text=text,
        source_name=source_name,
        base_dir=base_dir,
    )
    LOGGER.debug("Resolved configuration %s for scenario %s", source_name, scenario)
    return config


def parse_config(
    text: str,
    source_name: str = "<config>",
    base_dir: Path | None = None,
) -> ExperimentConfig:
    """Parse and resolve a JSON configuration held in a string."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"{source_name}:{e.lineno}: invalid JSON: {e.msg}",
            line=e.lineno,
        ) from e
    return resolve(document, text, source_name, base_dir)


def load_config(path: str | Path) -> ExperimentConfig:
    """Read a configuration file; relative material paths resolve next to it."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: cannot read configuration: {e}") from e
    LOGGER.info("Loading configuration from %s", path)
    return parse_config(text, source_name=str(path), base_dir=path.parent)


def default_config(scenario: Scenario = DEFAULT_SCENARIO) -> ExperimentConfig:
    """Configuration with every value at its default."""
    return resolve({"scenario": str(scenario)})
