"""Tests for loading and resolving experiment configurations."""

import inspect
import math
import os
from pathlib import Path

import pytest

from plasmoncoherence import (
    DEFAULT_BETA_LIST,
    DEFAULT_CHSH_ANGLES,
    DEFAULT_EPS_SILICON,
    DEFAULT_SEED,
    MaterialKind,
    Scenario,
)
from plasmoncoherence.config import default_config, load_config, parse_config
from plasmoncoherence.counting import SCENARIO_PRESETS
from plasmoncoherence.errors import ConfigError, ExitCode
from plasmoncoherence.materials import permittivity


def file_path_in_test_dir(file_name: str) -> str:
    """Return the path to a file in the tests directory."""
    tests_path = os.path.dirname(
        os.path.abspath(inspect.getfile(inspect.currentframe())),  # type: ignore[arg-type]
    )

    return f"{tests_path}/{file_name}"


def test_defaults() -> None:
    """Test an empty document against the package defaults."""
    config = parse_config("{}")
    assert config.scenario == Scenario.CALIBRATION
    assert config.seed == DEFAULT_SEED
    assert config.beta_list == DEFAULT_BETA_LIST
    assert config.chsh_angles == DEFAULT_CHSH_ANGLES
    assert config.t_p_fs is None
    assert config.channel.env_overlap == SCENARIO_PRESETS[Scenario.CALIBRATION].env_overlap
    assert config.materials.metal.name == "gold"
    assert permittivity(config.materials.silicon, 812.0) == DEFAULT_EPS_SILICON
    assert config.hole_array.hop_distance == pytest.approx(1.2021, rel=1e-4)
    assert config.sample_dielectric() is None
    assert len(config.dispersion.energies()) == 101


def test_scenario_presets() -> None:
    """Test that each scenario brings its preset unless the file overrides it."""
    for scenario, preset in SCENARIO_PRESETS.items():
        config = default_config(scenario)
        assert config.channel.env_overlap == preset.env_overlap
        assert config.source.channel_survival == preset.channel_survival
        assert config.source.integration_time == preset.integration_time
    assert default_config(Scenario.HOLEARRAY_AIR).sample_dielectric() == "air"
    assert default_config(Scenario.CUSTOM).sample_dielectric() == "silicon"

    config = parse_config(
        '{"scenario": "holearray-silicon", "source": {"integration_time": 3},'
        ' "channel": {"env_overlap": 0.5}}',
    )
    assert config.source.integration_time == 3.0
    assert config.channel.env_overlap == 0.5
    assert config.source.channel_survival == 0.01


def test_load_config_files() -> None:
    """Test the bundled test configurations."""
    calibration = load_config(file_path_in_test_dir("configs/calibration.json"))
    assert calibration.seed == 12345
    silicon = load_config(file_path_in_test_dir("configs/holearray_silicon.json"))
    assert silicon.scenario == Scenario.HOLEARRAY_SILICON
    assert silicon.hole_array.dielectric == "silicon"
    conductor = load_config(file_path_in_test_dir("configs/perfect_conductor.json"))
    assert conductor.materials.metal.kind == MaterialKind.PERFECT_CONDUCTOR
    assert conductor.dispersion.search_range_nm == (500.0, 1000.0)
    assert conductor.hole_array_spec().max_order == 2


def test_error_names_key_and_line() -> None:
    """Test that a bad value is reported with its key and line."""
    path = file_path_in_test_dir("configs/invalid_integration_time.json")
    with pytest.raises(ConfigError, match=r":6: source\.integration_time must be > 0") as error:
        load_config(path)
    assert error.value.line == 6
    assert error.value.exit_code == ExitCode.CONFIG_ERROR


def test_unknown_scenario() -> None:
    """Test that an unknown scenario lists the valid ones."""
    with pytest.raises(ConfigError, match="must be one of calibration"):
        load_config(file_path_in_test_dir("configs/unknown_scenario.json"))


def test_malformed_documents() -> None:
    """Test schema errors in inline documents."""
    with pytest.raises(ConfigError, match="<config>:2: invalid JSON"):
        parse_config('{\n  "seed": ,\n}')
    with pytest.raises(ConfigError, match="schema_version must be 1"):
        parse_config('{"schema_version": 2}')
    with pytest.raises(ConfigError, match="colour is not a known key"):
        parse_config('{"colour": "red"}')
    with pytest.raises(ConfigError, match=r"sweep\.alpha is not a known key"):
        parse_config('{"sweep": {"alpha": 5}}')
    with pytest.raises(ConfigError, match="must have 4 entries"):
        parse_config('{"chsh_angles": [0, 45, 22.5]}')
    with pytest.raises(ConfigError, match="channel_survival must be <= 1"):
        parse_config('{"source": {"channel_survival": 2}}')
    with pytest.raises(ConfigError, match="Environment overlap"):
        parse_config('{"channel": {"env_overlap": 1.5}}')
    with pytest.raises(ConfigError, match="seed must be an integer"):
        parse_config('{"seed": "abc"}')
    with pytest.raises(ConfigError, match="hole_array.dielectric must be one of"):
        parse_config('{"hole_array": {"dielectric": "glass"}}')
    with pytest.raises(ConfigError, match="energy_grid needs"):
        parse_config('{"dispersion": {"energy_grid": [2, 1, 0.1]}}')


def test_complex_channel_values() -> None:
    """Test [re, im] pairs for complex amplitudes."""
    config = parse_config(
        '{"channel": {"v": [0, 1], "env_overlap": [0, 0.5], "delta_phi_c_deg": 90}}',
    )
    assert config.channel.v == 1j
    assert config.channel.env_overlap == 0.5j
    assert config.delta_phi_c == pytest.approx(math.pi / 2)
    with pytest.raises(ConfigError, match=r"\[re, im\] pair"):
        parse_config('{"channel": {"h": [1, 2, 3]}}')


def test_materials(tmp_path: Path) -> None:
    """Test named, Drude, constant and file-backed materials."""
    table = tmp_path / "silicon_nk.csv"
    table.write_text("wavelength_nm,n,k\n700,4.0,0.0\n900,3.8,0.0\n", encoding="utf-8")
    config_path = tmp_path / "config.json"
    config_path.write_text(
        """{
  "materials": {
    "metal": {"eps_inf": 9.84, "omega_p": 9.0, "gamma": 0.067},
    "dielectrics": {"silicon": "silicon_nk.csv", "reference": [2.1, 0.01]}
  }
}
""",
        encoding="utf-8",
    )
    config = load_config(config_path)
    assert config.materials.metal.kind == MaterialKind.DRUDE
    assert config.materials.silicon.kind == MaterialKind.TABULATED
    assert permittivity(config.materials.silicon, 800.0) == pytest.approx(3.9**2)
    assert permittivity(config.materials.reference, 800.0) == complex(2.1, 0.01)

    missing = tmp_path / "missing.json"
    missing.write_text('{\n  "materials": {\n    "metal": "nope.csv"\n  }\n}\n', encoding="utf-8")
    with pytest.raises(ConfigError, match=r":3: materials\.metal file 'nope.csv' does not exist"):
        load_config(missing)
    with pytest.raises(ConfigError, match="Drude object needs"):
        parse_config('{"materials": {"metal": {"eps_inf": 1}}}')
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.json")


def test_config_hash() -> None:
    """Test that the hash follows the effective document only."""
    compact = parse_config('{"scenario": "calibration", "seed": 5}')
    spaced = parse_config('{\n  "seed": 5,\n  "scenario":   "calibration"\n}')
    assert compact.config_hash() == spaced.config_hash()
    assert len(compact.config_hash()) == 64
    assert parse_config('{"seed": 5}').config_hash() == compact.config_hash()
    reseeded = compact.with_seed(6)
    assert reseeded.seed == 6
    assert reseeded.source.seed == 6
    assert reseeded.config_hash() != compact.config_hash()


def test_for_scenario() -> None:
    """Test re-resolving a document for another scenario."""
    config = load_config(file_path_in_test_dir("configs/calibration.json"))
    silicon = config.for_scenario(Scenario.HOLEARRAY_SILICON)
    assert silicon.scenario == Scenario.HOLEARRAY_SILICON
    assert silicon.seed == config.seed
    assert silicon.source.channel_survival == 0.01
    assert silicon.config_hash() != config.config_hash()
