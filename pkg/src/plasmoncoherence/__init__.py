"""Entangled-photon / plasmonic-channel simulator package."""

from enum import StrEnum

from scipy import constants

__version__ = "0.1.0"

__all__: list[str] = []


class Scenario(StrEnum):
    """The experiment configurations that can be simulated."""

    CALIBRATION = "calibration"
    HOLEARRAY_AIR = "holearray-air"
    HOLEARRAY_SILICON = "holearray-silicon"
    CUSTOM = "custom"


class MaterialKind(StrEnum):
    """The ways a permittivity can be described."""

    DRUDE = "drude"
    TABULATED = "tabulated"
    CONSTANT = "constant"
    PERFECT_CONDUCTOR = "perfect-conductor"


# Physical constants, in the units used throughout (nm, um, fs, eV)
HC_EV_NM = constants.h * constants.c / constants.e * 1e9  # ~1239.842
HBAR_EV_FS = constants.hbar / constants.e * 1e15
SPEED_OF_LIGHT_UM_PER_FS = constants.c / 1e9

CONFIG_SCHEMA_VERSION = 1

DEFAULT_LOGGING = "INFO"
DEFAULT_SEED = 20240601
DEFAULT_SCENARIO = Scenario.CALIBRATION

# Source / counting
DEFAULT_PAIR_RATE = 1.0e4  # post-selected pairs per second at P_cc = 1
DEFAULT_INTEGRATION_TIME = 10.0  # seconds per polarizer setting
DEFAULT_ACCIDENTAL_RATE = 0.0

# Sweep and CHSH analyzers, degrees from vertical
DEFAULT_BETA_LIST = (0.0, 45.0, 90.0, 135.0)
DEFAULT_ALPHA_STEP = 10.0
DEFAULT_CHSH_ANGLES = (0.0, 45.0, 22.5, 67.5)  # a1, a2, b1, b2
DEFAULT_VISIBILITY_BETA = 45.0
DEFAULT_REDUNDANT_BETA = 135.0
DEFAULT_BELL_K = 3.0
DEFAULT_DEPHASING_N_SIGMA = 1.0

# Dispersion
DEFAULT_WAVELENGTH_NM = 812.0
DEFAULT_DELTA_NM = 1.0
DEFAULT_PERIOD_NM = 850.0
DEFAULT_MAX_ORDER = 8
DEFAULT_ABSORPTION_LENGTH_UM = 0.15
DEFAULT_EPS_AIR = 1.0
DEFAULT_EPS_SILICON = 15.5  # amorphous silicon, n ~ 3.94 at 812 nm
DEFAULT_EPS_REFERENCE = 2.111  # fused silica, n ~ 1.453 at 812 nm
DEFAULT_ENERGY_GRID = (1.0, 2.0, 0.01)  # start, stop, step in eV
DEFAULT_SEARCH_RANGE_NM = (750.0, 950.0)
DEFAULT_SCAN_STEP_NM = 1.0
DEFAULT_ROOT_XTOL_NM = 1.0e-6

# Drude fit for gold in the visible/NIR (eps_inf, omega_p [eV], gamma [eV])
DEFAULT_GOLD_DRUDE = (9.84, 9.0, 0.067)

# Numerical tolerances on density matrices
HERMITIAN_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = -1e-10
