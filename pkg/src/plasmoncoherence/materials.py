"""
Permittivity models for metals and dielectrics.

Wavelengths are in nm. A model is one of a Drude metal, a tabulated (n, k) data set,
a constant permittivity, or a perfect conductor.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from plasmoncoherence import DEFAULT_GOLD_DRUDE, HC_EV_NM, MaterialKind

from .errors import ChannelError, MaterialRangeError, SchemaError
from .tables import read_optical_constants

if TYPE_CHECKING:
    from collections.abc import Sequence

LOGGER = logging.getLogger(__name__)

GOLD_DATA_FILE = "gold_optical_constants.csv"
MIN_TABLE_ROWS = 2


@dataclass(frozen=True)
class DrudeModel:
    """eps = eps_inf - omega_p^2 / (omega^2 + i gamma omega), energies in eV."""

    eps_inf: float
    omega_p: float
    gamma: float
    name: str = "drude"

    kind = MaterialKind.DRUDE

    def __post_init__(self) -> None:
        """Check the Drude parameters."""
        if not self.omega_p > 0:
            raise ChannelError(f"Drude omega_p must be > 0, not {self.omega_p}")
        if not self.gamma >= 0:
            raise ChannelError(f"Drude gamma must be >= 0, not {self.gamma}")


@dataclass(frozen=True)
class TabulatedModel:
    """Refractive index n + ik sampled at strictly increasing wavelengths."""

    wavelengths: tuple[float, ...]
    n: tuple[float, ...]
    k: tuple[float, ...]
    name: str = "tabulated"

    kind = MaterialKind.TABULATED

    def __post_init__(self) -> None:
        """Check the table is usable for interpolation."""
        if not len(self.wavelengths) == len(self.n) == len(self.k):
            raise SchemaError(f"Table {self.name} has columns of unequal length")
        if len(self.wavelengths) < MIN_TABLE_ROWS:
            raise SchemaError(f"Table {self.name} needs at least {MIN_TABLE_ROWS} rows")
        if np.any(np.diff(self.wavelengths) <= 0):
            raise SchemaError(
                f"Table {self.name} wavelengths must be strictly increasing",
            )
        if min(self.n) < 0 or min(self.k) < 0:
            raise SchemaError(f"Table {self.name} has negative n or k")

    @classmethod
    def from_rows(
        cls,
        rows: Sequence[tuple[float, float, float]],
        name: str = "tabulated",
    ) -> TabulatedModel:
        """Build from (wavelength, n, k) rows."""
        if not rows:
            raise SchemaError(f"Table {name} is empty")
        wavelengths, n, k = zip(*rows, strict=True)
        return cls(tuple(wavelengths), tuple(n), tuple(k), name=name)

    @property
    def wavelength_range(self) -> tuple[float, float]:
        """Smallest and largest tabulated wavelength."""
        return self.wavelengths[0], self.wavelengths[-1]


@dataclass(frozen=True)
class ConstantModel:
    """Dispersionless material."""

    eps: complex
    name: str = "constant"

    kind = MaterialKind.CONSTANT

    def __post_init__(self) -> None:
        """Store eps as complex."""
        object.__setattr__(self, "eps", complex(self.eps))
        if not (math.isfinite(self.eps.real) and math.isfinite(self.eps.imag)):
            raise ChannelError(f"Constant permittivity must be finite, not {self.eps}")


@dataclass(frozen=True)
class PerfectConductor:
    """Metal with eps -> -infinity; SPPs sit exactly on the light line."""

    name: str = "perfect-conductor"

    kind = MaterialKind.PERFECT_CONDUCTOR


MaterialModel = DrudeModel | TabulatedModel | ConstantModel | PerfectConductor


def photon_energy(wavelength: float) -> float:
    """Photon energy in eV at a wavelength in nm."""
    return HC_EV_NM / wavelength


def permittivity(material: MaterialModel, wavelength: float) -> complex:
    """Complex relative permittivity at `wavelength` (nm)."""
    if not wavelength > 0:
        raise ChannelError(f"Wavelength must be > 0, not {wavelength}")
    match material:
        case DrudeModel(eps_inf=eps_inf, omega_p=omega_p, gamma=gamma):
            omega = photon_energy(wavelength)
            return complex(eps_inf - omega_p**2 / (omega**2 + 1j * gamma * omega))
        case TabulatedModel():
            low, high = material.wavelength_range
            if not low <= wavelength <= high:
                raise MaterialRangeError(
                    f"Wavelength {wavelength} nm is outside the {material.name} table "
                    f"({low}-{high} nm)",
                    wavelength,
                )
            n = float(np.interp(wavelength, material.wavelengths, material.n))
            k = float(np.interp(wavelength, material.wavelengths, material.k))
            return complex(n, k) ** 2
        case ConstantModel(eps=eps):
            return eps
        case PerfectConductor():
            return complex(-math.inf, 0.0)
    raise TypeError(f"Unknown material model {material!r}")


def load_optical_constants(path: str | Path, name: str | None = None) -> TabulatedModel:
    """Read a `wavelength_nm,n,k` file into a tabulated model."""
    path = Path(path)
    model = TabulatedModel.from_rows(read_optical_constants(path), name=name or path.stem)
    LOGGER.debug(
        "Loaded %d optical-constant rows from %s",
        len(model.wavelengths),
        path,
    )
    return model


@functools.cache
def gold() -> TabulatedModel:
    """Bundled visible/NIR optical constants of gold."""
    source = resources.files("plasmoncoherence") / "data" / GOLD_DATA_FILE
    with resources.as_file(source) as path:
        return load_optical_constants(path, name="gold")


def gold_drude() -> DrudeModel:
    """Drude fit to gold in the visible/NIR, for use outside the tabulated range."""
    eps_inf, omega_p, gamma = DEFAULT_GOLD_DRUDE
    return DrudeModel(eps_inf=eps_inf, omega_p=omega_p, gamma=gamma, name="gold-drude")
