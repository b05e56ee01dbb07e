"""
Surface plasmon polaritons on metal/dielectric interfaces and hole arrays.

Wavelengths are in nm, wavevectors in rad/um, times in fs and velocities in units
of c. Top and bottom interfaces of a thick film are treated as independent single
interfaces, and a hole array is handled in the empty-lattice approximation.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import root_scalar

from plasmoncoherence import (
    DEFAULT_DELTA_NM,
    DEFAULT_MAX_ORDER,
    DEFAULT_ROOT_XTOL_NM,
    DEFAULT_SCAN_STEP_NM,
    DEFAULT_SEARCH_RANGE_NM,
    HC_EV_NM,
    SPEED_OF_LIGHT_UM_PER_FS,
)

from .errors import (
    ChannelError,
    LosslessModeError,
    ResonanceSingularityError,
    StencilError,
)
from .materials import ConstantModel, MaterialModel, permittivity, photon_energy

if TYPE_CHECKING:
    from collections.abc import Sequence

LOGGER = logging.getLogger(__name__)

NM_PER_UM = 1000.0
SINGULARITY_TOLERANCE = 1e-12

Medium = MaterialModel | complex | float


@dataclass(frozen=True)
class SppPoint:
    """One dispersion sample of an interface."""

    energy: float
    k: complex
    v_g: float
    l_prop: float


@dataclass(frozen=True)
class HoleArraySpec:
    """Square hole array in a metal film, cladded by one dielectric."""

    period: float
    dielectric: MaterialModel
    metal: MaterialModel
    max_order: int = DEFAULT_MAX_ORDER

    def __post_init__(self) -> None:
        """Check the lattice."""
        if not self.period > 0:
            raise ChannelError(f"Hole array period must be > 0, not {self.period}")
        if self.max_order < 1:
            raise ChannelError(f"max_order must be >= 1, not {self.max_order}")

    @property
    def reciprocal_vector(self) -> float:
        """|G| = 2 pi / P in rad/um."""
        return 2.0 * math.pi * NM_PER_UM / self.period


@dataclass(frozen=True)
class Timescales:
    """Propagation time between holes and the absorption-limited lifetimes."""

    t_p: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        """T2 = 2 T1 holds for every value."""
        if not (self.t_p > 0 and self.t1 > 0):
            raise ChannelError(f"Timescales must be positive: {self}")
        if self.t2 != 2.0 * self.t1:
            raise ChannelError(f"T2 must equal 2 T1: {self}")


@dataclass(frozen=True)
class BandPoint:
    """Folded branches at one energy, plus the light line."""

    energy: float
    k_spp: complex
    branches: tuple[tuple[int, float], ...]
    light_line: float


@dataclass(frozen=True)
class Resonance:
    """An EOT order and its resonance wavelength."""

    order: tuple[int, int]
    wavelength: float


def as_material(medium: Medium) -> MaterialModel:
    """Wrap a bare permittivity as a constant material."""
    if isinstance(medium, (int, float, complex)):
        return ConstantModel(complex(medium))
    return medium


def vacuum_wavevector(wavelength: float) -> float:
    """2 pi / lambda in rad/um, for lambda in nm."""
    return 2.0 * math.pi * NM_PER_UM / wavelength


def spp_wavevector(eps_m: complex, eps_d: complex, wavelength: float) -> complex:
    """
    k = k0 sqrt(eps_m eps_d / (eps_m + eps_d)) on the forward, decaying branch.

    An infinite eps_m is the perfect conductor, whose SPP is the light line.
    """
    k0 = vacuum_wavevector(wavelength)
    eps_m = complex(eps_m)
    eps_d = complex(eps_d)
    if cmath.isinf(eps_m):
        return k0 * cmath.sqrt(eps_d)
    denominator = eps_m + eps_d
    if abs(denominator) <= SINGULARITY_TOLERANCE * max(abs(eps_m), abs(eps_d), 1.0):
        raise ResonanceSingularityError(
            f"eps_m + eps_d = 0 at {wavelength} nm (eps_m={eps_m}, eps_d={eps_d})",
        )
    k = k0 * cmath.sqrt(eps_m * eps_d / denominator)
    if k.imag < 0:
        k = -k
    return k


def interface_wavevector(metal: Medium, dielectric: Medium, wavelength: float) -> complex:
    """SPP wavevector of a metal/dielectric pair at `wavelength`."""
    return spp_wavevector(
        permittivity(as_material(metal), wavelength),
        permittivity(as_material(dielectric), wavelength),
        wavelength,
    )


def group_velocity(
    metal: Medium,
    dielectric: Medium,
    wavelength: float,
    delta: float = DEFAULT_DELTA_NM,
) -> float:
    """v_g = d(omega/c) / d(Re k) by central difference over wavelength +- delta."""
    if not 0 < delta < wavelength:
        raise ChannelError(f"Stencil delta must be in (0, {wavelength}), not {delta}")
    short, centre, long = (
        interface_wavevector(metal, dielectric, x).real
        for x in (wavelength - delta, wavelength, wavelength + delta)
    )
    # Re k must fall monotonically with wavelength across the stencil
    if not (short > centre > long):
        raise StencilError(
            f"Re k is not monotonic over {wavelength} +- {delta} nm "
            f"({short:.6g}, {centre:.6g}, {long:.6g}); shrink delta",
        )
    v_g = (vacuum_wavevector(wavelength - delta) - vacuum_wavevector(wavelength + delta)) / (
        short - long
    )
    LOGGER.debug("v_g at %s nm: %.6g c", wavelength, v_g)
    return v_g


def propagation_length(k: complex) -> float:
    """Intensity 1/e length 1 / (2 Im k) in um."""
    if not k.imag > 0:
        raise LosslessModeError(f"Im k = {k.imag} gives no finite propagation length")
    return 1.0 / (2.0 * k.imag)


def spp_point(
    metal: Medium,
    dielectric: Medium,
    wavelength: float,
    delta: float = DEFAULT_DELTA_NM,
) -> SppPoint:
    """Wavevector, group velocity and propagation length at one wavelength."""
    k = interface_wavevector(metal, dielectric, wavelength)
    try:
        l_prop = propagation_length(k)
    except LosslessModeError:
        l_prop = math.inf
    return SppPoint(
        energy=photon_energy(wavelength),
        k=k,
        v_g=group_velocity(metal, dielectric, wavelength, delta),
        l_prop=l_prop,
    )


def fold_wavevector(k: float, period: float) -> float:
    """Reduce k into the first Brillouin zone [0, G/2] of a lattice with `period` nm."""
    g = 2.0 * math.pi * NM_PER_UM / period
    reduced = abs(k) % g
    if reduced > g / 2.0:
        reduced = g - reduced
    return reduced


def band_structure(spec: HoleArraySpec, energy_grid: Sequence[float]) -> list[BandPoint]:
    """
    Folded SPP dispersion along Gamma-X for a square hole array.

    Branch j couples through the (., j) reciprocal vectors: its in-plane component
    along Gamma-X is sqrt(Re k^2 - (j G)^2), folded into the first zone. Branches
    with j G > Re k do not exist at that energy.
    """
    g = spec.reciprocal_vector
    points = []
    for energy in sorted(energy_grid):
        wavelength = HC_EV_NM / energy
        k = interface_wavevector(spec.metal, spec.dielectric, wavelength)
        eps_d = permittivity(spec.dielectric, wavelength)
        k_real = k.real
        branches = tuple(
            (j, fold_wavevector(math.sqrt(k_real**2 - (j * g) ** 2), spec.period))
            for j in range(spec.max_order + 1)
            if k_real >= j * g
        )
        points.append(
            BandPoint(
                energy=energy,
                k_spp=k,
                branches=branches,
                light_line=vacuum_wavevector(wavelength) * math.sqrt(max(eps_d.real, 0.0)),
            ),
        )
    LOGGER.debug("Band structure over %d energies", len(points))
    return points


def resonance_orders(max_order: int) -> list[tuple[int, int]]:
    """Orders (i, j), i >= j >= 0, with 1 <= i^2 + j^2 <= max_order^2."""
    return [
        (i, j)
        for i in range(max_order + 1)
        for j in range(i + 1)
        if 1 <= i * i + j * j <= max_order**2
    ]


def eot_resonances(
    spec: HoleArraySpec,
    search_range: tuple[float, float] = DEFAULT_SEARCH_RANGE_NM,
    scan_step: float = DEFAULT_SCAN_STEP_NM,
    xtol: float = DEFAULT_ROOT_XTOL_NM,
) -> list[Resonance]:
    """
    Wavelengths where Re k_spp matches a reciprocal lattice vector |G_ij|.

    Brackets come from a scan on a `scan_step` grid; each is refined with Brent's
    method. Orders without a sign change in the range are skipped.
    """
    low, high = search_range
    if not 0 < low < high:
        raise ChannelError(f"Search range must satisfy 0 < low < high, not {search_range}")
    n_steps = max(1, math.ceil((high - low) / scan_step))
    grid = np.linspace(low, high, n_steps + 1)
    k_real = np.array(
        [interface_wavevector(spec.metal, spec.dielectric, x).real for x in grid],
    )

    def mismatch(wavelength: float, target: float) -> float:
        return interface_wavevector(spec.metal, spec.dielectric, wavelength).real - target

    resonances = []
    for order in resonance_orders(spec.max_order):
        target = spec.reciprocal_vector * math.hypot(*order)
        values = k_real - target
        roots: list[float] = []
        for i in range(len(grid) - 1):
            if values[i] == 0:
                roots.append(float(grid[i]))
            elif values[i] * values[i + 1] < 0:
                solution = root_scalar(
                    mismatch,
                    args=(target,),
                    bracket=(grid[i], grid[i + 1]),
                    method="brentq",
                    xtol=xtol,
                )
                roots.append(float(solution.root))
        if values[-1] == 0:
            roots.append(float(grid[-1]))
        if not roots:
            LOGGER.debug("Order %s has no resonance in %s nm", order, search_range)
        resonances.extend(Resonance(order, root) for root in roots)
    resonances.sort(key=lambda r: (r.wavelength, r.order))
    LOGGER.debug("Found %d EOT resonances in %s nm", len(resonances), search_range)
    return resonances


def timescales(v_g: float, hop_distance: float, absorption_length: float) -> Timescales:
    """Hop time between diagonal holes and the absorption times T1 and T2 = 2 T1."""
    for name, value in (
        ("v_g", v_g),
        ("hop_distance", hop_distance),
        ("absorption_length", absorption_length),
    ):
        if not value > 0:
            raise ChannelError(f"{name} must be > 0, not {value}")
    speed = v_g * SPEED_OF_LIGHT_UM_PER_FS
    t1 = absorption_length / speed
    return Timescales(t_p=hop_distance / speed, t1=t1, t2=2.0 * t1)


def total_dephasing_time(t1: float, t2_star: float) -> float:
    """Total coherence time from 1/T2 = 1/(2 T1) + 1/T2*."""
    if not (t1 > 0 and t2_star > 0):
        raise ChannelError(f"T1 and T2* must be > 0, not {t1} and {t2_star}")
    return 1.0 / (1.0 / (2.0 * t1) + 1.0 / t2_star)
