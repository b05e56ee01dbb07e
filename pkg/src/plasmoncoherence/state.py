"""
Two-photon polarization state and the decoherence channel acting on it.

The pair is prepared as (|HH> + exp(i dphi_c)|VV>)/sqrt(2). One photon crosses a
lossy plasmonic channel which transmits H and V with complex amplitudes h and v and
leaves the environment in |E_H> or |E_V> depending on the polarization. Only pairs
where both photons survive are counted, so every probability here is conditioned on
survival (the state is renormalized by |h|^2 + |v|^2).

Basis ordering for two-photon operators is |HH>, |HV>, |VH>, |VV>. A polarizer at
angle a (from vertical) projects onto cos(a)|V> + sin(a)|H>.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from plasmoncoherence import (
    HERMITIAN_TOLERANCE,
    PSD_TOLERANCE,
    TRACE_TOLERANCE,
)

from .errors import ChannelError

LOGGER = logging.getLogger(__name__)

HH, HV, VH, VV = 0, 1, 2, 3

# Passive channel amplitudes may exceed 1 by rounding only
AMPLITUDE_SLACK = 1e-12

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class ChannelParams:
    """Transmission amplitudes, setup phase and environment overlap of the channel."""

    h: complex = 1.0
    v: complex = 1.0
    delta_phi_c: float = 0.0
    env_overlap: complex = 1.0

    def __post_init__(self) -> None:
        """Check the channel is physical."""
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "v", complex(self.v))
        object.__setattr__(self, "env_overlap", complex(self.env_overlap))
        self.validate()

    def validate(self) -> None:
        """Raise ChannelError unless the channel invariants hold."""
        values = (self.h, self.v, self.env_overlap, complex(self.delta_phi_c))
        if not all(cmath.isfinite(x) for x in values):
            raise ChannelError(f"Channel parameters must be finite: {self}")
        if abs(self.env_overlap) > 1.0 + AMPLITUDE_SLACK:
            raise ChannelError(
                f"Environment overlap must satisfy |<E_V|E_H>| <= 1, "
                f"not {abs(self.env_overlap)}",
            )
        if abs(self.h) == 0 and abs(self.v) == 0:
            raise ChannelError("At least one of h, v must be nonzero")
        if abs(self.h) > 1.0 + AMPLITUDE_SLACK or abs(self.v) > 1.0 + AMPLITUDE_SLACK:
            raise ChannelError(
                f"A passive channel needs |h| <= 1 and |v| <= 1, "
                f"not |h|={abs(self.h)}, |v|={abs(self.v)}",
            )

    @property
    def delta_phi_e(self) -> float:
        """Phase of the environment overlap <E_V|E_H>."""
        return cmath.phase(self.env_overlap)

    @property
    def delta_phi(self) -> float:
        """Phase of v/h (zero when either amplitude vanishes)."""
        if self.h == 0 or self.v == 0:
            return 0.0
        return cmath.phase(self.v / self.h)

    @property
    def norm(self) -> float:
        """Survival weight |h|^2 + |v|^2 used to renormalize the state."""
        return abs(self.h) ** 2 + abs(self.v) ** 2


@dataclass(frozen=True)
class PolarizerPair:
    """Analyzer angles of both photons, in radians from the vertical axis."""

    alpha: float
    beta: float

    def __post_init__(self) -> None:
        """Angles must be finite."""
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ChannelError(f"Polarizer angles must be finite: {self}")

    @classmethod
    def from_degrees(cls, alpha_deg: float, beta_deg: float) -> PolarizerPair:
        """Build a pair from angles in degrees."""
        return cls(math.radians(alpha_deg), math.radians(beta_deg))

    def canonical(self) -> PolarizerPair:
        """Reduce both angles modulo pi; a polarizer does not tell a from a + pi."""
        return PolarizerPair(self.alpha % math.pi, self.beta % math.pi)

    @property
    def degrees(self) -> tuple[float, float]:
        """Both angles in degrees."""
        return math.degrees(self.alpha), math.degrees(self.beta)

    def projector_vector(self) -> np.ndarray:
        """Product state |alpha> (x) |beta> in the two-photon basis."""
        return np.kron(polarizer_vector(self.alpha), polarizer_vector(self.beta))


@dataclass(frozen=True)
class TwoQubitDensityMatrix:
    """A validated 4x4 density matrix in the |HH>, |HV>, |VH>, |VV> basis."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        """Freeze a private copy and check it is a physical state."""
        rho = np.array(self.matrix, dtype=complex, copy=True)
        if rho.shape != (4, 4):
            raise ChannelError(f"Density matrix must be 4x4, not {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOLERANCE:
            raise ChannelError("Density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > TRACE_TOLERANCE:
            raise ChannelError(f"Density matrix trace is {np.trace(rho)}, not 1")
        if np.min(np.linalg.eigvalsh(rho)) < PSD_TOLERANCE:
            raise ChannelError("Density matrix is not positive semidefinite")
        rho.setflags(write=False)
        object.__setattr__(self, "matrix", rho)

    def __getitem__(self, index: tuple[int, int]) -> complex:
        """Return one matrix element."""
        return complex(self.matrix[index])

    def purity(self) -> float:
        """Tr(rho^2); one for a pure state."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def expectation(self, operator: np.ndarray) -> float:
        """Real part of Tr(rho O)."""
        return float(np.real(np.trace(self.matrix @ operator)))

    def probability(self, setting: PolarizerPair) -> float:
        """Projection probability <alpha,beta| rho |alpha,beta>."""
        vec = setting.projector_vector()
        return float(np.real(vec.conj() @ self.matrix @ vec))


def polarizer_vector(angle: float) -> np.ndarray:
    """Single-photon state transmitted by a polarizer, in the (|H>, |V>) basis."""
    return np.array([math.sin(angle), math.cos(angle)], dtype=complex)


def initial_state(delta_phi_c: float) -> TwoQubitDensityMatrix:
    """Density matrix of (|HH> + exp(i delta_phi_c)|VV>)/sqrt(2)."""
    psi = np.zeros(4, dtype=complex)
    psi[HH] = 1.0 / math.sqrt(2.0)
    psi[VV] = cmath.exp(1j * delta_phi_c) / math.sqrt(2.0)
    return TwoQubitDensityMatrix(np.outer(psi, psi.conj()))


def reduced_density_matrix(
    channel: ChannelParams,
    delta_phi_c: float,
) -> TwoQubitDensityMatrix:
    """
    Post-selected two-photon state after the channel, environment traced out.

    Tracing |E_H><E_V| over the environment leaves <E_V|E_H>, so the coherence
    between |HH> and |VV> is h * conj(v exp(i delta_phi_c)) * <E_V|E_H>.
    """
    channel.validate()
    norm = channel.norm
    coherence = (
        channel.h
        * np.conj(channel.v * cmath.exp(1j * delta_phi_c))
        * channel.env_overlap
        / norm
    )
    rho = np.zeros((4, 4), dtype=complex)
    rho[HH, HH] = abs(channel.h) ** 2 / norm
    rho[VV, VV] = abs(channel.v) ** 2 / norm
    rho[HH, VV] = coherence
    rho[VV, HH] = np.conj(coherence)
    return TwoQubitDensityMatrix(rho)


def coincidence_probability(
    channel: ChannelParams,
    delta_phi_c: float,
    setting: PolarizerPair,
) -> float:
    """
    Closed-form probability of a coincidence count for one polarizer setting.

    P = [sin^2 a sin^2 b + r^2 cos^2 a cos^2 b
         + 1/2 sin 2a sin 2b r |<E_V|E_H>| cos(dphi_E - dphi - dphi_c)] / (1 + r^2)

    with r = |v|/|h|. A channel that blocks H entirely has no ratio form, so it is
    evaluated through the reduced density matrix instead.
    """
    if abs(channel.h) == 0:
        LOGGER.debug("h = 0, using the density matrix for %s", channel)
        return reduced_density_matrix(channel, delta_phi_c).probability(setting)

    a, b = setting.alpha, setting.beta
    ratio = abs(channel.v) / abs(channel.h)
    interference = (
        0.5
        * math.sin(2 * a)
        * math.sin(2 * b)
        * ratio
        * abs(channel.env_overlap)
        * math.cos(channel.delta_phi_e - channel.delta_phi - delta_phi_c)
    )
    classical = (math.sin(a) * math.sin(b)) ** 2 + (
        ratio * math.cos(a) * math.cos(b)
    ) ** 2
    probability = (classical + interference) / (1.0 + ratio**2)
    # Rounding can leave tiny negatives at exact zeros
    return min(max(probability, 0.0), 1.0)


def environment_states(env_overlap: complex) -> tuple[np.ndarray, np.ndarray]:
    """
    Two-dimensional dilation of the environment with the requested overlap.

    |E_H> = (1, 0) and |E_V> = (conj(c), sqrt(1 - |c|^2)) give <E_V|E_H> = c.
    """
    c = complex(env_overlap)
    e_h = np.array([1.0, 0.0], dtype=complex)
    e_v = np.array([np.conj(c), math.sqrt(max(0.0, 1.0 - abs(c) ** 2))], dtype=complex)
    return e_h, e_v


def coincidence_probability_oracle(
    channel: ChannelParams,
    delta_phi_c: float,
    setting: PolarizerPair,
) -> float:
    """
    Brute-force coincidence probability in photon (x) photon (x) environment space.

    Builds the unnormalized 8-dimensional state explicitly, normalizes it, projects
    the photons onto |alpha>|beta> (identity on the environment) and returns the
    squared norm. Independent of the closed form; meant for cross-checks.
    """
    channel.validate()
    e_h, e_v = environment_states(channel.env_overlap)
    ket_h = np.array([1.0, 0.0], dtype=complex)
    ket_v = np.array([0.0, 1.0], dtype=complex)

    psi = channel.h * np.kron(np.kron(ket_h, ket_h), e_h) + channel.v * cmath.exp(
        1j * delta_phi_c,
    ) * np.kron(np.kron(ket_v, ket_v), e_v)
    psi = psi / np.linalg.norm(psi)

    bra = setting.projector_vector().conj()
    projector = np.kron(bra.reshape(1, 4), np.eye(2))
    projected = projector @ psi
    return float(np.real(np.vdot(projected, projected)))


def chsh_max(rho: TwoQubitDensityMatrix) -> float:
    """
    Largest CHSH value reachable with any analyzer settings.

    Built from the correlation matrix T_ij = Tr(rho sigma_i (x) sigma_j): the bound
    is 2 sqrt(t1 + t2) with t1, t2 the two largest eigenvalues of T^T T.
    """
    correlations = np.array(
        [[rho.expectation(np.kron(si, sj)) for sj in PAULI] for si in PAULI],
    )
    eigenvalues = np.sort(np.linalg.eigvalsh(correlations.T @ correlations))
    return float(2.0 * math.sqrt(max(0.0, eigenvalues[-1] + eigenvalues[-2])))
