"""Recovering visibility, Bell parameter and dephasing bounds from coincidence data."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import curve_fit

from plasmoncoherence import (
    DEFAULT_BELL_K,
    DEFAULT_CHSH_ANGLES,
    DEFAULT_REDUNDANT_BETA,
    DEFAULT_VISIBILITY_BETA,
    HBAR_EV_FS,
    HC_EV_NM,
)

from .counting import CountRecord
from .errors import (
    ChannelError,
    DataError,
    DegenerateInputError,
    FitError,
    InsufficientDataError,
    InvalidFitError,
    NoBoundError,
    UndefinedCorrelationError,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

LOGGER = logging.getLogger(__name__)

MIN_FRINGE_POINTS = 4
FIT_PARAMETERS = 3
CHSH_RECORDS = 4
MAX_VISIBILITY = 1.2
MIN_PEAK_SAMPLES = 8
ANGLE_TOLERANCE_DEG = 1e-6
REDUNDANCY_SIGMAS = 3.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class FringeFit:
    """Weighted fit of N(alpha) = c0 + c1 cos 2alpha + c2 sin 2alpha at fixed beta."""

    c0: float
    c1: float
    c2: float
    covariance: np.ndarray = field(repr=False)
    chi2: float
    n_points: int
    beta: float = 0.0

    @property
    def amplitude(self) -> float:
        """Fringe amplitude sqrt(c1^2 + c2^2)."""
        return math.hypot(self.c1, self.c2)

    @property
    def phase(self) -> float:
        """Angle 2alpha (radians) at which the fringe peaks."""
        return math.atan2(self.c2, self.c1)

    def model(self, alpha_deg: float | np.ndarray) -> float | np.ndarray:
        """Fitted counts at the given alpha (degrees)."""
        two_alpha = 2.0 * np.radians(alpha_deg)
        return self.c0 + self.c1 * np.cos(two_alpha) + self.c2 * np.sin(two_alpha)


@dataclass(frozen=True)
class VisibilityEstimate:
    """Fringe visibility with its standard error."""

    v: float
    sigma_v: float
    beta_fixed: float


@dataclass(frozen=True)
class ChshResult:
    """Four correlation values and the CHSH combination S built from them."""

    e_values: tuple[float, float, float, float]
    sigma_e: tuple[float, float, float, float]
    s: float
    sigma_s: float
    angles: tuple[float, float, float, float]
    bell_violation: bool
    k: float = DEFAULT_BELL_K


@dataclass(frozen=True)
class RedundancyCheck:
    """Agreement of two visibilities that should be identical."""

    difference: float
    combined_sigma: float
    consistent: bool


@dataclass(frozen=True)
class DephasingBound:
    """Lower bounds on the pure dephasing time T2*."""

    model_bound_fs: float
    order_of_magnitude_fs: float
    v_low: float
    t_p_fs: float


@dataclass(frozen=True)
class LorentzianFit:
    """Resonance fitted in energy space."""

    amplitude: float
    center_ev: float
    gamma_ev: float
    offset: float

    @property
    def lifetime_fs(self) -> float:
        """tau = hbar / Gamma."""
        return HBAR_EV_FS / self.gamma_ev


@dataclass(frozen=True)
class Analysis:
    """Everything estimated from one set of count records."""

    fits: dict[float, FringeFit]
    visibilities: dict[float, VisibilityEstimate]
    primary: VisibilityEstimate
    chsh: ChshResult
    redundancy: RedundancyCheck | None


def _same_angle(x: float, y: float, period: float = 180.0) -> bool:
    """True when x and y describe the same polarizer axis."""
    diff = (x - y) % period
    return min(diff, period - diff) < ANGLE_TOLERANCE_DEG


def fit_fringe(records: Sequence[CountRecord]) -> FringeFit:
    """
    Weighted linear least squares of a fringe at fixed beta.

    Poisson weights 1/max(N, 1) keep empty bins from getting infinite weight.
    """
    if not records:
        raise InsufficientDataError("No records to fit")
    beta = records[0].beta
    time = records[0].integration_time
    for record in records:
        if not _same_angle(record.beta, beta, 360.0):
            raise DataError(f"Fringe records mix beta={beta} and beta={record.beta}")
        if record.integration_time != time:
            raise DataError(
                f"Fringe records mix integration times {time} and "
                f"{record.integration_time}",
            )

    alpha = np.radians([r.alpha for r in records])
    counts = np.array([r.counts for r in records], dtype=float)
    design = np.column_stack(
        [np.ones_like(alpha), np.cos(2 * alpha), np.sin(2 * alpha)],
    )
    weights = 1.0 / np.maximum(counts, 1.0)
    root_w = np.sqrt(weights)
    weighted_design = design * root_w[:, None]

    if np.linalg.matrix_rank(weighted_design) < FIT_PARAMETERS:
        raise DegenerateInputError(
            f"Fringe design matrix at beta={beta} is rank deficient",
        )
    n_distinct = len({round(r.alpha % 360.0, 6) for r in records})
    if n_distinct < MIN_FRINGE_POINTS:
        raise InsufficientDataError(
            f"Need at least {MIN_FRINGE_POINTS} distinct alpha values at "
            f"beta={beta}, got {n_distinct}",
        )

    coefficients, *_ = np.linalg.lstsq(weighted_design, counts * root_w, rcond=None)
    covariance = np.linalg.inv(weighted_design.T @ weighted_design)
    residuals = counts - design @ coefficients
    chi2 = float(np.sum(weights * residuals**2))
    c0, c1, c2 = (float(c) for c in coefficients)
    LOGGER.debug(
        "Fringe at beta=%s: c0=%.6g c1=%.6g c2=%.6g chi2=%.4g over %d points",
        beta,
        c0,
        c1,
        c2,
        chi2,
        len(records),
    )
    return FringeFit(
        c0=c0,
        c1=c1,
        c2=c2,
        covariance=covariance,
        chi2=chi2,
        n_points=len(records),
        beta=beta,
    )


def visibility(fit: FringeFit) -> VisibilityEstimate:
    """V = sqrt(c1^2 + c2^2) / c0, error propagated to first order."""
    if not fit.c0 > 0:
        raise InvalidFitError(f"Fringe offset must be positive, not {fit.c0}")
    amplitude = fit.amplitude
    v = amplitude / fit.c0
    if amplitude > 0:
        gradient = np.array(
            [
                -v / fit.c0,
                fit.c1 / (amplitude * fit.c0),
                fit.c2 / (amplitude * fit.c0),
            ],
        )
        variance = float(gradient @ fit.covariance @ gradient)
    else:
        # Direction of a vanishing amplitude is undefined; take the widest one
        variance = float(np.max(np.linalg.eigvalsh(fit.covariance[1:, 1:]))) / fit.c0**2
    return VisibilityEstimate(
        v=v,
        sigma_v=math.sqrt(max(variance, 0.0)),
        beta_fixed=fit.beta,
    )


def group_by_beta(records: Sequence[CountRecord]) -> dict[float, list[CountRecord]]:
    """Records keyed by beta (degrees, rounded), in input order."""
    groups: dict[float, list[CountRecord]] = {}
    for record in records:
        groups.setdefault(round(record.beta, 6), []).append(record)
    return groups


def chsh_correlation(records: Sequence[CountRecord]) -> tuple[float, float]:
    """
    Correlation E(a, b) from the four settings (a,b), (a+,b), (a,b+), (a+,b+).

    The first record fixes (a, b); a+ and b+ are the orthogonal axes. Records may
    come in any order after that.
    """
    if len(records) != CHSH_RECORDS:
        raise InsufficientDataError(
            f"A CHSH correlation needs {CHSH_RECORDS} records, not {len(records)}",
        )
    a, b = records[0].alpha, records[0].beta
    seen = set()
    signs = []
    for record in records:
        a_parallel = _same_angle(record.alpha, a)
        b_parallel = _same_angle(record.beta, b)
        a_ok = a_parallel or _same_angle(record.alpha, a + 90.0)
        b_ok = b_parallel or _same_angle(record.beta, b + 90.0)
        if not (a_ok and b_ok):
            raise DataError(
                f"Record at ({record.alpha}, {record.beta}) is not part of the "
                f"CHSH quadruple of ({a}, {b})",
            )
        seen.add((a_parallel, b_parallel))
        signs.append(1.0 if a_parallel == b_parallel else -1.0)
    if len(seen) != CHSH_RECORDS:
        raise DataError(f"CHSH records around ({a}, {b}) repeat a setting")

    counts = np.array([r.counts for r in records], dtype=float)
    total = float(np.sum(counts))
    if total == 0:
        raise UndefinedCorrelationError(f"No coincidences around ({a}, {b})")
    sign = np.array(signs)
    e = float(np.sum(sign * counts) / total)
    variance = float(np.sum((sign - e) ** 2 * counts)) / total**2
    return e, math.sqrt(variance)


def chsh_s(
    correlations: Sequence[tuple[float, float]],
    angles: Sequence[float] = DEFAULT_CHSH_ANGLES,
    k: float = DEFAULT_BELL_K,
) -> ChshResult:
    """
    S = E(a1,b1) - E(a1,b2) + E(a2,b1) + E(a2,b2).

    Correlations are given in that order. A violation is flagged when S exceeds the
    local bound 2 by more than k standard errors.
    """
    if len(correlations) != CHSH_RECORDS:
        raise InsufficientDataError(
            f"S needs {CHSH_RECORDS} correlations, not {len(correlations)}",
        )
    e_values = tuple(float(e) for e, _ in correlations)
    sigmas = tuple(float(sigma) for _, sigma in correlations)
    s = e_values[0] - e_values[1] + e_values[2] + e_values[3]
    sigma_s = math.sqrt(sum(sigma**2 for sigma in sigmas))
    if abs(s) > TSIRELSON_BOUND + 3.0 * sigma_s + 1e-9:
        LOGGER.warning(
            "S=%.6g exceeds the quantum bound by more than 3 sigma (sigma_S=%.3g)",
            s,
            sigma_s,
        )
    return ChshResult(
        e_values=e_values,  # type: ignore[arg-type]
        sigma_e=sigmas,  # type: ignore[arg-type]
        s=s,
        sigma_s=sigma_s,
        angles=tuple(float(x) for x in angles),  # type: ignore[arg-type]
        bell_violation=s - 2.0 > k * sigma_s,
        k=k,
    )


def chsh_from_records(
    records: Sequence[CountRecord],
    angles: Sequence[float] = DEFAULT_CHSH_ANGLES,
    k: float = DEFAULT_BELL_K,
) -> ChshResult:
    """Find the 16 CHSH settings among `records` and compute S."""
    merged: dict[tuple[float, float], tuple[CountRecord, int]] = {}
    for record in records:
        key = (round(record.alpha % 360.0, 6), round(record.beta % 360.0, 6))
        previous = merged.get(key)
        total = record.counts + (previous[1] if previous else 0)
        merged[key] = (record, total)

    def find(alpha: float, beta: float) -> CountRecord:
        entry = merged.get((round(alpha % 360.0, 6), round(beta % 360.0, 6)))
        if entry is None:
            raise InsufficientDataError(
                f"No record at CHSH setting alpha={alpha}, beta={beta}",
            )
        record, total = entry
        return CountRecord(record.alpha, record.beta, record.integration_time, total)

    a1, a2, b1, b2 = angles
    correlations = [
        chsh_correlation(
            [
                find(a, b),
                find(a + 90.0, b),
                find(a, b + 90.0),
                find(a + 90.0, b + 90.0),
            ],
        )
        for a, b in ((a1, b1), (a1, b2), (a2, b1), (a2, b2))
    ]
    return chsh_s(correlations, angles, k)


def visibility_redundancy(
    first: VisibilityEstimate,
    second: VisibilityEstimate,
    n_sigma: float = REDUNDANCY_SIGMAS,
) -> RedundancyCheck:
    """Check two visibilities that should agree, e.g. from beta=45 and beta=135."""
    difference = first.v - second.v
    combined = math.hypot(first.sigma_v, second.sigma_v)
    return RedundancyCheck(
        difference=difference,
        combined_sigma=combined,
        consistent=abs(difference) <= n_sigma * combined,
    )


def dephasing_bound(
    v: VisibilityEstimate,
    t_p: float,
    n_sigma: float,
) -> DephasingBound:
    """
    Lower bound on T2* from a visibility measured after a propagation time t_p (fs).

    Assumes the overlap decays as exp(-t_p / T2*). A visibility consistent with one
    gives no finite bound (infinity). The order-of-magnitude bound is t_p rounded
    to its power of ten: no decoherence seen over t_p means T2* is at least that.
    """
    if not t_p > 0:
        raise ChannelError(f"Propagation time must be > 0, not {t_p}")
    if not 0.0 <= v.v <= MAX_VISIBILITY:
        raise ChannelError(f"Visibility must be in [0, {MAX_VISIBILITY}], not {v.v}")
    v_low = v.v - n_sigma * v.sigma_v
    if v_low <= 0:
        raise NoBoundError(
            f"V - {n_sigma} sigma = {v_low:.4g} <= 0; no dephasing bound derivable",
        )
    model_bound = math.inf if v_low >= 1.0 else t_p / (-math.log(v_low))
    order = 10.0 ** round(math.log10(t_p))
    LOGGER.debug("Dephasing bound: V_low=%.6g -> T2* >= %.6g fs", v_low, model_bound)
    return DephasingBound(
        model_bound_fs=model_bound,
        order_of_magnitude_fs=order,
        v_low=v_low,
        t_p_fs=t_p,
    )


def lorentzian(
    energy: np.ndarray,
    amplitude: float,
    center: float,
    gamma: float,
    offset: float,
) -> np.ndarray:
    """A (gamma/2)^2 / ((E - E0)^2 + (gamma/2)^2) + B."""
    half = (gamma / 2.0) ** 2
    return amplitude * half / ((energy - center) ** 2 + half) + offset


def fit_lorentzian(spectrum: Sequence[tuple[float, float]]) -> LorentzianFit:
    """Fit a single transmission peak, given as (wavelength nm, transmission) pairs."""
    if len(spectrum) < MIN_PEAK_SAMPLES:
        raise FitError(f"Need at least {MIN_PEAK_SAMPLES} samples, got {len(spectrum)}")
    data = np.array(spectrum, dtype=float)
    energy = HC_EV_NM / data[:, 0]
    order = np.argsort(energy)
    energy = energy[order]
    transmission = data[order, 1]

    peak = int(np.argmax(transmission))
    offset0 = float(np.min(transmission))
    amplitude0 = float(transmission[peak]) - offset0
    if amplitude0 <= 1e-12 * max(1.0, float(np.max(np.abs(transmission)))):
        raise FitError("Spectrum is flat; no peak found")
    if peak in (0, len(energy) - 1):
        raise FitError("Peak sits at the edge of the spectrum")

    above = energy[transmission >= offset0 + amplitude0 / 2.0]
    step = float(np.min(np.diff(energy)))
    gamma0 = max(float(above.max() - above.min()), step)
    center0 = float(energy[peak])
    window = np.count_nonzero(np.abs(energy - center0) <= gamma0)
    if window < MIN_PEAK_SAMPLES:
        raise FitError(
            f"Only {window} samples across the peak; need {MIN_PEAK_SAMPLES}",
        )

    try:
        params, _ = curve_fit(
            lorentzian,
            energy,
            transmission,
            p0=[amplitude0, center0, gamma0, offset0],
            maxfev=10000,
        )
    except (RuntimeError, ValueError) as e:
        raise FitError(f"Lorentzian fit did not converge: {e}") from e
    amplitude, center, gamma, offset = (float(p) for p in params)
    gamma = abs(gamma)
    if not (
        np.all(np.isfinite(params))
        and gamma > 0
        and energy[0] <= center <= energy[-1]
    ):
        raise FitError(f"Lorentzian fit diverged: {params}")
    LOGGER.debug("Lorentzian: E0=%.6g eV, Gamma=%.6g eV", center, gamma)
    return LorentzianFit(
        amplitude=amplitude,
        center_ev=center,
        gamma_ev=gamma,
        offset=offset,
    )


def lorentzian_lifetime(spectrum: Sequence[tuple[float, float]]) -> float:
    """Resonance lifetime hbar/Gamma in fs from a transmission spectrum."""
    return fit_lorentzian(spectrum).lifetime_fs


def analyze(
    records: Sequence[CountRecord],
    beta_list: Sequence[float],
    chsh_angles: Sequence[float] = DEFAULT_CHSH_ANGLES,
    k: float = DEFAULT_BELL_K,
    visibility_beta: float = DEFAULT_VISIBILITY_BETA,
    redundant_beta: float = DEFAULT_REDUNDANT_BETA,
) -> Analysis:
    """Fit every swept beta, then compute visibility, S and the beta redundancy."""
    groups = group_by_beta(records)
    fits: dict[float, FringeFit] = {}
    for beta in beta_list:
        group = groups.get(round(beta, 6))
        if group is None:
            raise InsufficientDataError(f"No fringe records at beta={beta}")
        fits[round(beta, 6)] = fit_fringe(group)
    visibilities = {beta: visibility(fit) for beta, fit in fits.items()}

    primary_key = round(visibility_beta, 6)
    if primary_key not in visibilities:
        raise InsufficientDataError(f"No fringe at beta={visibility_beta} to report")
    redundant_key = round(redundant_beta, 6)
    redundancy = (
        visibility_redundancy(visibilities[primary_key], visibilities[redundant_key])
        if redundant_key in visibilities
        else None
    )
    if redundancy is not None and not redundancy.consistent:
        LOGGER.warning(
            "Visibilities at beta=%s and beta=%s differ by %.3g (%.3g combined sigma)",
            visibility_beta,
            redundant_beta,
            redundancy.difference,
            redundancy.combined_sigma,
        )
    return Analysis(
        fits=fits,
        visibilities=visibilities,
        primary=visibilities[primary_key],
        chsh=chsh_from_records(records, chsh_angles, k),
        redundancy=redundancy,
    )
