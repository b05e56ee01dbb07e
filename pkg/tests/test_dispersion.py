"""Tests for SPP dispersion, hole-array folding, EOT and timescales."""

import math

import pytest

from plasmoncoherence import (
    DEFAULT_EPS_REFERENCE,
    DEFAULT_EPS_SILICON,
    HC_EV_NM,
)
from plasmoncoherence.dispersion import (
    HoleArraySpec,
    Timescales,
    band_structure,
    eot_resonances,
    fold_wavevector,
    group_velocity,
    interface_wavevector,
    propagation_length,
    resonance_orders,
    spp_point,
    spp_wavevector,
    timescales,
    total_dephasing_time,
    vacuum_wavevector,
)
from plasmoncoherence.errors import (
    ChannelError,
    LosslessModeError,
    MaterialRangeError,
    ResonanceSingularityError,
    StencilError,
)
from plasmoncoherence.materials import (
    ConstantModel,
    DrudeModel,
    PerfectConductor,
    gold,
    permittivity,
)

WAVELENGTH = 812.0
PERIOD = 850.0


def silicon_array() -> HoleArraySpec:
    """Gold hole array clad with amorphous silicon."""
    return HoleArraySpec(PERIOD, ConstantModel(DEFAULT_EPS_SILICON), gold(), max_order=8)


def test_spp_wavevector_examples() -> None:
    """Test the analytic cases."""
    assert spp_wavevector(-2, 1, 1000.0) == pytest.approx(math.sqrt(2) * 2 * math.pi)
    assert spp_wavevector(-1e6, 1, WAVELENGTH).real == pytest.approx(
        vacuum_wavevector(WAVELENGTH),
        rel=1e-3,
    )
    assert spp_wavevector(complex(-math.inf), 1, WAVELENGTH) == vacuum_wavevector(WAVELENGTH)
    with pytest.raises(ResonanceSingularityError):
        spp_wavevector(-1, 1, WAVELENGTH)


def test_spp_wavevector_branch() -> None:
    """Test that the forward, decaying branch is returned."""
    # Silicon only binds a mode where Re eps_gold < -15.5
    cases = (
        (600.0, 1.0),
        (812.0, 1.0),
        (1200.0, 1.0),
        (812.0, DEFAULT_EPS_SILICON),
        (1200.0, DEFAULT_EPS_SILICON),
    )
    for wavelength, eps_d in cases:
        k = interface_wavevector(gold(), eps_d, wavelength)
        assert k.real > 0
        assert k.imag >= 0
        assert k.real > vacuum_wavevector(wavelength) * math.sqrt(eps_d)


def test_wavevector_grows_towards_resonance() -> None:
    """Test that Re k diverges as eps_m approaches -eps_d from below."""
    values = [spp_wavevector(eps_m, 1.0, WAVELENGTH).real for eps_m in (-3, -1.5, -1.1, -1.01)]
    assert all(later > earlier for earlier, later in zip(values, values[1:], strict=False))


def test_group_velocity_vanishes_towards_resonance() -> None:
    """Test that v_g falls monotonically to zero as eps_m approaches -eps_d."""
    # Lossless Drude metal with eps_m = -1 at 1000 nm, more negative at longer wavelengths
    metal = DrudeModel(eps_inf=1.0, omega_p=math.sqrt(2) * HC_EV_NM / 1000.0, gamma=0.0)
    wavelengths = (2000.0, 1500.0, 1200.0, 1100.0, 1050.0, 1020.0, 1010.0)
    v_g = [group_velocity(metal, 1.0, x, delta=0.1) for x in wavelengths]
    assert all(later < earlier for earlier, later in zip(v_g, v_g[1:], strict=False))
    assert v_g[0] == pytest.approx(0.778, rel=0.01)
    assert 0 < v_g[-1] < 0.005


def test_silicon_to_air_wavevector_ratio() -> None:
    """Test the roughly six-fold wavevector increase under silicon."""
    air = interface_wavevector(gold(), 1.0, WAVELENGTH)
    silicon = interface_wavevector(gold(), DEFAULT_EPS_SILICON, WAVELENGTH)
    assert silicon.real / air.real == pytest.approx(6.0, rel=0.25)


def test_group_velocities() -> None:
    """Test group velocities of the air, silicon and silica-reference interfaces."""
    air = group_velocity(gold(), 1.0, WAVELENGTH)
    silicon = group_velocity(gold(), DEFAULT_EPS_SILICON, WAVELENGTH)
    reference = group_velocity(gold(), DEFAULT_EPS_REFERENCE, WAVELENGTH)
    assert 0.85 < air < 1.0
    assert silicon == pytest.approx(0.05, rel=0.3)
    assert reference == pytest.approx(0.59, rel=0.1)
    assert reference / silicon == pytest.approx(11.8, rel=0.15)
    assert group_velocity(PerfectConductor(), 1.0, WAVELENGTH) == pytest.approx(1.0, rel=5e-3)


def test_group_velocity_converges() -> None:
    """Test that halving the stencil changes v_g by less than one percent."""
    coarse = group_velocity(gold(), DEFAULT_EPS_SILICON, WAVELENGTH, delta=1.0)
    fine = group_velocity(gold(), DEFAULT_EPS_SILICON, WAVELENGTH, delta=0.5)
    assert fine == pytest.approx(coarse, rel=0.01)


def test_group_velocity_stencil_failure() -> None:
    """Test a stencil straddling the surface plasmon resonance."""
    # Lossless Drude metal with eps_m = -1 at exactly 1000 nm
    metal = DrudeModel(eps_inf=1.0, omega_p=math.sqrt(2) * HC_EV_NM / 1000.0, gamma=0.0)
    with pytest.raises(StencilError, match="shrink delta"):
        group_velocity(metal, 1.0, 1000.5, delta=1.0)
    with pytest.raises(ChannelError, match="delta"):
        group_velocity(gold(), 1.0, WAVELENGTH, delta=0.0)


def test_propagation_length() -> None:
    """Test the 1/e intensity length."""
    assert propagation_length(complex(10, 2.5)) == pytest.approx(0.2)
    assert propagation_length(complex(10, 0.05)) == pytest.approx(10.0)
    with pytest.raises(LosslessModeError):
        propagation_length(complex(10, 0))
    silicon = interface_wavevector(gold(), DEFAULT_EPS_SILICON, WAVELENGTH)
    assert propagation_length(silicon) <= 0.3


def test_spp_point() -> None:
    """Test the bundled dispersion sample."""
    point = spp_point(gold(), DEFAULT_EPS_SILICON, WAVELENGTH)
    assert point.energy == pytest.approx(HC_EV_NM / WAVELENGTH)
    assert point.k == interface_wavevector(gold(), DEFAULT_EPS_SILICON, WAVELENGTH)
    assert 0 < point.v_g < 1
    assert point.l_prop > 0
    assert spp_point(PerfectConductor(), 1.0, WAVELENGTH).l_prop == math.inf


def test_fold_wavevector() -> None:
    """Test folding into the first Brillouin zone."""
    g = 2 * math.pi * 1000 / PERIOD
    assert fold_wavevector(1.3 * g, PERIOD) == pytest.approx(0.3 * g)
    assert fold_wavevector(0.7 * g, PERIOD) == pytest.approx(0.3 * g)
    assert fold_wavevector(-0.2 * g, PERIOD) == pytest.approx(0.2 * g)
    for k in (0.0, 3.3, 17.9, 49.2, 0.5 * g):
        folded = fold_wavevector(k, PERIOD)
        assert 0 <= folded <= g / 2
        assert fold_wavevector(folded, PERIOD) == folded


def test_band_structure_empty_lattice() -> None:
    """Test that a perfect conductor folds the light line exactly."""
    spec = HoleArraySpec(PERIOD, ConstantModel(1.0), PerfectConductor(), max_order=3)
    g = spec.reciprocal_vector
    energies = [1.8, 1.2, 1.5]
    points = band_structure(spec, energies)
    assert [p.energy for p in points] == sorted(energies)
    for point in points:
        k0 = vacuum_wavevector(HC_EV_NM / point.energy)
        assert point.light_line == pytest.approx(k0)
        branches = dict(point.branches)
        assert branches[0] == pytest.approx(fold_wavevector(k0, PERIOD))
        for j, folded in branches.items():
            assert folded == pytest.approx(fold_wavevector(math.sqrt(k0**2 - (j * g) ** 2), PERIOD))
        assert all(j * g <= k0 for j in branches)


def test_band_structure_silicon() -> None:
    """Test the SPP branch far from the light line at the working wavelength."""
    energy = HC_EV_NM / WAVELENGTH
    (point,) = band_structure(silicon_array(), [energy])
    k0 = vacuum_wavevector(WAVELENGTH)
    assert point.k_spp.real - k0 > 3 * k0
    assert point.light_line == pytest.approx(k0 * math.sqrt(DEFAULT_EPS_SILICON))
    assert len(band_structure(silicon_array(), [1.2, 1.4, 1.6, 1.8])) == 4


def test_resonance_orders() -> None:
    """Test the order enumeration."""
    assert resonance_orders(1) == [(1, 0)]
    assert resonance_orders(2) == [(1, 0), (1, 1), (2, 0)]
    assert all(1 <= i * i + j * j <= 64 and i >= j >= 0 for i, j in resonance_orders(8))


def test_eot_resonances_perfect_conductor() -> None:
    """Test the analytic resonances of a perfect-conductor array."""
    spec = HoleArraySpec(PERIOD, ConstantModel(1.0), PerfectConductor(), max_order=2)
    resonances = {r.order: r.wavelength for r in eot_resonances(spec, (500.0, 1000.0))}
    assert resonances[(1, 0)] == pytest.approx(850.0, abs=0.01)
    assert resonances[(1, 1)] == pytest.approx(601.04, abs=0.01)
    assert (2, 0) not in resonances
    with pytest.raises(ChannelError, match="Search range"):
        eot_resonances(spec, (900.0, 800.0))


def test_eot_resonances_silicon() -> None:
    """Test that the gold/silicon array resonates near 812 nm and every root is valid."""
    spec = silicon_array()
    resonances = eot_resonances(spec, (750.0, 950.0))
    assert any(abs(r.wavelength - WAVELENGTH) <= 40 for r in resonances)
    assert [r.wavelength for r in resonances] == sorted(r.wavelength for r in resonances)
    for resonance in resonances:
        target = spec.reciprocal_vector * math.hypot(*resonance.order)
        k = interface_wavevector(spec.metal, spec.dielectric, resonance.wavelength).real
        assert abs(k - target) / target < 1e-6


def test_hole_array_validation() -> None:
    """Test the hole array invariants."""
    with pytest.raises(ChannelError, match="period"):
        HoleArraySpec(0.0, ConstantModel(1.0), gold())
    with pytest.raises(ChannelError, match="max_order"):
        HoleArraySpec(PERIOD, ConstantModel(1.0), gold(), max_order=0)


def test_timescales() -> None:
    """Test the hop and absorption times."""
    assert timescales(0.05, 1.2, 0.15).t_p == pytest.approx(80.0, rel=0.01)
    scales = timescales(0.05, 1.2, 0.15)
    assert scales.t2 == pytest.approx(20.0, rel=0.01)
    assert scales.t2 == 2 * scales.t1
    assert timescales(1.0, 0.299792458, 0.15).t_p == pytest.approx(1.0)
    for length in (0.05, 0.1, 0.2):
        assert timescales(0.05, 1.2, length).t2 <= 26.7
    with pytest.raises(ChannelError, match="v_g"):
        timescales(0.0, 1.2, 0.15)
    with pytest.raises(ChannelError, match="2 T1"):
        Timescales(t_p=80.0, t1=10.0, t2=21.0)


def test_total_dephasing_time() -> None:
    """Test 1/T2 = 1/(2 T1) + 1/T2*."""
    assert total_dephasing_time(10.0, math.inf) == pytest.approx(20.0)
    assert total_dephasing_time(10.0, 20.0) == pytest.approx(10.0)
    with pytest.raises(ChannelError):
        total_dephasing_time(0.0, 20.0)


def test_permittivity_range_propagates() -> None:
    """Test that leaving the gold table raises with the wavelength."""
    spec = HoleArraySpec(PERIOD, ConstantModel(1.0), gold())
    with pytest.raises(MaterialRangeError, match="outside") as error:
        band_structure(spec, [0.5])
    assert error.value.wavelength == pytest.approx(HC_EV_NM / 0.5)
    assert permittivity(gold(), 812.0).real < 0
