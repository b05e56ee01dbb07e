"""Tests for permittivity models and optical-constant tables."""

import math
from pathlib import Path

import pytest

from plasmoncoherence import (
    HBAR_EV_FS,
    HC_EV_NM,
    SPEED_OF_LIGHT_UM_PER_FS,
    MaterialKind,
)
from plasmoncoherence.errors import ChannelError, MaterialRangeError, SchemaError
from plasmoncoherence.materials import (
    ConstantModel,
    DrudeModel,
    PerfectConductor,
    TabulatedModel,
    gold,
    gold_drude,
    load_optical_constants,
    permittivity,
)


def test_drude_permittivity() -> None:
    """Test lossless and lossy Drude arithmetic."""
    lossless = DrudeModel(eps_inf=1.0, omega_p=2.0, gamma=0.0)
    assert permittivity(lossless, HC_EV_NM) == pytest.approx(-3.0)
    lossy = DrudeModel(eps_inf=1.0, omega_p=2.0, gamma=0.1)
    assert permittivity(lossy, HC_EV_NM).imag > 0
    assert lossy.kind == MaterialKind.DRUDE
    with pytest.raises(ChannelError, match="omega_p"):
        DrudeModel(eps_inf=1.0, omega_p=0.0, gamma=0.0)
    with pytest.raises(ChannelError, match="gamma"):
        DrudeModel(eps_inf=1.0, omega_p=1.0, gamma=-1.0)


def test_tabulated_permittivity() -> None:
    """Test exact rows and linear interpolation."""
    table = TabulatedModel.from_rows([(700.0, 3.6, 0.0), (900.0, 3.4, 0.2)])
    assert permittivity(table, 700.0) == pytest.approx(12.96)
    assert permittivity(table, 800.0) == pytest.approx(complex(3.5, 0.1) ** 2)
    with pytest.raises(MaterialRangeError, match="outside") as error:
        permittivity(table, 950.0)
    assert error.value.wavelength == 950.0


def test_tabulated_validation() -> None:
    """Test the table invariants."""
    with pytest.raises(SchemaError, match="strictly increasing"):
        TabulatedModel.from_rows([(700.0, 1.0, 0.0), (700.0, 1.0, 0.0)])
    with pytest.raises(SchemaError, match="at least"):
        TabulatedModel.from_rows([(700.0, 1.0, 0.0)])
    with pytest.raises(SchemaError, match="negative"):
        TabulatedModel.from_rows([(700.0, 1.0, -0.1), (800.0, 1.0, 0.0)])


def test_constant_and_perfect_conductor() -> None:
    """Test the dispersionless models."""
    assert permittivity(ConstantModel(15.5), 812.0) == 15.5
    assert permittivity(PerfectConductor(), 812.0).real == -math.inf
    with pytest.raises(ChannelError, match="finite"):
        ConstantModel(math.nan)
    with pytest.raises(ChannelError, match="Wavelength"):
        permittivity(ConstantModel(1.0), 0.0)


def test_bundled_gold() -> None:
    """Test the bundled gold table near 812 nm."""
    eps = permittivity(gold(), 812.0)
    assert eps.real == pytest.approx(-24.0, rel=0.2)
    assert eps.imag > 0
    assert gold() is gold()
    low, high = gold().wavelength_range
    assert low < 620 and high > 1240  # noqa: PT018
    assert permittivity(gold_drude(), 812.0).real == pytest.approx(-24.0, rel=0.2)


def test_load_optical_constants(tmp_path: Path) -> None:
    """Test reading a table file and rejecting a bad header."""
    good = tmp_path / "silicon.csv"
    good.write_text("wavelength_nm,n,k\n700,3.7,0.01\n900,3.6,0.0\n", encoding="utf-8")
    model = load_optical_constants(good)
    assert model.name == "silicon"
    assert permittivity(model, 900.0) == pytest.approx(12.96)

    bad = tmp_path / "bad.csv"
    bad.write_text("lambda,n,k\n700,3.7,0.01\n", encoding="utf-8")
    with pytest.raises(SchemaError, match="expected header"):
        load_optical_constants(bad)

    garbled = tmp_path / "garbled.csv"
    garbled.write_text("wavelength_nm,n,k\n700,3.7,x\n", encoding="utf-8")
    with pytest.raises(SchemaError, match=":2:"):
        load_optical_constants(garbled)


def test_physical_constants() -> None:
    """Test the unit conversions derived from CODATA values."""
    assert HC_EV_NM == pytest.approx(1239.842, abs=1e-3)
    assert HBAR_EV_FS == pytest.approx(0.6582119569, rel=1e-9)
    assert SPEED_OF_LIGHT_UM_PER_FS == pytest.approx(0.299792458, rel=1e-12)
