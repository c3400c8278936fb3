import math

import pytest

from ogmethane.errors import ConfigurationError, InvalidQuantityError, ZeroProductionError
from ogmethane.units import (
    MethaneIntensity,
    MethaneMass,
    ProductionVolume,
    SourceClass,
    SourceScope,
    convert_gas_volume,
    intensity,
)


def test_mass_unit_conversions():
    assert MethaneMass.from_kt(350).kg == 350e6
    assert MethaneMass.from_mt(2.8).kg == 2.8e9
    assert MethaneMass(1.5e9).mt == 1.5
    assert MethaneMass(2e6).kt == 2.0
    assert (MethaneMass(1.0) + MethaneMass(2.0)).kg == 3.0


@pytest.mark.parametrize("bad", [-1.0, math.nan, math.inf, "x", None])
def test_quantities_reject_invalid(bad):
    with pytest.raises(InvalidQuantityError):
        MethaneMass(bad)
    with pytest.raises(InvalidQuantityError):
        ProductionVolume(bad, 0.0)
    with pytest.raises(InvalidQuantityError):
        MethaneIntensity(bad)


def test_gas_conversion_default_factor():
    assert convert_gas_volume(5800.0) == 1.0
    assert ProductionVolume.from_raw_gas(10.0, 58000.0).total() == 20.0
    assert convert_gas_volume(6000.0, 6000) == 1.0


@pytest.mark.parametrize("factor", [0, -5800, math.nan, math.inf, "5800"])
def test_gas_conversion_rejects_bad_factor(factor):
    with pytest.raises(ConfigurationError):
        convert_gas_volume(1.0, factor)


def test_intensity_and_zero_production():
    i = intensity(MethaneMass(320e6), ProductionVolume(4e8, 6e8))
    assert i.value == 0.32
    with pytest.raises(ZeroProductionError) as exc:
        intensity(MethaneMass(1.0), ProductionVolume(), "QA")
    assert "QA" in str(exc.value)


def test_intensity_applied_to_production():
    assert MethaneIntensity(0.5).emissions_for(ProductionVolume(100.0, 300.0)).kg == 200.0


def test_production_scaled_and_added():
    p = ProductionVolume(1.0, 2.0)
    assert p.scaled(3.0) == ProductionVolume(3.0, 6.0)
    assert p + p == ProductionVolume(2.0, 4.0)


def test_source_scope_defaults():
    assert SourceScope.for_class(SourceClass.MEASUREMENT).includes_super_emitters
    assert not SourceScope.for_class(SourceClass.ESTIMATE).includes_super_emitters
    assert SourceScope.for_class("Estimate", True).includes_super_emitters
    with pytest.raises(InvalidQuantityError):
        SourceScope(SourceClass.ESTIMATE, False, 1.2)
