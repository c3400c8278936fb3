"""Unit-carrying value types.

Everything is held in canonical units after ingestion: kilograms of CH4 for
masses and barrels of oil equivalent (boe) for production.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError, InvalidQuantityError, ZeroProductionError

KG_PER_KT = 1e6
KG_PER_MT = 1e9
#: standard cubic feet of gas per boe (5.8 MMBtu convention)
DEFAULT_SCF_PER_BOE = 5800.0


def _check(value: float, what: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidQuantityError(f"{what} must be a real number, got {value!r}") from None
    if not math.isfinite(value) or value < 0:
        raise InvalidQuantityError(f"{what} must be finite and >= 0, got {value!r}")
    return value


@dataclass(frozen=True, slots=True)
class MethaneMass:
    """Methane mass in kilograms."""

    kg: float

    def __post_init__(self):
        object.__setattr__(self, "kg", _check(self.kg, "methane mass"))

    @classmethod
    def from_kt(cls, kt: float) -> MethaneMass:
        return cls(_check(kt, "methane mass") * KG_PER_KT)

    @classmethod
    def from_mt(cls, mt: float) -> MethaneMass:
        return cls(_check(mt, "methane mass") * KG_PER_MT)

    @property
    def kt(self) -> float:
        return self.kg / KG_PER_KT

    @property
    def mt(self) -> float:
        return self.kg / KG_PER_MT

    def __add__(self, other: MethaneMass) -> MethaneMass:
        return MethaneMass(self.kg + other.kg)


@dataclass(frozen=True, slots=True)
class ProductionVolume:
    """Oil and gas production, both in boe."""

    oil_boe: float = 0.0
    gas_boe: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "oil_boe", _check(self.oil_boe, "oil production"))
        object.__setattr__(self, "gas_boe", _check(self.gas_boe, "gas production"))

    @classmethod
    def from_raw_gas(
        cls, oil_boe: float, gas_scf: float, factor_scf_per_boe: float = DEFAULT_SCF_PER_BOE
    ) -> ProductionVolume:
        return cls(oil_boe, convert_gas_volume(gas_scf, factor_scf_per_boe))

    def total(self) -> float:
        return self.oil_boe + self.gas_boe

    def __add__(self, other: ProductionVolume) -> ProductionVolume:
        return ProductionVolume(self.oil_boe + other.oil_boe, self.gas_boe + other.gas_boe)

    def scaled(self, k: float) -> ProductionVolume:
        return ProductionVolume(self.oil_boe * k, self.gas_boe * k)


@dataclass(frozen=True, slots=True, order=True)
class MethaneIntensity:
    """Methane intensity in kgCH4 per boe."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", _check(self.value, "methane intensity"))

    def emissions_for(self, production: ProductionVolume) -> MethaneMass:
        return MethaneMass(self.value * production.total())


class SourceClass(str, Enum):
    MEASUREMENT = "Measurement"
    ESTIMATE = "Estimate"


@dataclass(frozen=True, slots=True)
class SourceScope:
    """What an emission value covers.

    Measurement-class data (satellite inversions) sees super-emitter events,
    estimate-class inventories do not; ``for_class`` applies those defaults.
    """

    source_class: SourceClass
    includes_super_emitters: bool
    uncertainty_rel: float | None = None

    def __post_init__(self):
        u = self.uncertainty_rel
        if u is not None and not (0.0 <= u <= 1.0):
            raise InvalidQuantityError(f"relative uncertainty must lie in [0, 1], got {u!r}")

    @classmethod
    def for_class(
        cls,
        source_class: SourceClass,
        includes_super_emitters: bool | None = None,
        uncertainty_rel: float | None = None,
    ) -> SourceScope:
        if includes_super_emitters is None:
            includes_super_emitters = source_class is SourceClass.MEASUREMENT
        return cls(SourceClass(source_class), includes_super_emitters, uncertainty_rel)


def convert_gas_volume(raw_scf: float, factor_scf_per_boe: float = DEFAULT_SCF_PER_BOE) -> float:
    """Convert a raw gas volume in standard cubic feet to boe."""
    if not isinstance(factor_scf_per_boe, (int, float)) or not math.isfinite(factor_scf_per_boe) \
            or factor_scf_per_boe <= 0:
        raise ConfigurationError(f"gas conversion factor must be positive, got {factor_scf_per_boe!r}")
    return _check(raw_scf, "gas volume") / factor_scf_per_boe


def intensity(
    emissions: MethaneMass, production: ProductionVolume, region: str | None = None
) -> MethaneIntensity:
    """Emissions per boe of combined oil and gas production."""
    total = production.total()
    if total <= 0:
        raise ZeroProductionError(region)
    return MethaneIntensity(emissions.kg / total)
