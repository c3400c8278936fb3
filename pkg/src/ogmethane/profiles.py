"""Company production profiles and company-reported metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .units import MethaneIntensity, MethaneMass, ProductionVolume


class Category(str, Enum):
    NOC = "NOC"
    INTEGRATED = "Integrated"
    INDEPENDENT = "Independent"


CATEGORIES = tuple(Category)


@dataclass(frozen=True, slots=True)
class Allocation:
    """Production a company attributes to one country or basin."""

    region_id: str
    production: ProductionVolume
    # operated / equity / gross ... carried through, never interpreted
    basis: str = ""


@dataclass(frozen=True, slots=True)
class AggregationGroup:
    """Countries a company only reports jointly."""

    group_id: str
    member_region_ids: tuple[str, ...]
    production: ProductionVolume
    basis: str = ""


@dataclass(frozen=True)
class CompanyProfile:
    name: str
    category: Category
    allocations: tuple[Allocation, ...] = ()
    aggregation_groups: tuple[AggregationGroup, ...] = ()

    def total_production(self) -> ProductionVolume:
        total = ProductionVolume()
        for a in self.allocations:
            total = total + a.production
        for g in self.aggregation_groups:
            total = total + g.production
        return total


@dataclass(frozen=True)
class ReportedMetrics:
    name: str
    reported_methane: MethaneMass | None = None
    reported_production: ProductionVolume | None = None
    reported_intensity: MethaneIntensity | None = None
    line: int = field(default=0, compare=False)

    @property
    def is_reporting(self) -> bool:
        return self.reported_intensity is not None or (
            self.reported_methane is not None and self.reported_production is not None
        )
