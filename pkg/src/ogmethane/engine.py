"""Regional intensity table and company models.

A region's intensity is its fused emissions over its total oil and gas
production and is taken as uniform across all production in the region. A
company's modelled emissions are the sum of intensity times allocated
production over the regions it operates in; its modelled intensity divides
that by the production in covered regions only.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from .errors import NoCoverageError, ZeroProductionError
from .fusion import FusedEmissions
from .profiles import Category, CompanyProfile
from .regions import RegionKind, RegionRegistry
from .units import MethaneIntensity, MethaneMass, ProductionVolume, intensity


@dataclass(frozen=True)
class IntensityEntry:
    region_id: str
    intensity: MethaneIntensity
    emissions: MethaneMass
    production: ProductionVolume
    provenance: str


@dataclass(frozen=True)
class UncoveredRegion:
    region_id: str
    reason: str


@dataclass(frozen=True)
class RegionalIntensityTable:
    entries: Mapping[str, IntensityEntry]
    uncovered: tuple[UncoveredRegion, ...] = ()

    def __contains__(self, region_id: object) -> bool:
        return region_id in self.entries

    def get(self, region_id: str) -> IntensityEntry | None:
        return self.entries.get(region_id)

    def uncovered_ids(self) -> list[str]:
        return [u.region_id for u in self.uncovered]


def build_intensity_table(
    fused: Mapping[str, FusedEmissions], production: Mapping[str, ProductionVolume]
) -> RegionalIntensityTable:
    """One entry per region holding both emissions and production.

    Regions with production but no emission data are listed as uncovered, as
    are regions whose emissions have no production record at all. Emissions
    over an explicit zero production raise ``ZeroProductionError``.
    """
    entries: dict[str, IntensityEntry] = {}
    uncovered = []
    for rid in sorted(set(fused) | set(production)):
        f = fused.get(rid)
        p = production.get(rid)
        if f is None:
            uncovered.append(UncoveredRegion(rid, "no emission data"))
        elif p is None:
            uncovered.append(UncoveredRegion(rid, "no production data"))
        else:
            entries[rid] = IntensityEntry(rid, intensity(f.methane, p, rid), f.methane, p, f.provenance.value)
    return RegionalIntensityTable(entries, tuple(uncovered))


def _pool(members: Iterable[str], table: RegionalIntensityTable):
    covered = [m for m in members if m in table]
    missing = [m for m in members if m not in table]
    emissions = math.fsum(table.entries[m].emissions.kg for m in sorted(covered))
    production = math.fsum(table.entries[m].production.total() for m in sorted(covered))
    return covered, missing, emissions, production


def aggregation_intensity(members: Iterable[str], table: RegionalIntensityTable) -> MethaneIntensity:
    """Pooled intensity of a group of countries: total emissions over total production.

    Members missing from the table are ignored as uncovered.
    """
    members = list(members)
    covered, _, emissions, production = _pool(members, table)
    if not covered or production <= 0:
        raise NoCoverageError(f"aggregation of {', '.join(members)} has no covered production")
    return MethaneIntensity(emissions / production)


@dataclass(frozen=True)
class RegionContribution:
    entry: str  # "allocation" | "group"
    id: str
    members: tuple[str, ...]
    production: ProductionVolume
    intensity: float | None
    emissions_kg: float
    provenance: str
    covered: bool


@dataclass(frozen=True)
class CompanyModelResult:
    name: str
    category: Category
    total_model_emissions: MethaneMass
    covered_production: ProductionVolume
    uncovered_production: ProductionVolume
    model_intensity: MethaneIntensity
    breakdown: tuple[RegionContribution, ...]


class ProjectionMode(str, Enum):
    COVERED_ONLY = "CoveredOnly"
    FULL_PRODUCTION = "FullProduction"


def _region_intensity(region_id, table, registry):
    entry = table.get(region_id)
    if entry is not None:
        return entry.intensity.value, entry.provenance
    if registry is not None:
        region = registry.get(region_id)
        if region is not None and region.kind is RegionKind.BASIN:
            parent = table.get(region.parent)
            if parent is not None:
                return parent.intensity.value, f"ParentCountry:{parent.provenance}"
    return None, "Uncovered"


def model_company(
    profile: CompanyProfile, table: RegionalIntensityTable, registry: RegionRegistry | None = None
) -> CompanyModelResult:
    """Model emissions and intensity for one production profile.

    With a registry, a basin allocation that has no intensity of its own falls
    back to its country's intensity.
    """
    parts: list[RegionContribution] = []
    for a in profile.allocations:
        value, prov = _region_intensity(a.region_id, table, registry)
        covered = value is not None
        parts.append(RegionContribution(
            "allocation", a.region_id, (), a.production, value,
            value * a.production.total() if covered else 0.0, prov, covered,
        ))
    for g in profile.aggregation_groups:
        covered_members, missing, e, p = _pool(g.member_region_ids, table)
        if covered_members and p > 0:
            value = MethaneIntensity(e / p).value
            prov = "Aggregation" if not missing else f"Aggregation(uncovered: {';'.join(missing)})"
            parts.append(RegionContribution(
                "group", g.group_id, g.member_region_ids, g.production, value,
                value * g.production.total(), prov, True,
            ))
        else:
            parts.append(RegionContribution(
                "group", g.group_id, g.member_region_ids, g.production, None, 0.0, "Uncovered", False,
            ))

    # lexicographic accumulation; fsum makes the totals order-independent as well
    parts.sort(key=lambda c: (c.id, c.entry))
    cov = [c for c in parts if c.covered]
    unc = [c for c in parts if not c.covered]
    covered_prod = ProductionVolume(
        math.fsum(c.production.oil_boe for c in cov), math.fsum(c.production.gas_boe for c in cov)
    )
    uncovered_prod = ProductionVolume(
        math.fsum(c.production.oil_boe for c in unc), math.fsum(c.production.gas_boe for c in unc)
    )
    total = MethaneMass(math.fsum(c.emissions_kg for c in cov))
    try:
        model = intensity(total, covered_prod, profile.name)
    except ZeroProductionError:
        raise NoCoverageError(f"company {profile.name!r} has no production in covered regions") from None
    return CompanyModelResult(
        profile.name, profile.category, total, covered_prod, uncovered_prod, model, tuple(parts)
    )


def model_companies(
    profiles: Iterable[CompanyProfile],
    table: RegionalIntensityTable,
    registry: RegionRegistry | None = None,
    jobs: int = 1,
) -> list[CompanyModelResult]:
    """``model_company`` over many profiles; output order follows the input."""
    profiles = list(profiles)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(lambda p: model_company(p, table, registry), profiles))
    return [model_company(p, table, registry) for p in profiles]


def total_emissions_projection(result: CompanyModelResult, mode: ProjectionMode) -> MethaneMass:
    if ProjectionMode(mode) is ProjectionMode.COVERED_ONLY:
        return result.total_model_emissions
    covered = result.covered_production.total()
    full = covered + result.uncovered_production.total()
    # same as intensity * full production, but exact when nothing is uncovered
    return MethaneMass(result.total_model_emissions.kg * (full / covered))
