"""Best-available-data merge of measured and estimated emissions."""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, replace
from enum import Enum

from .errors import NoEmissionDataError, ZeroProductionError
from .ingestion import EmissionDataset
from .regions import RegionRegistry
from .units import (
    MethaneIntensity,
    MethaneMass,
    ProductionVolume,
    SourceClass,
    SourceScope,
    intensity,
)


class Provenance(str, Enum):
    MEASUREMENT_DIRECT = "MeasurementDirect"
    ESTIMATE_DIRECT = "EstimateDirect"
    BASIN_WEIGHTED_RESIDUAL = "BasinWeightedResidual"


@dataclass(frozen=True)
class FusedEmissions:
    region_id: str
    year: int
    methane: MethaneMass
    chosen: SourceScope
    provenance: Provenance


@dataclass(frozen=True)
class FusionAuditRow:
    region_id: str
    year: int
    kind: str
    sources_present: str
    measurement_kg: float | None
    estimate_kg: float | None
    chosen_class: str
    provenance: str
    methane_kg: float | None
    includes_super_emitters: bool | None
    uncertainty_rel: float | None
    basins_used: str = ""
    residual_intensity: float | None = None
    note: str = ""


@dataclass(frozen=True)
class FusionResult:
    records: dict[str, FusedEmissions]
    audit: tuple[FusionAuditRow, ...]


def fuse(region_id: str, year: int, emissions: EmissionDataset) -> FusedEmissions:
    """Pick the Measurement record for a region-year if there is one, else the Estimate."""
    records = emissions.records(region_id, year)
    if not records:
        raise NoEmissionDataError(region_id, year)
    for cls, prov in (
        (SourceClass.MEASUREMENT, Provenance.MEASUREMENT_DIRECT),
        (SourceClass.ESTIMATE, Provenance.ESTIMATE_DIRECT),
    ):
        for r in records:
            if r.scope.source_class is cls:
                return FusedEmissions(region_id, year, r.methane, r.scope, prov)
    raise NoEmissionDataError(region_id, year)  # pragma: no cover - enum is closed


def weighted_mean(values: Sequence[float], weights: Sequence[float]) -> float:
    """Weighted mean kept inside [min(values), max(values)].

    Deviations are taken from the minimum so equal values reproduce
    themselves exactly and rounding cannot push the result out of range.
    """
    total = math.fsum(weights)
    if total <= 0:
        raise ZeroProductionError()
    lo, hi = min(values), max(values)
    mean = lo + math.fsum((v - lo) * w for v, w in zip(values, weights)) / total
    return min(max(mean, lo), hi)


def rest_of_country_intensity(
    country: str, basin_intensities: Sequence[tuple[MethaneIntensity, ProductionVolume]]
) -> MethaneIntensity:
    """Production-weighted mean of the measured basin intensities of ``country``.

    Stands in for the intensity of the country's production outside those basins.
    """
    if not basin_intensities:
        raise ValueError(f"no basin intensities given for {country!r}")
    weights = []
    for _, production in basin_intensities:
        if production.total() <= 0:
            raise ZeroProductionError(country)
        weights.append(production.total())
    return MethaneIntensity(weighted_mean([i.value for i, _ in basin_intensities], weights))


def fuse_all(
    registry: RegionRegistry,
    emissions: EmissionDataset,
    production: Mapping[str, ProductionVolume],
    year: int,
) -> FusionResult:
    """Fuse every region with data for ``year`` and apply the basin residual rule.

    A country without its own measurement but with measured basins takes the
    production-weighted basin intensity for its whole production; its
    country-level estimate is kept in the audit only.
    """
    records: dict[str, FusedEmissions] = {}
    audit: dict[str, FusionAuditRow] = {}
    with_data = {r.region_id for r in emissions.rows if r.year == year}
    for rid in sorted(with_data):
        fused = fuse(rid, year, emissions)
        records[rid] = fused
        audit[rid] = _audit_row(registry, emissions, fused)

    for country in registry.countries():
        cid = country.id
        own = records.get(cid)
        if own is not None and own.provenance is Provenance.MEASUREMENT_DIRECT:
            continue
        used, skipped = [], []
        for basin in registry.basins_of(cid):
            fb = records.get(basin.id)
            if fb is None or fb.provenance is not Provenance.MEASUREMENT_DIRECT:
                continue
            prod = production.get(basin.id)
            if prod is None or prod.total() <= 0:
                skipped.append(basin.id)
                continue
            used.append((basin.id, fb, prod))
        if not used:
            if skipped and cid in audit:
                audit[cid] = _with_note(audit[cid], f"measured basins without production: {';'.join(skipped)}")
            continue
        value = rest_of_country_intensity(
            cid, [(intensity(fb.methane, prod, bid), prod) for bid, fb, prod in used]
        )
        uncertainties = [fb.chosen.uncertainty_rel for _, fb, _ in used if fb.chosen.uncertainty_rel is not None]
        scope = SourceScope.for_class(
            SourceClass.MEASUREMENT,
            all(fb.chosen.includes_super_emitters for _, fb, _ in used),
            max(uncertainties) if uncertainties else None,
        )
        base = audit.get(cid)
        note = f"measured basins without production: {';'.join(skipped)}" if skipped else ""
        country_prod = production.get(cid)
        methane = None
        if country_prod is not None:
            methane = MethaneMass(value.value * country_prod.total())
            records[cid] = FusedEmissions(cid, year, methane, scope, Provenance.BASIN_WEIGHTED_RESIDUAL)
        else:
            records.pop(cid, None)
            note = (note + "; " if note else "") + "no country production; residual intensity not tabulated"
        audit[cid] = FusionAuditRow(
            region_id=cid,
            year=year,
            kind=country.kind.value,
            sources_present=base.sources_present if base else "",
            measurement_kg=base.measurement_kg if base else None,
            estimate_kg=base.estimate_kg if base else None,
            chosen_class=SourceClass.MEASUREMENT.value,
            provenance=Provenance.BASIN_WEIGHTED_RESIDUAL.value,
            methane_kg=methane.kg if methane else None,
            includes_super_emitters=scope.includes_super_emitters,
            uncertainty_rel=scope.uncertainty_rel,
            basins_used=";".join(bid for bid, _, _ in used),
            residual_intensity=value.value,
            note=note,
        )
    ordered = {k: records[k] for k in sorted(records)}
    return FusionResult(ordered, tuple(audit[k] for k in sorted(audit)))


def _audit_row(registry, emissions, fused: FusedEmissions) -> FusionAuditRow:
    recs = emissions.records(fused.region_id, fused.year)
    by_class = {r.scope.source_class: r for r in recs}
    meas = by_class.get(SourceClass.MEASUREMENT)
    est = by_class.get(SourceClass.ESTIMATE)
    region = registry.get(fused.region_id)
    return FusionAuditRow(
        region_id=fused.region_id,
        year=fused.year,
        kind=region.kind.value if region else "",
        sources_present=";".join(c.value for c in SourceClass if c in by_class),
        measurement_kg=meas.methane.kg if meas else None,
        estimate_kg=est.methane.kg if est else None,
        chosen_class=fused.chosen.source_class.value,
        provenance=fused.provenance.value,
        methane_kg=fused.methane.kg,
        includes_super_emitters=fused.chosen.includes_super_emitters,
        uncertainty_rel=fused.chosen.uncertainty_rel,
    )


def _with_note(row: FusionAuditRow, note: str) -> FusionAuditRow:
    return replace(row, note=note)


__all__ = [
    "FusedEmissions", "FusionAuditRow", "FusionResult", "Provenance", "fuse", "fuse_all",
    "rest_of_country_intensity", "weighted_mean",
]
