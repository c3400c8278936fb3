"""Parsers and writers for the input tables.

All inputs are UTF-8 CSV with a mandatory header row and ``.`` as decimal
separator. Column order is free, unknown columns are rejected, and a file is
either loaded completely or not at all. Every diagnostic names the file and
the 1-based physical line it refers to (the header is line 1).

Schemas (``*`` = required column, others may be omitted from the header)::

    regions     region_id*, kind*, parent, display_name
    production  region_id*, year*, source*, oil_boe, gas, gas_unit
    emissions   region_id*, year*, source_class*, methane*, unit*,
                includes_super_emitters, uncertainty_rel
    profiles    company*, category*, entry*, id*, oil_boe*, gas_boe*,
                members, basis
    reported    company*, methane_kg, oil_boe, gas_boe, intensity_kg_per_boe
"""

from __future__ import annotations

import csv
import io
import re
from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from pathlib import Path
from typing import IO

from .errors import (
    DuplicateAllocationError,
    DuplicateKeyError,
    IngestionError,
    InvalidQuantityError,
    InvalidValueError,
    ReferentialIntegrityError,
    SchemaError,
    UnknownRegionError,
)
from .profiles import AggregationGroup, Allocation, Category, CompanyProfile, ReportedMetrics
from .regions import Region, RegionKind, RegionRegistry, check_parent
from .units import (
    DEFAULT_SCF_PER_BOE,
    MethaneIntensity,
    MethaneMass,
    ProductionVolume,
    SourceClass,
    SourceScope,
    convert_gas_volume,
)

REGION_COLUMNS = (("region_id", "kind"), ("parent", "display_name"))
PRODUCTION_COLUMNS = (("region_id", "year", "source"), ("oil_boe", "gas", "gas_unit"))
EMISSION_COLUMNS = (
    ("region_id", "year", "source_class", "methane", "unit"),
    ("includes_super_emitters", "uncertainty_rel"),
)
PROFILE_COLUMNS = (("company", "category", "entry", "id", "oil_boe", "gas_boe"), ("members", "basis"))
REPORTED_COLUMNS = (("company",), ("methane_kg", "oil_boe", "gas_boe", "intensity_kg_per_boe"))

_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_INTEGER = re.compile(r"\d+")
_MASS_UNITS = {"kg": Decimal(1), "kt": Decimal(10) ** 6, "Mt": Decimal(10) ** 9}
_GAS_UNITS = ("boe", "scf")


class ProductionSource(str, Enum):
    LIQUIDS = "LiquidsDB"
    GAS = "GasDB"
    GAS_MONTHLY = "GasMonthlyDB"


@dataclass(frozen=True, slots=True)
class ProductionRow:
    region_id: str
    year: int
    source: ProductionSource
    oil_boe: float | None = None
    gas_boe: float | None = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProductionDataset:
    rows: tuple[ProductionRow, ...]

    def oil(self, region_id: str, year: int) -> float | None:
        for r in self.rows:
            if r.region_id == region_id and r.year == year and r.source is ProductionSource.LIQUIDS:
                return r.oil_boe
        return None

    def gas_series(self, region_id: str, source: ProductionSource) -> dict[int, float]:
        return {
            r.year: r.gas_boe
            for r in self.rows
            if r.region_id == region_id and r.source is source and r.gas_boe is not None
        }

    def region_ids(self) -> list[str]:
        return sorted({r.region_id for r in self.rows})


@dataclass(frozen=True, slots=True)
class EmissionRow:
    region_id: str
    year: int
    methane: MethaneMass
    scope: SourceScope
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EmissionDataset:
    rows: tuple[EmissionRow, ...]

    def records(self, region_id: str, year: int) -> list[EmissionRow]:
        return [r for r in self.rows if r.region_id == region_id and r.year == year]

    def region_ids(self) -> list[str]:
        return sorted({r.region_id for r in self.rows})


# -- low-level table reading -------------------------------------------------


class _Table:
    def __init__(self, path: str | Path, columns: tuple[tuple[str, ...], tuple[str, ...]]):
        self.path = str(path)
        self.required, self.optional = columns

    def error(self, cls, message, line):
        return cls(message, self.path, line)

    def rows(self) -> Iterator[tuple[int, dict[str, str]]]:
        with open(self.path, newline="", encoding="utf-8-sig") as fh:
            reader = csv.reader(fh)
            try:
                yield from self._rows(reader)
            except UnicodeDecodeError:
                raise self.error(InvalidValueError, "file is not valid UTF-8", reader.line_num + 1) from None
            except csv.Error as exc:
                raise self.error(InvalidValueError, f"malformed CSV: {exc}", reader.line_num) from None

    def _rows(self, reader) -> Iterator[tuple[int, dict[str, str]]]:
        header = next(reader, None)
        if header is None:
            raise self.error(SchemaError, "empty file: header row is mandatory", 1)
        header = [h.strip() for h in header]
        seen = set()
        for name in header:
            if name in seen:
                raise self.error(SchemaError, f"duplicate column {name!r}", 1)
            seen.add(name)
        missing = [c for c in self.required if c not in seen]
        if missing:
            raise self.error(SchemaError, f"missing required column(s): {', '.join(missing)}", 1)
        unknown = [c for c in header if c not in self.required and c not in self.optional]
        if unknown:
            raise self.error(SchemaError, f"unknown column(s): {', '.join(unknown)}", 1)
        for fields in reader:
            line = reader.line_num
            if not fields or (len(fields) == 1 and not fields[0].strip()):
                continue
            if len(fields) != len(header):
                raise self.error(
                    InvalidValueError, f"expected {len(header)} fields, found {len(fields)}", line
                )
            row = {name: value.strip() for name, value in zip(header, fields)}
            for opt in self.optional:
                row.setdefault(opt, "")
            yield line, row

    # value helpers

    def text(self, row, col, line) -> str:
        value = row[col]
        if not value:
            raise self.error(InvalidValueError, f"column {col!r} must not be empty", line)
        return value

    def number(self, row, col, line, *, blank_ok=False) -> float | None:
        d = self.decimal(row, col, line, blank_ok=blank_ok)
        return None if d is None else float(d)

    def decimal(self, row, col, line, *, blank_ok=False) -> Decimal | None:
        value = row[col]
        if not value:
            if blank_ok:
                return None
            raise self.error(InvalidValueError, f"column {col!r} must not be empty", line)
        if not _NUMBER.fullmatch(value):
            raise self.error(InvalidValueError, f"malformed number {value!r} in column {col!r}", line)
        d = Decimal(value)
        if d < 0:
            raise self.error(InvalidValueError, f"negative value {value} in column {col!r}", line)
        if not d.is_finite() or abs(float(d)) == float("inf"):
            raise self.error(InvalidValueError, f"value {value} in column {col!r} is out of range", line)
        return d

    def year(self, row, line) -> int:
        value = row["year"]
        if not _INTEGER.fullmatch(value):
            raise self.error(InvalidValueError, f"malformed year {value!r}", line)
        return int(value)

    def enum(self, enum_cls, row, col, line):
        value = row[col]
        try:
            return enum_cls(value)
        except ValueError:
            allowed = ", ".join(e.value for e in enum_cls)
            raise self.error(
                InvalidValueError, f"invalid {col} {value!r}; expected one of {allowed}", line
            ) from None

    def region(self, registry, region_id, line, *, kinds=(RegionKind.COUNTRY, RegionKind.BASIN)):
        region = registry.get(region_id)
        if region is None:
            raise self.error(UnknownRegionError, f"unknown region {region_id!r}", line)
        if region.kind not in kinds:
            allowed = "/".join(k.value for k in kinds)
            raise self.error(
                InvalidValueError, f"region {region_id!r} is a {region.kind.value}; expected {allowed}", line
            )
        if region.kind is RegionKind.BASIN:
            parent = registry.get(region.parent or "")
            if parent is None or parent.kind is not RegionKind.COUNTRY:
                raise self.error(
                    ReferentialIntegrityError,
                    f"basin {region_id!r} has no Country parent {region.parent!r} in the registry",
                    line,
                )
        return region


# -- parsers -----------------------------------------------------------------


def parse_regions(path: str | Path) -> RegionRegistry:
    table = _Table(path, REGION_COLUMNS)
    regions: dict[str, Region] = {}
    lines: dict[str, int] = {}
    for line, row in table.rows():
        rid = table.text(row, "region_id", line)
        if rid in regions:
            raise table.error(
                DuplicateKeyError, f"duplicate region id {rid!r} (first defined on line {lines[rid]})", line
            )
        kind = table.enum(RegionKind, row, "kind", line)
        regions[rid] = Region(rid, kind, row["parent"] or None, row["display_name"])
        lines[rid] = line
    for rid, region in regions.items():
        try:
            check_parent(region, regions)
        except ReferentialIntegrityError as exc:
            raise table.error(ReferentialIntegrityError, str(exc), lines[rid]) from None
    return RegionRegistry(regions.values())


def parse_production(
    path: str | Path, registry: RegionRegistry, gas_boe_factor: float = DEFAULT_SCF_PER_BOE
) -> ProductionDataset:
    """Load production rows; raw gas in scf is converted to boe here."""
    table = _Table(path, PRODUCTION_COLUMNS)
    rows = []
    keys: dict[tuple, int] = {}
    for line, row in table.rows():
        rid = table.text(row, "region_id", line)
        year = table.year(row, line)
        source = table.enum(ProductionSource, row, "source", line)
        table.region(registry, rid, line)
        oil = table.number(row, "oil_boe", line, blank_ok=True)
        gas = table.number(row, "gas", line, blank_ok=True)
        unit = row["gas_unit"]
        if source is ProductionSource.LIQUIDS:
            if oil is None:
                raise table.error(InvalidValueError, "LiquidsDB rows need an oil_boe value", line)
            if gas is not None or unit:
                raise table.error(InvalidValueError, "LiquidsDB rows must leave gas columns empty", line)
        else:
            if gas is None:
                raise table.error(InvalidValueError, f"{source.value} rows need a gas value", line)
            if oil is not None:
                raise table.error(InvalidValueError, f"{source.value} rows must leave oil_boe empty", line)
            if unit not in _GAS_UNITS:
                raise table.error(
                    InvalidValueError, f"invalid gas_unit {unit!r}; expected one of boe, scf", line
                )
            if unit == "scf":
                gas = convert_gas_volume(gas, gas_boe_factor)
        key = (rid, year, source)
        if key in keys:
            raise table.error(
                DuplicateKeyError,
                f"duplicate (region, year, source) {rid}/{year}/{source.value} (first on line {keys[key]})",
                line,
            )
        keys[key] = line
        rows.append(ProductionRow(rid, year, source, oil, gas, line))
    return ProductionDataset(tuple(rows))


def parse_emissions(path: str | Path, registry: RegionRegistry) -> EmissionDataset:
    table = _Table(path, EMISSION_COLUMNS)
    rows = []
    keys: dict[tuple, int] = {}
    for line, row in table.rows():
        rid = table.text(row, "region_id", line)
        year = table.year(row, line)
        source_class = table.enum(SourceClass, row, "source_class", line)
        table.region(registry, rid, line)
        unit = row["unit"]
        if unit not in _MASS_UNITS:
            raise table.error(InvalidValueError, f"invalid unit {unit!r}; expected one of kg, kt, Mt", line)
        kg = table.decimal(row, "methane", line) * _MASS_UNITS[unit]
        flag = row["includes_super_emitters"].lower()
        if flag not in ("", "true", "false"):
            raise table.error(
                InvalidValueError, f"includes_super_emitters must be true or false, got {flag!r}", line
            )
        uncertainty = table.number(row, "uncertainty_rel", line, blank_ok=True)
        try:
            scope = SourceScope.for_class(
                source_class, None if not flag else flag == "true", uncertainty
            )
            methane = MethaneMass(float(kg))
        except InvalidQuantityError as exc:
            raise table.error(InvalidValueError, str(exc), line) from None
        key = (rid, year, source_class)
        if key in keys:
            raise table.error(
                DuplicateKeyError,
                f"duplicate {source_class.value} record for {rid}/{year} (first on line {keys[key]})",
                line,
            )
        keys[key] = line
        rows.append(EmissionRow(rid, year, methane, scope, line))
    return EmissionDataset(tuple(rows))


def parse_profiles(path: str | Path, registry: RegionRegistry) -> list[CompanyProfile]:
    table = _Table(path, PROFILE_COLUMNS)
    order: list[str] = []
    category: dict[str, Category] = {}
    allocations: dict[str, list[Allocation]] = defaultdict(list)
    groups: dict[str, list[AggregationGroup]] = defaultdict(list)
    used: dict[str, dict[str, int]] = defaultdict(dict)  # company -> region -> line
    group_lines: dict[tuple[str, str], int] = {}
    for line, row in table.rows():
        name = table.text(row, "company", line)
        cat = table.enum(Category, row, "category", line)
        if name not in category:
            category[name] = cat
            order.append(name)
        elif category[name] is not cat:
            raise table.error(
                InvalidValueError,
                f"company {name!r} listed as {cat.value} but earlier as {category[name].value}",
                line,
            )
        entry = row["entry"]
        ident = table.text(row, "id", line)
        production = ProductionVolume(
            table.number(row, "oil_boe", line), table.number(row, "gas_boe", line)
        )
        basis = row["basis"]

        def claim(region_id):
            if region_id in used[name]:
                raise table.error(
                    DuplicateAllocationError,
                    f"company {name!r} allocates region {region_id!r} more than once "
                    f"(first on line {used[name][region_id]})",
                    line,
                )
            used[name][region_id] = line

        if entry == "allocation":
            if row["members"]:
                raise table.error(InvalidValueError, "allocation rows must leave 'members' empty", line)
            table.region(registry, ident, line)
            claim(ident)
            allocations[name].append(Allocation(ident, production, basis))
        elif entry == "group":
            members = tuple(m.strip() for m in row["members"].split(";") if m.strip())
            if not members:
                raise table.error(InvalidValueError, f"group {ident!r} lists no members", line)
            if (name, ident) in group_lines:
                raise table.error(
                    DuplicateKeyError,
                    f"group {ident!r} defined twice for {name!r} (first on line {group_lines[(name, ident)]})",
                    line,
                )
            existing = registry.get(ident)
            if existing is not None and existing.kind is not RegionKind.AGGREGATION_GROUP:
                raise table.error(
                    InvalidValueError, f"group id {ident!r} collides with {existing.kind.value} region", line
                )
            group_lines[(name, ident)] = line
            for m in members:
                table.region(registry, m, line, kinds=(RegionKind.COUNTRY,))
                claim(m)
            groups[name].append(AggregationGroup(ident, members, production, basis))
        else:
            raise table.error(
                InvalidValueError, f"invalid entry {entry!r}; expected allocation or group", line
            )
    return [
        CompanyProfile(name, category[name], tuple(allocations[name]), tuple(groups[name]))
        for name in order
    ]


def parse_reported(path: str | Path) -> dict[str, ReportedMetrics]:
    """Load company-reported metrics keyed by company name.

    Rows may leave every metric blank; such companies are kept but do not
    count as reporting.
    """
    table = _Table(path, REPORTED_COLUMNS)
    out: dict[str, ReportedMetrics] = {}
    for line, row in table.rows():
        name = table.text(row, "company", line)
        if name in out:
            raise table.error(
                DuplicateKeyError, f"duplicate company {name!r} (first on line {out[name].line})", line
            )
        methane = table.number(row, "methane_kg", line, blank_ok=True)
        oil = table.number(row, "oil_boe", line, blank_ok=True)
        gas = table.number(row, "gas_boe", line, blank_ok=True)
        value = table.number(row, "intensity_kg_per_boe", line, blank_ok=True)
        production = None
        if oil is not None or gas is not None:
            production = ProductionVolume(oil or 0.0, gas or 0.0)
        out[name] = ReportedMetrics(
            name,
            MethaneMass(methane) if methane is not None else None,
            production,
            MethaneIntensity(value) if value is not None else None,
            line,
        )
    return out


# -- writers -----------------------------------------------------------------


def fmt(x: float | None) -> str:
    """Shortest round-trip text for a float; blank for None."""
    if x is None:
        return ""
    return repr(float(x))


def _write(target: str | Path | IO[str], header, rows) -> None:
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)

    if isinstance(target, (str, Path)):
        with open(target, "w", newline="", encoding="utf-8") as fh:
            emit(fh)
    else:
        emit(target)


def write_regions(registry: RegionRegistry, target) -> None:
    _write(
        target,
        ["region_id", "kind", "parent", "display_name"],
        [[r.id, r.kind.value, r.parent or "", r.display_name] for r in registry],
    )


def write_production(dataset: ProductionDataset, target) -> None:
    rows = []
    for r in dataset.rows:
        gas_unit = "boe" if r.gas_boe is not None else ""
        rows.append([r.region_id, r.year, r.source.value, fmt(r.oil_boe), fmt(r.gas_boe), gas_unit])
    _write(target, ["region_id", "year", "source", "oil_boe", "gas", "gas_unit"], rows)


def write_emissions(dataset: EmissionDataset, target) -> None:
    rows = [
        [
            r.region_id, r.year, r.scope.source_class.value, fmt(r.methane.kg), "kg",
            "true" if r.scope.includes_super_emitters else "false", fmt(r.scope.uncertainty_rel),
        ]
        for r in dataset.rows
    ]
    _write(target, [c for group in EMISSION_COLUMNS for c in group], rows)


def write_profiles(profiles: list[CompanyProfile], target) -> None:
    rows = []
    for p in profiles:
        for a in p.allocations:
            rows.append([p.name, p.category.value, "allocation", a.region_id,
                         fmt(a.production.oil_boe), fmt(a.production.gas_boe), "", a.basis])
        for g in p.aggregation_groups:
            rows.append([p.name, p.category.value, "group", g.group_id,
                         fmt(g.production.oil_boe), fmt(g.production.gas_boe),
                         ";".join(g.member_region_ids), g.basis])
    _write(target, ["company", "category", "entry", "id", "oil_boe", "gas_boe", "members", "basis"], rows)


def write_reported(reported: dict[str, ReportedMetrics], target) -> None:
    rows = []
    for m in reported.values():
        prod = m.reported_production
        rows.append([
            m.name,
            fmt(m.reported_methane.kg if m.reported_methane else None),
            fmt(prod.oil_boe if prod else None),
            fmt(prod.gas_boe if prod else None),
            fmt(m.reported_intensity.value if m.reported_intensity else None),
        ])
    _write(target, ["company", "methane_kg", "oil_boe", "gas_boe", "intensity_kg_per_boe"], rows)


def to_text(writer, obj) -> str:
    buf = io.StringIO()
    writer(obj, buf)
    return buf.getvalue()


@dataclass
class Inputs:
    registry: RegionRegistry
    production: ProductionDataset
    emissions: EmissionDataset
    profiles: list[CompanyProfile]
    reported: dict[str, ReportedMetrics] | None = None


def load_inputs(
    regions: str | Path,
    production: str | Path,
    emissions: str | Path,
    profiles: str | Path,
    reported: str | Path | None = None,
    gas_boe_factor: float = DEFAULT_SCF_PER_BOE,
) -> Inputs:
    """Load the registry first, then every dataset validated against it."""
    registry = parse_regions(regions)
    return Inputs(
        registry,
        parse_production(production, registry, gas_boe_factor),
        parse_emissions(emissions, registry),
        parse_profiles(profiles, registry),
        parse_reported(reported) if reported is not None else None,
    )


__all__ = [
    "EmissionDataset", "EmissionRow", "IngestionError", "Inputs", "ProductionDataset",
    "ProductionRow", "ProductionSource", "load_inputs", "parse_emissions", "parse_production",
    "parse_profiles", "parse_regions", "parse_reported", "write_emissions", "write_production",
    "write_profiles", "write_regions", "write_reported",
]
