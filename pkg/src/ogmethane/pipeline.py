"""End-to-end composition: estimate -> fuse -> model -> benchmark.

``ModelRun`` and ``BenchmarkRun`` are what the CLI persists between
subcommands (``run.json`` / ``benchmark.json``); both round-trip through
JSON without loss because floats are written with ``repr`` precision.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .config import Config
from .engine import (
    CompanyModelResult,
    IntensityEntry,
    ProjectionMode,
    RegionalIntensityTable,
    RegionContribution,
    UncoveredRegion,
    build_intensity_table,
    model_companies,
    total_emissions_projection,
)
from .fusion import FusionAuditRow, fuse_all
from .ingestion import Inputs
from .production import GasEstimate, GasMethod, RegionProduction, estimate_production
from .profiles import CATEGORIES, Category, ReportedMetrics
from .stats import (
    ALL,
    BenchmarkResult,
    CategoryStats,
    OutlierReason,
    ReportStatus,
    exclude_outliers,
    ratios,
    stats_by_category,
)
from .units import MethaneIntensity, MethaneMass, ProductionVolume

log = logging.getLogger(__name__)

RUN_FORMAT = "ogmethane-run/1"
BENCHMARK_FORMAT = "ogmethane-benchmark/1"

METRICS = ("model_intensity", "reported_intensity", "ratio", "ratio_excl_outliers")


@dataclass
class ModelRun:
    config: Config
    production: dict[str, RegionProduction]
    fusion_audit: tuple[FusionAuditRow, ...]
    table: RegionalIntensityTable
    companies: list[CompanyModelResult]
    #: summed production of all Country regions, for coverage shares
    country_production_boe: float = 0.0

    @property
    def target_year(self) -> int:
        return self.config.target_year

    def coverage(self) -> dict:
        company_total = math.fsum(
            c.covered_production.total() + c.uncovered_production.total() for c in self.companies
        )
        share = company_total / self.country_production_boe if self.country_production_boe > 0 else None
        return {
            "company_production_boe": company_total,
            "country_production_boe": self.country_production_boe,
            "share": share,
        }


@dataclass
class WeightedIntensity:
    category: str
    emissions_kg: float
    covered_boe: float
    weighted_mean: float


@dataclass
class BenchmarkRun:
    config: Config
    results: list[BenchmarkResult]
    statistics: dict[str, list[CategoryStats]]
    weighted: list[WeightedIntensity]
    unmatched_reported: list[str] = field(default_factory=list)

    def excluded(self) -> list[BenchmarkResult]:
        return [r for r in self.results if r.outlier]


def run_model(inputs: Inputs, config: Config, jobs: int = 1) -> ModelRun:
    production = estimate_production(inputs.production, config.target_year, config.trend_window, jobs)
    volumes = {rid: rp.production for rid, rp in production.items()}
    fusion = fuse_all(inputs.registry, inputs.emissions, volumes, config.target_year)
    table = build_intensity_table(fusion.records, volumes)
    companies = model_companies(inputs.profiles, table, inputs.registry, jobs)
    country_total = math.fsum(
        volumes[r.id].total() for r in inputs.registry.countries() if r.id in volumes
    )
    return ModelRun(config, production, fusion.audit, table, companies, country_total)


def run_benchmark(
    run: ModelRun, reported: dict[str, ReportedMetrics], config: Config | None = None
) -> BenchmarkRun:
    config = config or run.config
    names = {c.name for c in run.companies}
    unmatched = sorted(n for n in reported if n not in names)
    if unmatched:
        log.warning("reported metrics for unknown companies ignored: %s", ", ".join(unmatched))
    results = ratios(run.companies, reported)
    kept, excluded = exclude_outliers(
        results,
        manual=config.manual_outliers if "manual" in config.outlier_policy else (),
        iqr="iqr" in config.outlier_policy,
        k=config.iqr_k,
        scope=config.outlier_scope,
        method=config.quantile_method,
    )
    flagged = {r.company: r for r in excluded}
    results = [flagged.get(r.company, r) for r in results]

    def table(pairs):
        return stats_by_category(pairs, config.ddof, config.quantile_method)

    statistics = {
        "model_intensity": table((r.category, r.model_intensity.value) for r in results),
        "reported_intensity": table(
            (r.category, r.reported_intensity.value) for r in results if r.reported_intensity is not None
        ),
        "ratio": table((r.category, r.ratio) for r in results if r.ratio is not None),
        "ratio_excl_outliers": table((r.category, r.ratio) for r in kept if r.ratio is not None),
    }
    weighted = []
    for cat in [*CATEGORIES, ALL]:
        members = [c for c in run.companies if cat == ALL or c.category is cat]
        if not members:
            continue
        e = math.fsum(c.total_model_emissions.kg for c in members)
        p = math.fsum(c.covered_production.total() for c in members)
        label = cat.value if isinstance(cat, Category) else cat
        weighted.append(WeightedIntensity(label, e, p, e / p))
    return BenchmarkRun(config, results, statistics, weighted, unmatched)


# -- serialization -------------------------------------------------------------


def _volume(d: dict, prefix: str = "") -> ProductionVolume:
    return ProductionVolume(d[f"{prefix}oil_boe"], d[f"{prefix}gas_boe"])


def run_to_dict(run: ModelRun) -> dict:
    production = []
    for rid, rp in run.production.items():
        g = rp.gas
        production.append({
            "region_id": rid,
            "year": rp.year,
            "oil_boe": rp.production.oil_boe,
            "gas_boe": rp.production.gas_boe,
            "oil_found": rp.oil_found,
            "gas_method": g.method.value if g else None,
            "gas_inputs": [list(x) for x in g.inputs_used] if g else [],
            "fallback_reason": g.fallback_reason if g else "",
        })
    table = [
        {
            "region_id": e.region_id,
            "intensity": e.intensity.value,
            "emissions_kg": e.emissions.kg,
            "oil_boe": e.production.oil_boe,
            "gas_boe": e.production.gas_boe,
            "provenance": e.provenance,
        }
        for e in run.table.entries.values()
    ]
    companies = []
    for c in run.companies:
        companies.append({
            "name": c.name,
            "category": c.category.value,
            "total_model_emissions_kg": c.total_model_emissions.kg,
            "full_production_emissions_kg": total_emissions_projection(c, ProjectionMode.FULL_PRODUCTION).kg,
            "covered_oil_boe": c.covered_production.oil_boe,
            "covered_gas_boe": c.covered_production.gas_boe,
            "uncovered_oil_boe": c.uncovered_production.oil_boe,
            "uncovered_gas_boe": c.uncovered_production.gas_boe,
            "model_intensity": c.model_intensity.value,
            "breakdown": [
                {
                    "entry": b.entry,
                    "id": b.id,
                    "members": list(b.members),
                    "oil_boe": b.production.oil_boe,
                    "gas_boe": b.production.gas_boe,
                    "intensity": b.intensity,
                    "emissions_kg": b.emissions_kg,
                    "provenance": b.provenance,
                    "covered": b.covered,
                }
                for b in c.breakdown
            ],
        })
    return {
        "format": RUN_FORMAT,
        "config": run.config.to_dict(),
        "target_year": run.target_year,
        "production": production,
        "fusion_audit": [asdict(a) for a in run.fusion_audit],
        "regional_intensity": table,
        "uncovered": [asdict(u) for u in run.table.uncovered],
        "companies": companies,
        "coverage": run.coverage(),
    }


def run_from_dict(d: dict) -> ModelRun:
    if d.get("format") != RUN_FORMAT:
        raise ValueError(f"not a model run document (format {d.get('format')!r})")
    config = Config.from_dict(d["config"])
    production = {}
    for p in d["production"]:
        gas = None
        if p["gas_method"] is not None:
            gas = GasEstimate(
                p["region_id"], p["year"], p["gas_boe"], GasMethod(p["gas_method"]),
                tuple((s, y) for s, y in p["gas_inputs"]), p["fallback_reason"],
            )
        production[p["region_id"]] = RegionProduction(
            p["region_id"], p["year"], _volume(p), p["oil_found"], gas
        )
    entries = {
        e["region_id"]: IntensityEntry(
            e["region_id"], MethaneIntensity(e["intensity"]), MethaneMass(e["emissions_kg"]),
            _volume(e), e["provenance"],
        )
        for e in d["regional_intensity"]
    }
    table = RegionalIntensityTable(entries, tuple(UncoveredRegion(**u) for u in d["uncovered"]))
    companies = []
    for c in d["companies"]:
        breakdown = tuple(
            RegionContribution(
                b["entry"], b["id"], tuple(b["members"]), _volume(b), b["intensity"],
                b["emissions_kg"], b["provenance"], b["covered"],
            )
            for b in c["breakdown"]
        )
        companies.append(CompanyModelResult(
            c["name"], Category(c["category"]), MethaneMass(c["total_model_emissions_kg"]),
            _volume(c, "covered_"), _volume(c, "uncovered_"), MethaneIntensity(c["model_intensity"]),
            breakdown,
        ))
    audit = tuple(FusionAuditRow(**a) for a in d["fusion_audit"])
    return ModelRun(config, production, audit, table, companies, d["coverage"]["country_production_boe"])


def _stats_dict(s: CategoryStats) -> dict:
    return asdict(s)


def benchmark_to_dict(b: BenchmarkRun) -> dict:
    return {
        "format": BENCHMARK_FORMAT,
        "config": b.config.to_dict(),
        "results": [
            {
                "company": r.company,
                "category": r.category.value,
                "model_intensity": r.model_intensity.value,
                "reported_intensity": r.reported_intensity.value if r.reported_intensity else None,
                "ratio": r.ratio,
                "report_status": r.report_status.value,
                "outlier": r.outlier,
                "outlier_reason": r.outlier_reason.value if r.outlier_reason else None,
            }
            for r in b.results
        ],
        "statistics": {m: [_stats_dict(s) for s in b.statistics.get(m, [])] for m in METRICS},
        "weighted_model_intensity": [asdict(w) for w in b.weighted],
        "unmatched_reported": list(b.unmatched_reported),
    }


def benchmark_from_dict(d: dict) -> BenchmarkRun:
    if d.get("format") != BENCHMARK_FORMAT:
        raise ValueError(f"not a benchmark document (format {d.get('format')!r})")
    results = [
        BenchmarkResult(
            r["company"], Category(r["category"]), MethaneIntensity(r["model_intensity"]),
            MethaneIntensity(r["reported_intensity"]) if r["reported_intensity"] is not None else None,
            r["ratio"], r["outlier"],
            OutlierReason(r["outlier_reason"]) if r["outlier_reason"] else None,
            ReportStatus(r["report_status"]),
        )
        for r in d["results"]
    ]
    statistics = {m: [CategoryStats(**s) for s in rows] for m, rows in d["statistics"].items()}
    weighted = [WeightedIntensity(**w) for w in d["weighted_model_intensity"]]
    return BenchmarkRun(Config.from_dict(d["config"]), results, statistics, weighted,
                        list(d.get("unmatched_reported", [])))


def dump_json(obj: dict) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def load_run(path: str | Path) -> ModelRun:
    path = Path(path)
    if path.is_dir():
        path = path / "run.json"
    return run_from_dict(json.loads(path.read_text(encoding="utf-8")))


def load_benchmark(path: str | Path) -> BenchmarkRun:
    path = Path(path)
    if path.is_dir():
        path = path / "benchmark.json"
    return benchmark_from_dict(json.loads(path.read_text(encoding="utf-8")))


__all__ = [
    "BenchmarkRun", "ModelRun", "WeightedIntensity", "benchmark_from_dict",
    "benchmark_to_dict", "dump_json", "load_benchmark", "load_run", "run_benchmark",
    "run_from_dict", "run_model", "run_to_dict",
]
