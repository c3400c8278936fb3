"""Upstream oil and gas methane intensity models for company production profiles.

Measured (satellite) and estimated (inventory) emissions are fused per region,
divided by regional production, and applied to company production profiles;
the resulting model intensities are then benchmarked against what companies
report.
"""

__version__ = "0.1.0"

from .config import Config, load_config
from .engine import (
    CompanyModelResult,
    ProjectionMode,
    RegionalIntensityTable,
    aggregation_intensity,
    build_intensity_table,
    model_company,
    total_emissions_projection,
)
from .fusion import FusedEmissions, Provenance, fuse, fuse_all, rest_of_country_intensity
from .ingestion import (
    load_inputs,
    parse_emissions,
    parse_production,
    parse_profiles,
    parse_regions,
    parse_reported,
)
from .pipeline import run_benchmark, run_model
from .production import GasEstimate, GasMethod, estimate_gas
from .profiles import AggregationGroup, Allocation, Category, CompanyProfile, ReportedMetrics
from .regions import Region, RegionKind, RegionRegistry
from .report import boxplot_summary, histogram, render_report
from .stats import (
    BenchmarkResult,
    CategoryStats,
    category_stats,
    exclude_outliers,
    ratios,
    reported_intensity,
)
from .units import (
    MethaneIntensity,
    MethaneMass,
    ProductionVolume,
    SourceClass,
    SourceScope,
    convert_gas_volume,
    intensity,
)

__all__ = [
    "AggregationGroup", "Allocation", "BenchmarkResult", "Category", "CategoryStats",
    "CompanyModelResult", "CompanyProfile", "Config", "FusedEmissions", "GasEstimate", "GasMethod",
    "MethaneIntensity", "MethaneMass", "ProductionVolume", "ProjectionMode", "Provenance", "Region",
    "RegionKind", "RegionRegistry", "RegionalIntensityTable", "ReportedMetrics", "SourceClass",
    "SourceScope", "aggregation_intensity", "boxplot_summary", "build_intensity_table",
    "category_stats", "convert_gas_volume", "estimate_gas", "exclude_outliers", "fuse", "fuse_all",
    "histogram", "intensity", "load_config", "load_inputs", "model_company", "parse_emissions",
    "parse_production", "parse_profiles", "parse_regions", "parse_reported", "ratios",
    "render_report", "reported_intensity", "rest_of_country_intensity", "run_benchmark", "run_model",
    "total_emissions_projection",
]
