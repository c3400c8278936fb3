"""Benchmark of modelled against reported intensities, plus descriptive statistics."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from enum import Enum

from .errors import ConfigurationError, DegenerateReportError, EmptyCategoryError
from .profiles import CATEGORIES, Category, ReportedMetrics
from .units import MethaneIntensity

ALL = "All"


class OutlierReason(str, Enum):
    MANUAL_LIST = "ManualList"
    IQR_RULE = "IqrRule"


class ReportStatus(str, Enum):
    REPORTED = "reported"
    NOT_REPORTING = "not_reporting"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class BenchmarkResult:
    company: str
    category: Category
    model_intensity: MethaneIntensity
    reported_intensity: MethaneIntensity | None = None
    ratio: float | None = None
    outlier: bool = False
    outlier_reason: OutlierReason | None = None
    report_status: ReportStatus = ReportStatus.NOT_REPORTING


@dataclass(frozen=True)
class CategoryStats:
    category: str
    n: int
    mean: float
    median: float
    std_dev: float | None
    rel_std_dev: float | None
    min: float
    max: float
    q1: float
    q3: float


# -- quantiles ---------------------------------------------------------------


def quantile(sorted_values: Sequence[float], p: float, method: str = "linear") -> float:
    """Quantile of already-sorted data.

    ``linear`` interpolates at position (n-1)p (Hyndman-Fan type 7, the
    numpy/R default); ``weibull`` uses (n+1)p-1 (type 6) and ``hazen``
    np-1/2 (type 5), both clamped to the data range.
    """
    n = len(sorted_values)
    if n == 0:
        raise EmptyCategoryError("quantile of an empty sequence")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if method == "linear":
        h = (n - 1) * p
    elif method == "weibull":
        h = (n + 1) * p - 1
    elif method == "hazen":
        h = n * p - 0.5
    else:
        raise ConfigurationError(f"unknown quantile method {method!r}")
    h = min(max(h, 0.0), n - 1.0)
    lo = math.floor(h)
    hi = min(lo + 1, n - 1)
    frac = h - lo
    a, b = sorted_values[lo], sorted_values[hi]
    if frac == 0 or a == b:
        return a
    return a + frac * (b - a)


def category_stats(
    values: Iterable[float], category: str | Category = ALL, ddof: int = 1, method: str = "linear"
) -> CategoryStats:
    """Mean, median, spread and quartiles of ``values``.

    ``std_dev`` needs more than ``ddof`` values and ``rel_std_dev`` a
    non-zero mean; otherwise they are None.
    """
    label = category.value if isinstance(category, Category) else category
    vals = sorted(float(v) for v in values)
    n = len(vals)
    if n == 0:
        raise EmptyCategoryError(f"no values for category {label!r}")
    # shifted sums: constant input gives exactly that constant and zero spread
    v0 = vals[0]
    mean = v0 + math.fsum(v - v0 for v in vals) / n
    mean = min(max(mean, vals[0]), vals[-1])
    std = None
    if n > ddof:
        std = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (n - ddof))
    rel = std / abs(mean) if std is not None and mean != 0 else None
    return CategoryStats(
        category=label,
        n=n,
        mean=mean,
        median=quantile(vals, 0.5, method),
        std_dev=std,
        rel_std_dev=rel,
        min=vals[0],
        max=vals[-1],
        q1=quantile(vals, 0.25, method),
        q3=quantile(vals, 0.75, method),
    )


def iqr_fences(values: Iterable[float], k: float = 1.5, method: str = "linear") -> tuple[float, float]:
    vals = sorted(values)
    q1, q3 = quantile(vals, 0.25, method), quantile(vals, 0.75, method)
    spread = q3 - q1
    return q1 - k * spread, q3 + k * spread


# -- benchmark ---------------------------------------------------------------


def reported_intensity(report: ReportedMetrics | None) -> MethaneIntensity | None:
    """Intensity a company reports, directly or as methane over production.

    Raises DegenerateReportError when methane is given over zero production.
    """
    if report is None:
        return None
    if report.reported_intensity is not None:
        return report.reported_intensity
    if report.reported_methane is not None and report.reported_production is not None:
        total = report.reported_production.total()
        if total <= 0:
            raise DegenerateReportError(
                f"company {report.name!r} reports methane over zero production"
            )
        return MethaneIntensity(report.reported_methane.kg / total)
    return None


def ratios(models, reports: Mapping[str, ReportedMetrics]) -> list[BenchmarkResult]:
    """Pair each company model with its reported intensity.

    ``models`` holds objects with ``name``, ``category`` and
    ``model_intensity`` (``CompanyModelResult`` does). The ratio is model over
    reported and only exists for a strictly positive reported intensity.
    """
    out = []
    for m in models:
        status = ReportStatus.NOT_REPORTING
        try:
            rep = reported_intensity(reports.get(m.name))
        except DegenerateReportError:
            rep, status = None, ReportStatus.DEGENERATE
        ratio = None
        if rep is not None:
            status = ReportStatus.REPORTED
            if rep.value > 0:
                ratio = m.model_intensity.value / rep.value
        out.append(BenchmarkResult(m.name, Category(m.category), m.model_intensity, rep, ratio,
                                   report_status=status))
    return out


def exclude_outliers(
    results: Sequence[BenchmarkResult],
    manual: Iterable[str] = (),
    iqr: bool = False,
    k: float = 1.5,
    scope: str = "category",
    method: str = "linear",
) -> tuple[list[BenchmarkResult], list[BenchmarkResult]]:
    """Split results into (kept, excluded) on their ratio.

    Manual names go first; the IQR fences are then computed on the ratios
    still kept, per category or over all companies depending on ``scope``.
    Excluded results come back flagged with their reason. Both lists keep the
    input order.
    """
    names = {r.company for r in results}
    manual = list(manual)
    unknown = [n for n in manual if n not in names]
    if unknown:
        raise ConfigurationError(f"manual outlier list names unknown companies: {', '.join(unknown)}")
    reason: dict[str, OutlierReason] = {n: OutlierReason.MANUAL_LIST for n in manual}
    if iqr:
        if scope == "category":
            groups = [[r for r in results if r.category is c] for c in CATEGORIES]
        elif scope == "all":
            groups = [list(results)]
        else:
            raise ConfigurationError(f"unknown outlier scope {scope!r}")
        for group in groups:
            pool = [r for r in group if r.ratio is not None and r.company not in reason]
            if not pool:
                continue
            lo, hi = iqr_fences([r.ratio for r in pool], k, method)
            for r in pool:
                if r.ratio < lo or r.ratio > hi:
                    reason[r.company] = OutlierReason.IQR_RULE
    kept, excluded = [], []
    for r in results:
        if r.company in reason:
            excluded.append(replace(r, outlier=True, outlier_reason=reason[r.company]))
        else:
            kept.append(r)
    return kept, excluded


def stats_by_category(
    pairs: Iterable[tuple[Category, float]], ddof: int = 1, method: str = "linear"
) -> list[CategoryStats]:
    """Per-category statistics followed by the pooled ``All`` row; empty categories are skipped."""
    pairs = list(pairs)
    out = []
    for c in CATEGORIES:
        vals = [v for cat, v in pairs if cat is c]
        if vals:
            out.append(category_stats(vals, c, ddof, method))
    if pairs:
        out.append(category_stats([v for _, v in pairs], ALL, ddof, method))
    return out
