"""Modelled-year production per region.

Liquids come straight from the annual liquids table. Gas for the target year
is rarely published in the annual table, so it is either

* scaled from the prior-year annual value by the year-on-year change seen in
  the monthly table (``MonthlyRatio``), or
* extrapolated with a least-squares line through the most recent annual
  values (``Trend``), clamped at zero.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

from .errors import DegenerateRatioError, MissingBaselineError
from .ingestion import ProductionDataset, ProductionSource
from .units import ProductionVolume

DEFAULT_TREND_WINDOW = 5


class GasMethod(str, Enum):
    DIRECT = "Direct"
    MONTHLY_RATIO = "MonthlyRatio"
    TREND = "Trend"


@dataclass(frozen=True)
class GasEstimate:
    region_id: str
    year: int
    gas_boe: float
    method: GasMethod
    inputs_used: tuple[tuple[str, int], ...]
    #: why the monthly branch was skipped although monthly data existed
    fallback_reason: str = ""


@dataclass(frozen=True)
class RegionProduction:
    region_id: str
    year: int
    production: ProductionVolume
    oil_found: bool
    gas: GasEstimate | None


def linear_trend(points: Sequence[tuple[float, float]], at: float) -> float:
    """Ordinary least-squares line through ``points`` evaluated at ``at``.

    A single point is carried forward unchanged.
    """
    if not points:
        raise ValueError("linear_trend needs at least one point")
    n = len(points)
    if n == 1:
        return float(points[0][1])
    # anchor on the first point so a constant series reproduces itself exactly
    x0, y0 = points[0]
    mx = x0 + math.fsum(x - x0 for x, _ in points) / n
    my = y0 + math.fsum(y - y0 for _, y in points) / n
    sxx = math.fsum((x - mx) ** 2 for x, _ in points)
    sxy = math.fsum((x - mx) * (y - my) for x, y in points)
    if sxx == 0:
        return my
    return my + sxy / sxx * (at - mx)


def monthly_ratio(baseline: float, monthly_prev: float, monthly_cur: float) -> float:
    if monthly_prev == 0:
        raise DegenerateRatioError("monthly baseline is zero; year-on-year ratio undefined")
    return baseline * (monthly_cur / monthly_prev)


def estimate_gas(
    region_id: str,
    target_year: int,
    annual: Mapping[int, float],
    monthly: Mapping[int, float] | None = None,
    window: int = DEFAULT_TREND_WINDOW,
) -> GasEstimate:
    """Gas production of ``region_id`` in ``target_year``, in boe.

    ``annual`` and ``monthly`` map year to the region's gas production in the
    annual and monthly tables.
    """
    monthly = monthly or {}
    if target_year in annual:
        return GasEstimate(
            region_id, target_year, float(annual[target_year]), GasMethod.DIRECT,
            ((ProductionSource.GAS.value, target_year),),
        )
    prev = target_year - 1
    if prev not in annual:
        raise MissingBaselineError(region_id, prev)

    reason = ""
    if prev in monthly and target_year in monthly:
        try:
            value = monthly_ratio(annual[prev], monthly[prev], monthly[target_year])
        except DegenerateRatioError as exc:
            reason = str(exc)
        else:
            return GasEstimate(
                region_id, target_year, value, GasMethod.MONTHLY_RATIO,
                (
                    (ProductionSource.GAS.value, prev),
                    (ProductionSource.GAS_MONTHLY.value, prev),
                    (ProductionSource.GAS_MONTHLY.value, target_year),
                ),
            )

    history = sorted((y, v) for y, v in annual.items() if y < target_year)[-window:]
    value = max(0.0, linear_trend(history, target_year))
    return GasEstimate(
        region_id, target_year, value, GasMethod.TREND,
        tuple((ProductionSource.GAS.value, y) for y, _ in history),
        reason,
    )


def estimate_region(
    dataset: ProductionDataset, region_id: str, target_year: int, window: int = DEFAULT_TREND_WINDOW
) -> RegionProduction:
    oil = dataset.oil(region_id, target_year)
    annual = dataset.gas_series(region_id, ProductionSource.GAS)
    monthly = dataset.gas_series(region_id, ProductionSource.GAS_MONTHLY)
    gas = None
    if annual or monthly:
        gas = estimate_gas(region_id, target_year, annual, monthly, window)
    volume = ProductionVolume(oil or 0.0, gas.gas_boe if gas else 0.0)
    return RegionProduction(region_id, target_year, volume, oil is not None, gas)


def estimate_production(
    dataset: ProductionDataset,
    target_year: int,
    window: int = DEFAULT_TREND_WINDOW,
    jobs: int = 1,
) -> dict[str, RegionProduction]:
    """Production for every region in ``dataset``, keyed and ordered by region id."""
    ids = dataset.region_ids()
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda r: estimate_region(dataset, r, target_year, window), ids))
    else:
        results = [estimate_region(dataset, r, target_year, window) for r in ids]
    return {r.region_id: r for r in results}
