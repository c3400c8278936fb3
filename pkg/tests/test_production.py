import pytest

from ogmethane.errors import DegenerateRatioError, MissingBaselineError
from ogmethane.ingestion import ProductionDataset, ProductionRow, ProductionSource, parse_production, parse_regions
from ogmethane.production import (
    GasMethod,
    estimate_gas,
    estimate_production,
    estimate_region,
    linear_trend,
    monthly_ratio,
)


def test_direct_when_target_present():
    g = estimate_gas("A", 2022, {2021: 5.0, 2022: 7.0}, {2021: 1.0, 2022: 3.0})
    assert g.method is GasMethod.DIRECT and g.gas_boe == 7.0
    assert g.inputs_used == (("GasDB", 2022),)


def test_monthly_ratio():
    g = estimate_gas("A", 2022, {2021: 100.0}, {2021: 50.0, 2022: 55.0})
    assert g.method is GasMethod.MONTHLY_RATIO
    assert g.gas_boe == pytest.approx(110.0, rel=1e-15)
    assert len(g.inputs_used) == 3


def test_monthly_ratio_of_one_keeps_baseline():
    g = estimate_gas("A", 2022, {2021: 123.456}, {2021: 7.0, 2022: 7.0})
    assert g.gas_boe == 123.456


def test_zero_monthly_baseline_falls_back_to_trend():
    g = estimate_gas("A", 2022, {2020: 30.0, 2021: 33.0}, {2021: 0.0, 2022: 5.0})
    assert g.method is GasMethod.TREND
    assert g.gas_boe == pytest.approx(36.0, rel=1e-12)
    assert "zero" in g.fallback_reason
    with pytest.raises(DegenerateRatioError):
        monthly_ratio(1.0, 0.0, 2.0)


def test_trend_uses_last_window_years():
    annual = {2016: 700.0, 2017: 1000.0, 2018: 1020.0, 2019: 1045.0, 2020: 1050.0, 2021: 1080.0}
    g = estimate_gas("QA", 2022, annual, window=5)
    assert [y for _, y in g.inputs_used] == [2017, 2018, 2019, 2020, 2021]
    assert g.gas_boe == pytest.approx(1096.0, rel=1e-12)


def test_trend_is_clamped_at_zero():
    g = estimate_gas("A", 2022, {2019: 300.0, 2020: 200.0, 2021: 10.0})
    assert g.gas_boe == 0.0


def test_single_point_carried_forward():
    assert estimate_gas("A", 2022, {2021: 42.0}).gas_boe == 42.0
    assert linear_trend([(2021, 42.0)], 2030) == 42.0


def test_constant_history_exact():
    assert linear_trend([(2017 + i, 0.1) for i in range(5)], 2022) == 0.1


def test_missing_baseline():
    with pytest.raises(MissingBaselineError):
        estimate_gas("A", 2022, {2019: 1.0, 2020: 2.0}, {2021: 1.0, 2022: 1.0})
    with pytest.raises(MissingBaselineError):
        estimate_gas("A", 2022, {}, {2021: 1.0, 2022: 1.0})


def test_region_without_gas_or_oil():
    ds = ProductionDataset((
        ProductionRow("A", 2022, ProductionSource.LIQUIDS, 5.0, None),
        ProductionRow("B", 2021, ProductionSource.GAS, None, 8.0),
    ))
    a = estimate_region(ds, "A", 2022)
    assert a.gas is None and a.production.total() == 5.0
    b = estimate_region(ds, "B", 2022)
    assert not b.oil_found and b.production.oil_boe == 0.0 and b.production.gas_boe == 8.0


def test_fixture_methods(e2e_dir):
    reg = parse_regions(e2e_dir / "regions.csv")
    ds = parse_production(e2e_dir / "production.csv", reg)
    out = estimate_production(ds, 2022)
    methods = {r: p.gas.method for r, p in out.items()}
    assert methods["US"] is GasMethod.MONTHLY_RATIO
    assert methods["QA"] is GasMethod.TREND
    assert methods["XX"] is GasMethod.TREND and out["XX"].gas.fallback_reason
    assert methods["US-PERMIAN"] is GasMethod.DIRECT
    assert list(out) == sorted(out)
    assert estimate_production(ds, 2022, jobs=4) == out
