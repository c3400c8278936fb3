import pytest

from ogmethane.engine import (
    ProjectionMode,
    aggregation_intensity,
    build_intensity_table,
    model_companies,
    model_company,
    total_emissions_projection,
)
from ogmethane.errors import NoCoverageError, ZeroProductionError
from ogmethane.fusion import FusedEmissions, Provenance
from ogmethane.profiles import AggregationGroup, Allocation, Category, CompanyProfile
from ogmethane.regions import Region, RegionKind, RegionRegistry
from ogmethane.units import MethaneMass, ProductionVolume, SourceClass, SourceScope

EST = SourceScope.for_class(SourceClass.ESTIMATE)


def fused(rid, kg):
    return FusedEmissions(rid, 2022, MethaneMass(kg), EST, Provenance.ESTIMATE_DIRECT)


@pytest.fixture
def table():
    f = {"A": fused("A", 100.0), "B": fused("B", 300.0), "C": fused("C", 50.0)}
    p = {
        "A": ProductionVolume(100.0, 100.0),  # 0.5
        "B": ProductionVolume(100.0, 0.0),    # 3.0
        "C": ProductionVolume(50.0, 50.0),    # 0.5
        "D": ProductionVolume(10.0, 0.0),     # no emissions
    }
    return build_intensity_table(f, p)


def test_table(table):
    assert table.get("A").intensity.value == 0.5
    assert table.get("B").intensity.value == 3.0
    assert table.uncovered_ids() == ["D"]
    assert "D" not in table


def test_emissions_without_production_are_uncovered():
    t = build_intensity_table({"A": fused("A", 1.0)}, {})
    assert t.uncovered[0].reason == "no production data"
    with pytest.raises(ZeroProductionError):
        build_intensity_table({"A": fused("A", 1.0)}, {"A": ProductionVolume()})


def test_aggregation_is_pooled_not_averaged(table):
    # (100 + 300) / (200 + 100), not mean(0.5, 3.0)
    assert aggregation_intensity(["A", "B"], table).value == pytest.approx(4 / 3, rel=1e-15)
    assert aggregation_intensity(["A", "D"], table).value == 0.5
    with pytest.raises(NoCoverageError):
        aggregation_intensity(["D"], table)


def test_model_company(table):
    profile = CompanyProfile("X", Category.NOC, (
        Allocation("A", ProductionVolume(10.0, 10.0)),
        Allocation("B", ProductionVolume(20.0, 0.0)),
        Allocation("D", ProductionVolume(5.0, 5.0)),
    ))
    r = model_company(profile, table)
    assert r.total_model_emissions.kg == 10.0 + 60.0
    assert r.covered_production.total() == 40.0
    assert r.uncovered_production.total() == 10.0
    assert r.model_intensity.value == 70.0 / 40.0
    assert total_emissions_projection(r, ProjectionMode.COVERED_ONLY).kg == 70.0
    assert total_emissions_projection(r, ProjectionMode.FULL_PRODUCTION).kg == pytest.approx(70.0 * 50 / 40)
    assert [c.id for c in r.breakdown] == ["A", "B", "D"]
    assert r.breakdown[2].provenance == "Uncovered"


def test_group_entry(table):
    profile = CompanyProfile("X", Category.NOC, (), (
        AggregationGroup("G", ("A", "B", "D"), ProductionVolume(30.0, 0.0)),
    ))
    r = model_company(profile, table)
    assert r.model_intensity.value == pytest.approx(4 / 3, rel=1e-15)
    assert "uncovered: D" in r.breakdown[0].provenance


def test_group_with_no_coverage_counts_as_uncovered(table):
    profile = CompanyProfile("X", Category.NOC, (Allocation("A", ProductionVolume(1.0)),), (
        AggregationGroup("G", ("D",), ProductionVolume(30.0, 0.0)),
    ))
    r = model_company(profile, table)
    assert r.uncovered_production.total() == 30.0 and r.model_intensity.value == 0.5


def test_no_coverage_raises(table):
    with pytest.raises(NoCoverageError):
        model_company(CompanyProfile("X", Category.NOC, (Allocation("D", ProductionVolume(1.0)),)), table)


def test_basin_falls_back_to_parent(table):
    reg = RegionRegistry([Region("A", RegionKind.COUNTRY), Region("A-1", RegionKind.BASIN, "A")])
    profile = CompanyProfile("X", Category.NOC, (Allocation("A-1", ProductionVolume(4.0)),))
    r = model_company(profile, table, reg)
    assert r.model_intensity.value == 0.5
    assert r.breakdown[0].provenance == "ParentCountry:EstimateDirect"
    with pytest.raises(NoCoverageError):
        model_company(profile, table)


def test_parallel_order(table):
    profiles = [
        CompanyProfile(f"X{i}", Category.NOC, (Allocation("A", ProductionVolume(1.0 + i)),))
        for i in range(20)
    ]
    assert model_companies(profiles, table, jobs=4) == model_companies(profiles, table)
