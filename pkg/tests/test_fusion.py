import pytest

from ogmethane.errors import NoEmissionDataError, ZeroProductionError
from ogmethane.fusion import Provenance, fuse, fuse_all, rest_of_country_intensity, weighted_mean
from ogmethane.ingestion import EmissionDataset, EmissionRow
from ogmethane.regions import Region, RegionKind, RegionRegistry
from ogmethane.units import MethaneIntensity, MethaneMass, ProductionVolume, SourceClass, SourceScope

M, E = SourceClass.MEASUREMENT, SourceClass.ESTIMATE


def row(rid, kg, cls, year=2022, unc=None):
    return EmissionRow(rid, year, MethaneMass(kg), SourceScope.for_class(cls, None, unc))


def registry():
    return RegionRegistry([
        Region("US", RegionKind.COUNTRY),
        Region("QA", RegionKind.COUNTRY),
        Region("NO", RegionKind.COUNTRY),
        Region("US-P", RegionKind.BASIN, "US"),
        Region("US-A", RegionKind.BASIN, "US"),
        Region("NO-X", RegionKind.BASIN, "NO"),
    ])


def test_measurement_beats_estimate():
    ds = EmissionDataset((row("QA", 7.0, E), row("QA", 11.0, M)))
    f = fuse("QA", 2022, ds)
    assert f.methane.kg == 11.0 and f.provenance is Provenance.MEASUREMENT_DIRECT
    assert f.chosen.includes_super_emitters


def test_estimate_only():
    f = fuse("QA", 2022, EmissionDataset((row("QA", 7.0, E),)))
    assert f.provenance is Provenance.ESTIMATE_DIRECT


def test_no_data_for_year():
    with pytest.raises(NoEmissionDataError):
        fuse("QA", 2023, EmissionDataset((row("QA", 7.0, E),)))


def test_weighted_mean_bounds_and_equal_values():
    assert weighted_mean([0.1, 0.1, 0.1], [1.0, 2.0, 3.0]) == 0.1
    assert weighted_mean([1.0, 3.0], [1.0, 1.0]) == 2.0
    with pytest.raises(ZeroProductionError):
        weighted_mean([1.0], [0.0])


def test_rest_of_country_intensity():
    i = rest_of_country_intensity("US", [
        (MethaneIntensity(0.875), ProductionVolume(2e9, 1.2e9)),
        (MethaneIntensity(1.2857142857142858), ProductionVolume(3e8, 4e8)),
    ])
    assert i.value == pytest.approx(3.7e9 / 3.9e9, rel=1e-14)
    with pytest.raises(ValueError):
        rest_of_country_intensity("US", [])


def test_fuse_all_residual_and_priorities():
    ds = EmissionDataset((
        row("US-P", 2.8e9, M, unc=0.2),
        row("US-A", 0.9e9, M, unc=0.3),
        row("US", 6.1e9, E),
        row("QA", 1.1e9, M),
        row("NO", 25e6, E),
        row("NO-X", 1e6, E),
        row("QA", 0.5e9, M, year=2021),
    ))
    prod = {
        "US-P": ProductionVolume(2e9, 1.2e9),
        "US-A": ProductionVolume(3e8, 4e8),
        "US": ProductionVolume(4e9, 6e9),
        "QA": ProductionVolume(1e9, 1e9),
        "NO": ProductionVolume(1e9, 0.0),
        "NO-X": ProductionVolume(1e8, 0.0),
    }
    res = fuse_all(registry(), ds, prod, 2022)
    us = res.records["US"]
    assert us.provenance is Provenance.BASIN_WEIGHTED_RESIDUAL
    assert us.methane.kg == pytest.approx(3.7e9 / 3.9e9 * 1e10, rel=1e-14)
    assert us.chosen.source_class is M and us.chosen.uncertainty_rel == 0.3
    assert res.records["QA"].methane.kg == 1.1e9
    # estimate-only basin does not trigger the residual
    assert res.records["NO"].provenance is Provenance.ESTIMATE_DIRECT
    audit = {a.region_id: a for a in res.audit}
    assert audit["US"].estimate_kg == 6.1e9 and audit["US"].basins_used == "US-A;US-P"
    assert list(res.records) == sorted(res.records)


def test_country_measurement_wins_over_basins():
    ds = EmissionDataset((row("US-P", 2.8e9, M), row("US", 5e9, M)))
    prod = {"US-P": ProductionVolume(1e9), "US": ProductionVolume(1e10)}
    res = fuse_all(registry(), ds, prod, 2022)
    assert res.records["US"].provenance is Provenance.MEASUREMENT_DIRECT
    assert res.records["US"].methane.kg == 5e9


def test_basin_without_production_is_skipped():
    ds = EmissionDataset((row("US-P", 2.8e9, M), row("US-A", 1e9, M), row("US", 6e9, E)))
    prod = {"US-P": ProductionVolume(1e9), "US": ProductionVolume(1e10)}
    res = fuse_all(registry(), ds, prod, 2022)
    assert res.records["US"].methane.kg == pytest.approx(2.8 * 1e10)
    audit = {a.region_id: a for a in res.audit}
    assert "US-A" in audit["US"].note and audit["US"].basins_used == "US-P"


def test_residual_without_country_production_not_tabulated():
    ds = EmissionDataset((row("US-P", 2.8e9, M),))
    res = fuse_all(registry(), ds, {"US-P": ProductionVolume(1e9)}, 2022)
    assert "US" not in res.records
    audit = {a.region_id: a for a in res.audit}
    assert audit["US"].residual_intensity == 2.8 and "no country production" in audit["US"].note
