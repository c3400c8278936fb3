"""Shared comparison of a pipeline run against the Fraction oracle."""

import math
from pathlib import Path

from ogmethane.config import load_config
from ogmethane.ingestion import load_inputs, parse_reported
from ogmethane.pipeline import run_benchmark, run_model

FIXTURES = Path(__file__).parent / "fixtures"
E2E = FIXTURES / "e2e"


def run_e2e(directory, jobs=1):
    config = load_config(directory / "config.yaml")
    inputs = load_inputs(
        directory / "regions.csv", directory / "production.csv", directory / "emissions.csv",
        directory / "profiles.csv", gas_boe_factor=config.gas_boe_factor,
    )
    run = run_model(inputs, config, jobs=jobs)
    bench = run_benchmark(run, parse_reported(directory / "reported.csv"), config)
    return run, bench


def _close(a, b, rel):
    if a is None or b is None:
        return a is None and b is None
    return math.isclose(float(a), float(b), rel_tol=rel, abs_tol=0.0 if b else 1e-300)


def mismatches(run, bench, expected, rel=1e-9):
    """Every quantity in ``expected`` that the run does not reproduce, as strings."""
    bad = []

    def check(label, got, want):
        if not _close(got, want, rel):
            bad.append(f"{label}: got {got!r}, want {float(want) if want is not None else None!r}")

    for rid, p in expected["production"].items():
        got = run.production[rid]
        check(f"oil {rid}", got.production.oil_boe, p["oil_boe"])
        check(f"gas {rid}", got.production.gas_boe, p["gas_boe"])
        if got.gas.method.value != p["gas_method"]:
            bad.append(f"gas method {rid}: {got.gas.method.value} != {p['gas_method']}")
    for rid, value in expected["intensity"].items():
        check(f"intensity {rid}", run.table.get(rid).intensity.value, value)
        if run.table.get(rid).provenance != expected["provenance"][rid]:
            bad.append(f"provenance {rid}: {run.table.get(rid).provenance}")
    if sorted(run.table.uncovered_ids()) != sorted(expected["uncovered"]):
        bad.append(f"uncovered: {run.table.uncovered_ids()}")
    if set(run.table.entries) != set(expected["intensity"]):
        bad.append(f"covered set: {sorted(run.table.entries)}")

    from ogmethane.engine import ProjectionMode, total_emissions_projection

    models = {c.name: c for c in run.companies}
    if set(models) != set(expected["companies"]):
        bad.append(f"companies: {sorted(models)}")
    for name, c in expected["companies"].items():
        m = models[name]
        check(f"emissions {name}", m.total_model_emissions.kg, c["emissions_kg"])
        check(f"covered {name}", m.covered_production.total(), c["covered_boe"])
        check(f"uncovered {name}", m.uncovered_production.total(), c["uncovered_boe"])
        check(f"model intensity {name}", m.model_intensity.value, c["intensity"])
        check(f"full production {name}",
              total_emissions_projection(m, ProjectionMode.FULL_PRODUCTION).kg, c["full_production_kg"])

    results = {r.company: r for r in bench.results}
    for name in expected["companies"]:
        r = results[name]
        want = expected["reported"].get(name)
        check(f"reported {name}", r.reported_intensity.value if r.reported_intensity else None, want)
        check(f"ratio {name}", r.ratio, expected["ratio"].get(name))
        reason = r.outlier_reason.value if r.outlier_reason else None
        if reason != expected["excluded"].get(name):
            bad.append(f"outlier {name}: {reason}")

    for metric, by_cat in expected["stats"].items():
        rows = {s.category: s for s in bench.statistics[metric]}
        if set(rows) != set(by_cat):
            bad.append(f"stats categories {metric}: {sorted(rows)}")
            continue
        for cat, want in by_cat.items():
            got = rows[cat]
            for key, value in want.items():
                check(f"{metric}/{cat}/{key}", getattr(got, key), value)
    weighted = {w.category: w.weighted_mean for w in bench.weighted}
    for cat, value in expected["weighted_mean"].items():
        check(f"weighted {cat}", weighted.get(cat), value)
    return bad
