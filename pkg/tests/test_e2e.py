import json
import math
from pathlib import Path

import pytest

import oracle_e2e
from helpers import E2E, mismatches, run_e2e
from ogmethane.cli import main

GOLDEN = E2E / "golden"


def _tree(root: Path) -> dict[str, bytes]:
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.fixture(scope="module")
def expected():
    return oracle_e2e.compute()


def test_pipeline_matches_oracle(expected):
    run, bench = run_e2e(E2E)
    assert mismatches(run, bench, expected) == []


def test_stored_oracle_values_current(expected):
    stored = json.loads((E2E / "oracle_expected.json").read_text())
    assert json.loads(json.dumps(oracle_e2e._jsonable(expected), sort_keys=True)) == stored


def test_fixture_exercises_every_path(expected):
    methods = {p["gas_method"] for p in expected["production"].values()}
    assert methods == {"Direct", "MonthlyRatio", "Trend"}
    assert expected["uncovered"] == ["XX"]
    assert "BasinWeightedResidual" in expected["provenance"].values()
    cats = {c["category"] for c in expected["companies"].values()}
    assert cats == {"NOC", "Integrated", "Independent"}


@pytest.fixture(scope="module")
def cli_outputs(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli")
    assert main(["model", "--inputs", str(E2E), "--config", str(E2E / "config.yaml"),
                 "--out", str(out / "model")]) == 0
    assert main(["benchmark", "--run", str(out / "model"), "--reported", str(E2E / "reported.csv"),
                 "--out", str(out / "benchmark")]) == 0
    for fmt in ("text", "delimited", "json", "svg"):
        assert main(["report", "--run", str(out / "model"), "--benchmark", str(out / "benchmark"),
                     "--format", fmt, "--out", str(out / f"report-{fmt}")]) == 0
    return out


@pytest.mark.parametrize("part", ["model", "benchmark", "report-text", "report-delimited",
                                  "report-json", "report-svg"])
def test_golden(cli_outputs, part):
    assert _tree(cli_outputs / part) == _tree(GOLDEN / part)


def test_persisted_run_matches_oracle(cli_outputs, expected):
    doc = json.loads((cli_outputs / "model" / "run.json").read_text())
    for c in doc["companies"]:
        want = expected["companies"][c["name"]]
        assert math.isclose(c["model_intensity"], want["intensity"], rel_tol=1e-9)
        assert math.isclose(c["full_production_emissions_kg"], want["full_production_kg"], rel_tol=1e-9)
