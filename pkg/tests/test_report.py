import csv
import io
import xml.etree.ElementTree as ET

import pytest

from helpers import E2E, run_e2e
from ogmethane.config import Config
from ogmethane.errors import ConfigurationError
from ogmethane.ingestion import parse_emissions, parse_production, parse_regions
from ogmethane.report import (
    ReportFormat,
    boxplot_summary,
    figures,
    histogram,
    render_report,
    staged_directory,
    write_files,
)


@pytest.fixture(scope="module")
def e2e_run():
    return run_e2e(E2E)


def counts(bins):
    return [(b.lower, b.upper, b.count) for b in bins]


def test_histogram_half_open_bins():
    assert counts(histogram([0.6, 0.79, 0.8, 1.3], 0.2)) == [
        (0.6, 0.8, 2), (0.8, 1.0, 1), (1.0, 1.2, 0), (1.2, 1.4, 1),
    ]


def test_histogram_decimal_edges():
    # 0.1 + 0.2 style rounding must not move a value across an edge
    assert counts(histogram([0.3, 0.6, 0.9], 0.3)) == [(0.3, 0.6, 1), (0.6, 0.9, 1), (0.9, 1.2, 1)]
    assert counts(histogram([1.0], 0.5, origin=0.25)) == [(0.75, 1.25, 1)]


def test_histogram_edge_cases():
    assert histogram([], 0.2) == []
    with pytest.raises(ConfigurationError):
        histogram([1.0], 0.0)


def test_boxplot_summary():
    s = boxplot_summary([1.0, 2.0, 3.0, 4.0, 100.0])
    assert (s.q1, s.median, s.q3) == (2.0, 3.0, 4.0)
    assert s.outliers == (100.0,)
    assert (s.whisker_low, s.whisker_high) == (1.0, 4.0)


def test_figures_cover_all_panels(e2e_run):
    run, bench = e2e_run
    figs = figures(run, bench)
    assert [f.name[:4] for f in figs] == ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"]
    assert [label for label, _ in figs[0].series] == ["All", "NOC", "Integrated", "Independent"]
    assert len(figures(run)) == 2


def test_svg_well_formed(e2e_run):
    run, bench = e2e_run
    files = render_report(run, bench, run.config, ReportFormat.SVG)
    assert len(files) == 6
    for name, text in files.items():
        root = ET.fromstring(text.encode("utf-8"))
        assert root.tag.endswith("svg"), name
        assert root.findall(".//{http://www.w3.org/2000/svg}rect")


def test_delimited_tables_reparse(e2e_run, tmp_path):
    run, bench = e2e_run
    files = render_report(run, bench, run.config, ReportFormat.DELIMITED)
    for name, text in files.items():
        rows = list(csv.reader(io.StringIO(text)))
        assert all(len(r) == len(rows[0]) for r in rows), name
    # modelled production and fused emissions load back through the ingestion schemas
    write_files(tmp_path, files)
    reg = parse_regions(E2E / "regions.csv")
    prod = parse_production(tmp_path / "modelled_production.csv", reg)
    assert prod.oil("US", 2022) == run.production["US"].production.oil_boe
    emis = parse_emissions(tmp_path / "fused_emissions.csv", reg)
    assert emis.records("QA", 2022)[0].methane.kg == 1.1e9
    hist = list(csv.DictReader(io.StringIO(files["histograms.csv"])))
    fig1_all = [int(r["count"]) for r in hist if r["figure"].startswith("fig1") and r["panel"] == "All"]
    assert sum(fig1_all) == len(run.companies)


def test_json_and_text(e2e_run):
    import json
    run, bench = e2e_run
    doc = json.loads(render_report(run, bench, run.config, "json")["report.json"])
    assert set(doc) == {"run", "benchmark", "plots"}
    text = render_report(run, bench, run.config, "text")["report.txt"]
    assert "Uncovered: XX" in text and "ManualList" in text
    assert "Benchmark" not in render_report(run, None, run.config, "text")["report.txt"]


def test_bin_width_from_config(e2e_run):
    run, _ = e2e_run
    a = render_report(run, None, Config(histogram_bin_width=0.5), "delimited")["histograms.csv"]
    b = render_report(run, None, Config(histogram_bin_width=0.2), "delimited")["histograms.csv"]
    assert a != b


def test_staged_directory_is_atomic(tmp_path):
    out = tmp_path / "out"
    with pytest.raises(RuntimeError):
        with staged_directory(out) as tmp:
            (tmp / "partial.csv").write_text("x")
            raise RuntimeError("boom")
    assert not out.exists()
    assert list(tmp_path.iterdir()) == []

    with staged_directory(out) as tmp:
        (tmp / "a.csv").write_text("1")
    assert (out / "a.csv").read_text() == "1"
    with pytest.raises(FileExistsError):
        with staged_directory(out):
            pass
    with staged_directory(out, force=True) as tmp:
        (tmp / "b.csv").write_text("2")
    assert sorted(p.name for p in out.iterdir()) == ["b.csv"]
    assert sorted(p.name for p in tmp_path.iterdir()) == ["out"]
