"""Report output: tables, plot data and standalone SVG figures.

Every writer here is a pure function of the run, the benchmark and the
configuration. Nothing reads the clock or the environment, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import math
import os
import shutil
import tempfile
from collections.abc import Iterable, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from xml.sax.saxutils import escape

from .config import Config
from .errors import ConfigurationError
from .ingestion import fmt
from .pipeline import METRICS, BenchmarkRun, ModelRun, benchmark_to_dict, dump_json, run_to_dict
from .profiles import CATEGORIES
from .stats import ALL, category_stats, iqr_fences


class ReportFormat(str, Enum):
    TEXT = "text"
    DELIMITED = "delimited"
    STRUCTURED = "json"
    SVG = "svg"


# -- plot data ---------------------------------------------------------------


@dataclass(frozen=True)
class HistogramBin:
    lower: float
    upper: float
    count: int


@dataclass(frozen=True)
class BoxplotSummary:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    whisker_low: float
    whisker_high: float
    outliers: tuple[float, ...]


def _exact(x: float) -> Fraction:
    # bin on the shortest decimal form so 0.6 with width 0.2 lands in [0.6, 0.8)
    return Fraction(repr(float(x)))


def histogram(values: Iterable[float], bin_width: float, origin: float = 0.0) -> list[HistogramBin]:
    """Counts over half-open bins [origin + i*w, origin + (i+1)*w).

    Bins run from the lowest to the highest occupied one, empty interior bins
    included; no values gives no bins.
    """
    if not isinstance(bin_width, (int, float)) or not math.isfinite(bin_width) or bin_width <= 0:
        raise ConfigurationError(f"histogram bin width must be positive, got {bin_width!r}")
    w, o = _exact(bin_width), _exact(origin)
    counts: dict[int, int] = {}
    for v in values:
        idx = math.floor((_exact(v) - o) / w)
        counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return []
    return [
        HistogramBin(float(o + i * w), float(o + (i + 1) * w), counts.get(i, 0))
        for i in range(min(counts), max(counts) + 1)
    ]


def boxplot_summary(values: Iterable[float], k: float = 1.5, method: str = "linear") -> BoxplotSummary:
    """Five-number summary plus Tukey whiskers and the points beyond them."""
    vals = sorted(values)
    s = category_stats(vals, method=method)
    lo, hi = iqr_fences(vals, k, method)
    inside = [v for v in vals if lo <= v <= hi]
    return BoxplotSummary(
        s.n, s.min, s.q1, s.median, s.q3, s.max,
        inside[0] if inside else s.q1, inside[-1] if inside else s.q3,
        tuple(v for v in vals if v < lo or v > hi),
    )


@dataclass(frozen=True)
class Figure:
    name: str
    title: str
    kind: str  # "histogram" | "boxplot"
    unit: str
    # (label, values) per panel / box
    series: tuple[tuple[str, tuple[float, ...]], ...]


def _by_category(pairs) -> tuple[tuple[str, tuple[float, ...]], ...]:
    pairs = list(pairs)
    out = [(ALL, tuple(v for _, v in pairs))]
    for c in CATEGORIES:
        vals = tuple(v for cat, v in pairs if cat is c)
        if vals:
            out.append((c.value, vals))
    return tuple(s for s in out if s[1])


def figures(run: ModelRun, bench: BenchmarkRun | None = None) -> list[Figure]:
    unit = "kgCH4/boe"
    model = [(c.category, c.model_intensity.value) for c in run.companies]
    figs = [
        Figure("fig1_model_intensity_distribution", "Modelled intensity, companies per bin",
               "histogram", unit, _by_category(model)),
        Figure("fig2_model_intensity_by_category", "Modelled intensity per category",
               "boxplot", unit, _by_category(model)),
    ]
    if bench is not None:
        reported = [(r.category, r.reported_intensity.value) for r in bench.results
                    if r.reported_intensity is not None]
        ratio = [(r.category, r.ratio) for r in bench.results if r.ratio is not None]
        kept = [(r.category, r.ratio) for r in bench.results if r.ratio is not None and not r.outlier]
        figs += [
            Figure("fig3_reported_intensity_distribution", "Reported intensity, companies per bin",
                   "histogram", unit, _by_category(reported)),
            Figure("fig4_reported_intensity_by_category", "Reported intensity per category",
                   "boxplot", unit, _by_category(reported)),
            Figure("fig5_ratio_by_category", "Modelled / reported intensity per category",
                   "boxplot", "ratio", _by_category(ratio)),
            Figure("fig6_ratio_by_category_excl_outliers",
                   "Modelled / reported intensity per category, outliers removed",
                   "boxplot", "ratio", _by_category(kept)),
        ]
    return [f for f in figs if f.series]


# -- tables ------------------------------------------------------------------

Table = tuple[list[str], list[list]]


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return fmt(x)
    return str(x)


def run_tables(run: ModelRun) -> dict[str, Table]:
    d = run_to_dict(run)
    production = (
        ["region_id", "year", "oil_boe", "gas_boe", "total_boe", "oil_found", "gas_method",
         "gas_inputs", "fallback_reason"],
        [[p["region_id"], p["year"], p["oil_boe"], p["gas_boe"], p["oil_boe"] + p["gas_boe"],
          p["oil_found"], p["gas_method"], ";".join(f"{s}:{y}" for s, y in p["gas_inputs"]),
          p["fallback_reason"]] for p in d["production"]],
    )
    audit_cols = list(d["fusion_audit"][0]) if d["fusion_audit"] else ["region_id"]
    fusion = (audit_cols, [[a[c] for c in audit_cols] for a in d["fusion_audit"]])
    intensity = (
        ["region_id", "intensity_kg_per_boe", "emissions_kg", "oil_boe", "gas_boe", "provenance"],
        [[e["region_id"], e["intensity"], e["emissions_kg"], e["oil_boe"], e["gas_boe"], e["provenance"]]
         for e in d["regional_intensity"]],
    )
    uncovered = (["region_id", "reason"], [[u["region_id"], u["reason"]] for u in d["uncovered"]])
    companies = (
        ["company", "category", "model_intensity_kg_per_boe", "emissions_covered_only_kg",
         "emissions_full_production_kg", "covered_oil_boe", "covered_gas_boe", "uncovered_oil_boe",
         "uncovered_gas_boe"],
        [[c["name"], c["category"], c["model_intensity"], c["total_model_emissions_kg"],
          c["full_production_emissions_kg"], c["covered_oil_boe"], c["covered_gas_boe"],
          c["uncovered_oil_boe"], c["uncovered_gas_boe"]] for c in d["companies"]],
    )
    breakdown = (
        ["company", "entry", "id", "members", "intensity_kg_per_boe", "oil_boe", "gas_boe",
         "emissions_kg", "provenance", "covered"],
        [[c["name"], b["entry"], b["id"], ";".join(b["members"]), b["intensity"], b["oil_boe"],
          b["gas_boe"], b["emissions_kg"], b["provenance"], b["covered"]]
         for c in d["companies"] for b in c["breakdown"]],
    )
    return {
        "production_estimates": production,
        "fusion_audit": fusion,
        "regional_intensity": intensity,
        "uncovered_regions": uncovered,
        "company_models": companies,
        "company_breakdown": breakdown,
    }


def reparsable_tables(run: ModelRun) -> dict[str, Table]:
    """Modelled-year production and directly fused emissions in the input schemas."""
    year = run.target_year
    prod_rows = []
    for rid, rp in run.production.items():
        prod_rows.append([rid, year, "LiquidsDB", rp.production.oil_boe, None, None])
        if rp.gas is not None:
            prod_rows.append([rid, year, "GasDB", None, rp.production.gas_boe, "boe"])
    emis_rows = [
        [a.region_id, a.year, a.chosen_class, a.methane_kg, "kg", a.includes_super_emitters, a.uncertainty_rel]
        for a in run.fusion_audit
        if a.provenance != "BasinWeightedResidual" and a.methane_kg is not None
    ]
    return {
        "modelled_production": (["region_id", "year", "source", "oil_boe", "gas", "gas_unit"], prod_rows),
        "fused_emissions": (
            ["region_id", "year", "source_class", "methane", "unit", "includes_super_emitters", "uncertainty_rel"],
            emis_rows,
        ),
    }


STATS_COLUMNS = ["metric", "category", "n", "mean", "median", "std_dev", "rel_std_dev",
                 "min", "max", "q1", "q3"]


def benchmark_tables(bench: BenchmarkRun) -> dict[str, Table]:
    results = (
        ["company", "category", "model_intensity_kg_per_boe", "reported_intensity_kg_per_boe", "ratio",
         "report_status", "outlier", "outlier_reason"],
        [[r.company, r.category.value, r.model_intensity.value,
          r.reported_intensity.value if r.reported_intensity else None, r.ratio, r.report_status.value,
          r.outlier, r.outlier_reason.value if r.outlier_reason else None] for r in bench.results],
    )
    stats_rows = []
    for metric in METRICS:
        for s in bench.statistics.get(metric, []):
            stats_rows.append([metric, s.category, s.n, s.mean, s.median, s.std_dev, s.rel_std_dev,
                               s.min, s.max, s.q1, s.q3])
    weighted = (
        ["category", "emissions_kg", "covered_boe", "weighted_mean_kg_per_boe"],
        [[w.category, w.emissions_kg, w.covered_boe, w.weighted_mean] for w in bench.weighted],
    )
    return {
        "benchmark": results,
        "statistics": (STATS_COLUMNS, stats_rows),
        "weighted_model_intensity": weighted,
    }


def plot_tables(figs: Sequence[Figure], config: Config) -> dict[str, Table]:
    hist_rows, box_rows = [], []
    for f in figs:
        for label, vals in f.series:
            if f.kind == "histogram":
                for b in histogram(vals, config.histogram_bin_width, config.histogram_origin):
                    hist_rows.append([f.name, label, b.lower, b.upper, b.count])
            else:
                s = boxplot_summary(vals, config.iqr_k, config.quantile_method)
                box_rows.append([f.name, label, s.n, s.min, s.q1, s.median, s.q3, s.max,
                                 s.whisker_low, s.whisker_high, ";".join(fmt(v) for v in s.outliers)])
    return {
        "histograms": (["figure", "panel", "bin_lower", "bin_upper", "count"], hist_rows),
        "boxplots": (["figure", "group", "n", "min", "q1", "median", "q3", "max", "whisker_low",
                      "whisker_high", "outliers"], box_rows),
    }


def table_to_csv(table: Table) -> str:
    header, rows = table
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


# -- text --------------------------------------------------------------------


def _num(x, spec=".4g") -> str:
    return "-" if x is None else format(x, spec)


def _pct(x) -> str:
    return "-" if x is None else f"{100 * x:.1f}%"


def _text_table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
    return lines


def render_text(run: ModelRun, bench: BenchmarkRun | None = None) -> str:
    out = [f"Upstream methane model, target year {run.target_year}", ""]
    out.append("Regional intensities (kgCH4/boe)")
    out += _text_table(
        ["region", "intensity", "emissions_kt", "production_Mboe", "provenance"],
        [[e.region_id, _num(e.intensity.value), _num(e.emissions.kt, ".1f"),
          _num(e.production.total() / 1e6, ".1f"), e.provenance] for e in run.table.entries.values()],
    )
    if run.table.uncovered:
        out.append("Uncovered: " + ", ".join(f"{u.region_id} ({u.reason})" for u in run.table.uncovered))
    out.append("")
    out.append("Company models")
    out += _text_table(
        ["company", "category", "intensity", "emissions_kt", "covered_Mboe", "uncovered_Mboe"],
        [[c.name, c.category.value, _num(c.model_intensity.value), _num(c.total_model_emissions.kt, ".1f"),
          _num(c.covered_production.total() / 1e6, ".1f"), _num(c.uncovered_production.total() / 1e6, ".1f")]
         for c in run.companies],
    )
    cov = run.coverage()
    if cov["share"] is not None:
        out.append(f"Companies cover {_pct(cov['share'])} of country-level production in the inputs.")
    if bench is not None:
        out.append("")
        out.append("Benchmark against reported intensities")
        out += _text_table(
            ["company", "category", "model", "reported", "ratio", "excluded"],
            [[r.company, r.category.value, _num(r.model_intensity.value),
              _num(r.reported_intensity.value if r.reported_intensity else None),
              _num(r.ratio), r.outlier_reason.value if r.outlier_reason else ""] for r in bench.results],
        )
        for metric in METRICS:
            rows = bench.statistics.get(metric, [])
            if not rows:
                continue
            out.append("")
            out.append(f"Statistics: {metric}")
            out += _text_table(
                ["category", "n", "mean", "median", "rel_std", "min", "q1", "q3", "max"],
                [[s.category, str(s.n), _num(s.mean), _num(s.median), _pct(s.rel_std_dev), _num(s.min),
                  _num(s.q1), _num(s.q3), _num(s.max)] for s in rows],
            )
        out.append("")
        out.append("Production-weighted model intensity")
        out += _text_table(
            ["category", "weighted_mean"], [[w.category, _num(w.weighted_mean)] for w in bench.weighted]
        )
    return "\n".join(out) + "\n"


# -- svg ---------------------------------------------------------------------

_W, _H = 640, 400
_M = {"left": 60, "right": 20, "top": 40, "bottom": 50}
_PALETTE = ("#4c72b0", "#dd8452", "#55a868", "#c44e52")


def _c(x: float) -> str:
    return f"{x:.2f}"


def _nice_max(x: float) -> float:
    if x <= 0:
        return 1.0
    mag = 10 ** math.floor(math.log10(x))
    for step in (1, 2, 2.5, 5, 10):
        if x <= step * mag:
            return step * mag
    return 10 * mag  # pragma: no cover


def _svg_doc(title: str, body: list[str], width=_W, height=_H) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(title)}</title>",
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.0f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
    ]
    return "\n".join(head + body + ["</svg>"]) + "\n"


def _axes(x0, y0, x1, y1, ymax, ylabel) -> list[str]:
    parts = [
        f'<line x1="{_c(x0)}" y1="{_c(y1)}" x2="{_c(x1)}" y2="{_c(y1)}" stroke="#000000"/>',
        f'<line x1="{_c(x0)}" y1="{_c(y0)}" x2="{_c(x0)}" y2="{_c(y1)}" stroke="#000000"/>',
    ]
    for i in range(5):
        v = ymax * i / 4
        y = y1 - (y1 - y0) * i / 4
        parts.append(f'<line x1="{_c(x0 - 4)}" y1="{_c(y)}" x2="{_c(x0)}" y2="{_c(y)}" stroke="#000000"/>')
        parts.append(f'<text x="{_c(x0 - 6)}" y="{_c(y + 4)}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="10">{v:.4g}</text>')
    parts.append(f'<text x="14" y="{_c((y0 + y1) / 2)}" font-family="sans-serif" font-size="11" '
                 f'transform="rotate(-90 14 {_c((y0 + y1) / 2)})" text-anchor="middle">{escape(ylabel)}</text>')
    return parts


def svg_histograms(fig: Figure, config: Config) -> str:
    panels = fig.series
    cols = 2 if len(panels) > 1 else 1
    rows = math.ceil(len(panels) / cols)
    pw, ph = _W / cols, (_H - 30) / rows
    body = []
    for idx, (label, vals) in enumerate(panels):
        ox, oy = (idx % cols) * pw, 30 + (idx // cols) * ph
        x0, x1 = ox + 50, ox + pw - 15
        y0, y1 = oy + 20, oy + ph - 30
        bins = histogram(vals, config.histogram_bin_width, config.histogram_origin)
        ymax = _nice_max(max((b.count for b in bins), default=1))
        body.append(f'<text x="{_c((x0 + x1) / 2)}" y="{_c(oy + 12)}" text-anchor="middle" '
                    f'font-family="sans-serif" font-size="12">{escape(label)} (n={len(vals)})</text>')
        body += _axes(x0, y0, x1, y1, ymax, "companies")
        if bins:
            lo, hi = bins[0].lower, bins[-1].upper
            span = hi - lo
            for b in bins:
                bx = x0 + (b.lower - lo) / span * (x1 - x0)
                bw = (b.upper - b.lower) / span * (x1 - x0)
                bh = b.count / ymax * (y1 - y0)
                body.append(f'<rect x="{_c(bx)}" y="{_c(y1 - bh)}" width="{_c(bw)}" height="{_c(bh)}" '
                            f'fill="{_PALETTE[idx % len(_PALETTE)]}" stroke="#ffffff"/>')
            for v, x in ((lo, x0), (hi, x1)):
                body.append(f'<text x="{_c(x)}" y="{_c(y1 + 14)}" text-anchor="middle" '
                            f'font-family="sans-serif" font-size="10">{v:.4g}</text>')
        body.append(f'<text x="{_c((x0 + x1) / 2)}" y="{_c(y1 + 26)}" text-anchor="middle" '
                    f'font-family="sans-serif" font-size="10">{escape(fig.unit)}</text>')
    return _svg_doc(fig.title, body)


def svg_boxplots(fig: Figure, config: Config) -> str:
    x0, x1 = _M["left"], _W - _M["right"]
    y0, y1 = _M["top"], _H - _M["bottom"]
    summaries = [(label, boxplot_summary(vals, config.iqr_k, config.quantile_method)) for label, vals in fig.series]
    ymax = _nice_max(max(s.max for _, s in summaries))
    body = _axes(x0, y0, x1, y1, ymax, fig.unit)

    def y(v):
        return y1 - v / ymax * (y1 - y0)

    slot = (x1 - x0) / len(summaries)
    for i, (label, s) in enumerate(summaries):
        cx = x0 + slot * (i + 0.5)
        half = min(40.0, slot / 4)
        color = _PALETTE[i % len(_PALETTE)]
        body += [
            f'<line x1="{_c(cx)}" y1="{_c(y(s.whisker_low))}" x2="{_c(cx)}" y2="{_c(y(s.q1))}" stroke="#000000"/>',
            f'<line x1="{_c(cx)}" y1="{_c(y(s.q3))}" x2="{_c(cx)}" y2="{_c(y(s.whisker_high))}" stroke="#000000"/>',
            f'<line x1="{_c(cx - half / 2)}" y1="{_c(y(s.whisker_low))}" x2="{_c(cx + half / 2)}" '
            f'y2="{_c(y(s.whisker_low))}" stroke="#000000"/>',
            f'<line x1="{_c(cx - half / 2)}" y1="{_c(y(s.whisker_high))}" x2="{_c(cx + half / 2)}" '
            f'y2="{_c(y(s.whisker_high))}" stroke="#000000"/>',
            f'<rect x="{_c(cx - half)}" y="{_c(y(s.q3))}" width="{_c(2 * half)}" '
            f'height="{_c(y(s.q1) - y(s.q3))}" fill="{color}" fill-opacity="0.6" stroke="#000000"/>',
            f'<line x1="{_c(cx - half)}" y1="{_c(y(s.median))}" x2="{_c(cx + half)}" y2="{_c(y(s.median))}" '
            f'stroke="#000000" stroke-width="2"/>',
        ]
        for v in s.outliers:
            body.append(f'<circle cx="{_c(cx)}" cy="{_c(y(v))}" r="3" fill="none" stroke="#000000"/>')
        body.append(f'<text x="{_c(cx)}" y="{_c(y1 + 16)}" text-anchor="middle" font-family="sans-serif" '
                    f'font-size="11">{escape(label)} (n={s.n})</text>')
    return _svg_doc(fig.title, body)


def render_svg(fig: Figure, config: Config) -> str:
    return svg_histograms(fig, config) if fig.kind == "histogram" else svg_boxplots(fig, config)


# -- rendering ---------------------------------------------------------------


def render_report(
    run: ModelRun, bench: BenchmarkRun | None, config: Config, fmt_: ReportFormat | str
) -> dict[str, str]:
    """Return file name -> content for one output format."""
    fmt_ = ReportFormat(fmt_)
    figs = figures(run, bench)
    if fmt_ is ReportFormat.TEXT:
        return {"report.txt": render_text(run, bench)}
    if fmt_ is ReportFormat.DELIMITED:
        tables = {**run_tables(run), **reparsable_tables(run)}
        if bench is not None:
            tables.update(benchmark_tables(bench))
        tables.update(plot_tables(figs, config))
        return {f"{name}.csv": table_to_csv(t) for name, t in tables.items()}
    if fmt_ is ReportFormat.STRUCTURED:
        doc = {"run": run_to_dict(run)}
        if bench is not None:
            doc["benchmark"] = benchmark_to_dict(bench)
        plots = plot_tables(figs, config)
        doc["plots"] = {name: [dict(zip(h, r)) for r in rows] for name, (h, rows) in plots.items()}
        return {"report.json": dump_json(doc)}
    return {f"{f.name}.svg": render_svg(f, config) for f in figs}


def model_files(run: ModelRun) -> dict[str, str]:
    files = {f"{name}.csv": table_to_csv(t) for name, t in run_tables(run).items()}
    files["run.json"] = dump_json(run_to_dict(run))
    files["config.json"] = dump_json(run.config.to_dict())
    return files


def benchmark_files(bench: BenchmarkRun) -> dict[str, str]:
    files = {f"{name}.csv": table_to_csv(t) for name, t in benchmark_tables(bench).items()}
    files["benchmark.json"] = dump_json(benchmark_to_dict(bench))
    files["config.json"] = dump_json(bench.config.to_dict())
    return files


@contextmanager
def staged_directory(out: str | Path, force: bool = False):
    """Yield a scratch directory that becomes ``out`` only if the block succeeds.

    A failure leaves no trace of ``out``. An existing non-empty ``out`` is an
    error unless ``force`` is set, in which case it is replaced.
    """
    out = Path(out)
    if out.exists() and (not out.is_dir() or any(out.iterdir())) and not force:
        raise FileExistsError(f"output directory {out} already exists and is not empty (use --force)")
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    umask = os.umask(0)
    os.umask(umask)
    tmp.chmod(0o777 & ~umask)
    try:
        yield tmp
    except BaseException:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    old = None
    if out.exists():
        old = Path(tempfile.mkdtemp(prefix=f".{out.name}.old.", dir=out.parent))
        os.replace(out, old / "prev")
    os.replace(tmp, out)
    if old is not None:
        shutil.rmtree(old, ignore_errors=True)


def write_files(directory: Path, files: dict[str, str]) -> list[Path]:
    paths = []
    for name in sorted(files):
        p = directory / name
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(files[name])
        paths.append(p)
    return paths


__all__ = [
    "BoxplotSummary", "Figure", "HistogramBin", "ReportFormat", "benchmark_files",
    "boxplot_summary", "figures", "histogram", "model_files", "render_report", "render_svg",
    "render_text", "staged_directory", "write_files",
]
