"""Command-line front end.

    ogmethane validate  --inputs DIR
    ogmethane model     --inputs DIR --config cfg.yaml --out runs/2022
    ogmethane benchmark --run runs/2022 --reported reported.csv --out runs/2022-bench
    ogmethane report    --run runs/2022 --benchmark runs/2022-bench --format svg --out fig/

``--inputs DIR`` picks up regions.csv, production.csv, emissions.csv,
profiles.csv and reported.csv from DIR; the per-file flags override it.

Exit codes: 0 success, 2 usage, 3 input data or configuration, 4 computation,
5 file-system I/O.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .config import Config, load_config, parse_outlier_flag
from .errors import ComputationError, ConfigurationError, IngestionError, MethaneModelError
from .ingestion import (
    load_inputs,
    parse_emissions,
    parse_production,
    parse_profiles,
    parse_regions,
    parse_reported,
)
from .pipeline import load_benchmark, load_run, run_benchmark, run_model
from .report import (
    ReportFormat,
    benchmark_files,
    model_files,
    render_report,
    staged_directory,
    write_files,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_COMPUTATION = 4
EXIT_IO = 5

INPUT_FILES = ("regions", "production", "emissions", "profiles", "reported")

log = logging.getLogger("ogmethane")


class UsageError(Exception):
    pass


def _input_args(p: argparse.ArgumentParser, *, reported: bool) -> None:
    p.add_argument("--inputs", metavar="DIR", help="directory holding the standard input file names")
    names = INPUT_FILES if reported else INPUT_FILES[:-1]
    for name in names:
        p.add_argument(f"--{name}", metavar="CSV", help=f"{name} table (overrides --inputs)")


def _config_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="YAML", help="configuration file")
    p.add_argument("--gas-boe-factor", type=float, metavar="SCF", help="scf of gas per boe")
    p.add_argument("--trend-window", type=int, metavar="YEARS", help="years in the gas trend fit")
    p.add_argument("--outliers", metavar="POLICY", help="comma list of manual,iqr or 'none'")


def _out_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", required=True, metavar="DIR", help="output directory (created atomically)")
    p.add_argument("--force", action="store_true", help="replace an existing output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ogmethane", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check input files and configuration")
    _input_args(p, reported=True)
    _config_args(p)

    p = sub.add_parser("model", help="estimate production, fuse emissions and model companies")
    _input_args(p, reported=False)
    _config_args(p)
    p.add_argument("--jobs", type=int, default=1, metavar="N", help="worker threads (output is identical)")
    _out_args(p)

    p = sub.add_parser("benchmark", help="compare a model run with reported metrics")
    p.add_argument("--run", required=True, metavar="DIR", help="output directory of 'model'")
    p.add_argument("--reported", required=True, metavar="CSV")
    _config_args(p)
    _out_args(p)

    p = sub.add_parser("report", help="render tables and figures")
    p.add_argument("--run", required=True, metavar="DIR")
    p.add_argument("--benchmark", metavar="DIR", help="output directory of 'benchmark'")
    p.add_argument("--format", required=True, choices=[f.value for f in ReportFormat])
    p.add_argument("--config", metavar="YAML", help="override plotting/statistics settings")
    _out_args(p)
    return parser


def _resolve_inputs(args, names) -> dict[str, Path | None]:
    base = Path(args.inputs) if getattr(args, "inputs", None) else None
    paths = {}
    for name in names:
        explicit = getattr(args, name, None)
        if explicit:
            paths[name] = Path(explicit)
        elif base is not None and (base / f"{name}.csv").exists():
            paths[name] = base / f"{name}.csv"
        else:
            paths[name] = None
    return paths


def _effective_config(args, base: Config | None = None) -> Config:
    config = load_config(args.config) if getattr(args, "config", None) else (base or Config())
    outliers = getattr(args, "outliers", None)
    return config.replace(
        gas_boe_factor=getattr(args, "gas_boe_factor", None),
        trend_window=getattr(args, "trend_window", None),
        outlier_policy=parse_outlier_flag(outliers) if outliers is not None else None,
    )


def cmd_validate(args) -> int:
    config = _effective_config(args)
    paths = _resolve_inputs(args, INPUT_FILES)
    if paths["regions"] is None:
        raise UsageError("validate needs a regions table (--regions or --inputs)")
    registry = parse_regions(paths["regions"])
    summary = [f"regions: {len(registry)}"]
    if paths["production"]:
        summary.append(f"production rows: {len(parse_production(paths['production'], registry, config.gas_boe_factor).rows)}")
    if paths["emissions"]:
        summary.append(f"emission rows: {len(parse_emissions(paths['emissions'], registry).rows)}")
    if paths["profiles"]:
        summary.append(f"company profiles: {len(parse_profiles(paths['profiles'], registry))}")
    if paths["reported"]:
        summary.append(f"reported companies: {len(parse_reported(paths['reported']))}")
    print("ok: " + ", ".join(summary))
    return EXIT_OK


def cmd_model(args) -> int:
    config = _effective_config(args)
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    paths = _resolve_inputs(args, INPUT_FILES[:-1])
    missing = [n for n, p in paths.items() if p is None]
    if missing:
        raise UsageError(f"missing input table(s): {', '.join(missing)}")
    inputs = load_inputs(
        paths["regions"], paths["production"], paths["emissions"], paths["profiles"],
        gas_boe_factor=config.gas_boe_factor,
    )
    run = run_model(inputs, config, jobs=args.jobs)
    files = model_files(run)
    with staged_directory(args.out, args.force) as tmp:
        write_files(tmp, files)
    print(f"model run written to {args.out} ({len(run.companies)} companies)")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    run = _load(load_run, args.run)
    config = _effective_config(args, run.config)
    reported = parse_reported(args.reported)
    bench = run_benchmark(run, reported, config)
    files = benchmark_files(bench)
    with staged_directory(args.out, args.force) as tmp:
        write_files(tmp, files)
    print(f"benchmark written to {args.out} ({sum(r.ratio is not None for r in bench.results)} ratios)")
    return EXIT_OK


def cmd_report(args) -> int:
    run = _load(load_run, args.run)
    bench = _load(load_benchmark, args.benchmark) if args.benchmark else None
    base = bench.config if bench is not None else run.config
    config = load_config(args.config) if args.config else base
    files = render_report(run, bench, config, ReportFormat(args.format))
    with staged_directory(args.out, args.force) as tmp:
        write_files(tmp, files)
    print(f"{len(files)} file(s) written to {args.out}")
    return EXIT_OK


def _load(loader, path):
    try:
        return loader(path)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MethaneModelError):
            raise
        raise IngestionError(f"not a readable run artifact: {exc}", str(path)) from None


COMMANDS = {
    "validate": cmd_validate,
    "model": cmd_model,
    "benchmark": cmd_benchmark,
    "report": cmd_report,
}


def _fail(kind: str, message: str, code: int) -> int:
    print(f"ogmethane: error[{kind}]: {message}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        return _fail("usage", str(exc), EXIT_USAGE)
    except (IngestionError, ConfigurationError) as exc:
        return _fail(exc.module, str(exc), EXIT_DATA)
    except ComputationError as exc:
        return _fail(exc.module, str(exc), EXIT_COMPUTATION)
    except MethaneModelError as exc:
        return _fail(exc.module, str(exc), EXIT_COMPUTATION)
    except OSError as exc:
        where = exc.filename or ""
        return _fail("io", f"{where}: {exc.strerror or exc}" if where else str(exc), EXIT_IO)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
