"""Command-line entry point: ``linkform {generate,analyze,report,bench}``.

Exit codes: 0 success, 1 runtime/data error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from . import __version__
from .graph import BACKENDS
from .ingest import InputError
from .metrics import export, load_report
from .pipeline import RunConfig, bench, loglog_slope, run_analysis
from .synth import GenConfig, Model, generate

log = logging.getLogger("linkform")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

_RUN_DEFAULTS = RunConfig()
_FORMATS = {"csv": ("csv",), "json": ("json",), "both": ("csv", "json")}


def _unit_interval(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]: {text}")
    return x


def _non_negative(text: str) -> int:
    try:
        x = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if x < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text}")
    return x


def _positive(text: str) -> int:
    x = _non_negative(text)
    if x == 0:
        raise argparse.ArgumentTypeError("must be >= 1")
    return x


def _weights(text: str) -> tuple[float, float, float]:
    try:
        w = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected W_PA,W_TC,W_R, got {text!r}") from None
    if len(w) != 3:
        raise argparse.ArgumentTypeError(f"expected three weights, got {len(w)}")
    return w


def _add_run_options(p: argparse.ArgumentParser, bench_mode: bool = False) -> None:
    d = _RUN_DEFAULTS
    p.add_argument("-i", "--input", dest="input_dir", required=True,
                   help="directory of YYYYMMDD.csv day files")
    p.add_argument("-o", "--out", dest="out_dir", required=True, help="output directory")
    p.add_argument("--config", help="JSON file of run settings; flags override it")
    warm_default = 0 if bench_mode else d.warmup_days
    p.add_argument("--warmup", dest="warmup_days", type=_non_negative, default=None,
                   help=f"build-only days before classification starts (default: {warm_default}; "
                        "the default protocol builds for 3 days then studies 15)")
    p.add_argument("--days", dest="study_days", type=_non_negative, default=None,
                   help=f"number of analyzed days after warmup (default: {d.study_days})")
    p.add_argument("--beta", type=_unit_interval, default=None,
                   help=f"PA probability threshold (default: {d.beta:.2E})")
    p.add_argument("--age-window", dest="age_window_days", type=_non_negative, default=None,
                   help=f"days a node counts as young (default: {d.age_window_days})")
    p.add_argument("--pa-policy", dest="pa_endpoint_policy", choices=["callee", "either", "both"],
                   default=None,
                   help="endpoint(s) whose probability is tested against beta (default: callee)")
    p.add_argument("--denominator", choices=["exclusive", "standard"], default=None,
                   help="exclusive: k / (sum of other degrees); standard: k / 2|E| "
                        "(default: exclusive)")
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None,
                   help="kernels for graph updates and file scanning (default: compiled when built)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkform",
                                     description="Replay CDR day files and classify link formation.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic labelled stream")
    g.add_argument("--model", choices=[m.value for m in Model], default="ba",
                   help="growth model (default: ba)")
    g.add_argument("--days", type=_positive, default=18, help="number of day files (default: 18)")
    g.add_argument("--nodes-per-day", type=_non_negative, default=100,
                   help="newcomers per day (default: 100)")
    g.add_argument("--m", type=_positive, default=2,
                   help="edges (or edge slots) per newcomer (default: 2)")
    g.add_argument("--weights", type=_weights, default=(1 / 3, 1 / 3, 1 / 3),
                   help="mixed model W_PA,W_TC,W_R summing to 1 (default: equal)")
    g.add_argument("--seed", type=int, default=0, help="64-bit RNG seed (default: 0)")
    g.add_argument("-o", "--out", required=True, help="output directory")

    a = sub.add_parser("analyze", help="run the warmup + study protocol and export reports")
    _add_run_options(a)
    a.add_argument("--format", choices=sorted(_FORMATS), default=None,
                   help="export format (default: both)")
    a.add_argument("--timings", action="store_true", default=None,
                   help="fill wall_time_ms in summary.csv/json (breaks byte-identical reruns)")

    r = sub.add_parser("report", help="re-export a finished run from its summary.json")
    r.add_argument("--run", required=True, help="directory holding summary.json")
    r.add_argument("-o", "--out", required=True, help="output directory")
    r.add_argument("--format", choices=sorted(_FORMATS), default="both")

    b = sub.add_parser("bench", help="time the pipeline on day-file prefixes 1..D")
    _add_run_options(b, bench_mode=True)
    b.add_argument("--max-days", type=_positive, default=None,
                   help="largest prefix D (default: warmup + days)")
    b.add_argument("--repeat", type=_positive, default=3,
                   help="runs per prefix; the fastest is kept (default: 3)")
    return parser


def _run_config(args, parser, bench_mode=False) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(values) - known
        if unknown:
            parser.error(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if bench_mode and "warmup_days" not in values:
        values["warmup_days"] = 0
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            values[f.name] = v
    fmt = getattr(args, "format", None)
    if fmt is not None:
        values["formats"] = _FORMATS[fmt]
    elif "formats" in values and isinstance(values["formats"], str):
        values["formats"] = _FORMATS.get(values["formats"], ("csv", "json"))
    try:
        cfg = RunConfig(**values)
        cfg.classifier()
    except (TypeError, ValueError) as exc:
        parser.error(str(exc))
    return cfg


def cmd_generate(args, parser) -> int:
    try:
        cfg = GenConfig(model=args.model, days=args.days, nodes_per_day=args.nodes_per_day,
                        m=args.m, weights=args.weights, seed=args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    res = generate(cfg, args.out)
    print(res.summary_line())
    return EXIT_OK


def cmd_analyze(args, parser) -> int:
    cfg = _run_config(args, parser)
    res = run_analysis(cfg, backend=args.backend)
    export(res.report, cfg.out_dir, cfg.formats, timings=cfg.timings)
    analyzed = [s for s in res.summaries if s.analyzed]
    new = sum(s.new_edges for s in analyzed)
    rate = res.events / res.seconds if res.seconds > 0 else float("inf")
    msg = (f"{len(res.summaries)} days ({len(analyzed)} analyzed), |V|={res.graph.n_nodes} "
           f"|E|={res.graph.n_edges}, {res.events} events in {res.seconds:.2f}s "
           f"({rate:,.0f} events/s, {res.graph.backend} kernel)")
    if new:
        pa = sum(s.pa for s in analyzed) / new
        tc = sum(s.tc for s in analyzed) / new
        r = sum(s.r for s in analyzed) / new
        msg += f"; PA {pa:.3f} TC {tc:.3f} R {r:.3f}"
    print(msg)
    return EXIT_OK


def cmd_report(args, parser) -> int:
    report = load_report(args.run)
    export(report, args.out, _FORMATS[args.format], timings=True)
    print(f"re-exported {len(report.summaries)} days to {args.out}")
    return EXIT_OK


def cmd_bench(args, parser) -> int:
    cfg = _run_config(args, parser, bench_mode=True)
    rows = bench(cfg, max_days=args.max_days, backend=args.backend, repeat=args.repeat)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "bench.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=["days", "total_ms", "events", "edges"], lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    usable = [r for r in rows if r["events"] > 0 and r["total_ms"] > 0]
    if len(usable) >= 2:
        slope = loglog_slope([r["events"] for r in usable], [r["total_ms"] for r in usable])
        print(f"{len(rows)} prefixes; log-log time/events slope {slope:.3f}")
    else:
        print(f"{len(rows)} prefixes")
    return EXIT_OK


COMMANDS = {"generate": cmd_generate, "analyze": cmd_analyze, "report": cmd_report, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, parser)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    except (InputError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"linkform: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
