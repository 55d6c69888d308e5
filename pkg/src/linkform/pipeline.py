"""Warmup + study run loop over a directory of day files."""
from __future__ import annotations

import gc
import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .classify import ClassifierConfig, Denominator, PaPolicy, classify_batch
from .graph import DynamicGraph
from .ingest import DayFile, IngestStats, InputError, day_file_sequence, list_day_files, load_day
from .metrics import MetricsEngine, RunReport

log = logging.getLogger(__name__)


@dataclass
class RunConfig:
    input_dir: str = "."
    out_dir: str = "out"
    warmup_days: int = 3
    study_days: int = 15
    beta: float = 4.0e-6
    age_window_days: int = 3
    pa_endpoint_policy: str = PaPolicy.CALLEE_ONLY.value
    denominator: str = Denominator.EXCLUSIVE.value
    formats: tuple = ("csv", "json")
    timings: bool = False

    def classifier(self) -> ClassifierConfig:
        return ClassifierConfig(
            beta=self.beta,
            pa_endpoint_policy=PaPolicy(self.pa_endpoint_policy),
            age_window_days=self.age_window_days,
            denominator=Denominator(self.denominator),
        )

    def echo(self) -> dict:
        """Config block written into summary.json (paths excluded)."""
        d = asdict(self)
        for k in ("input_dir", "out_dir", "formats", "timings"):
            d.pop(k)
        return d


@dataclass
class RunResult:
    report: RunReport
    graph: DynamicGraph
    ingest: dict[int, IngestStats] = field(default_factory=dict)
    probabilities: dict[int, np.ndarray] = field(default_factory=dict)
    events: int = 0
    seconds: float = 0.0

    @property
    def summaries(self):
        return self.report.summaries


def run_analysis(cfg: RunConfig, backend: str | None = None, keep_probabilities: bool = False,
                 days: list[DayFile] | None = None) -> RunResult:
    """Replay the day files through the graph, classifying edges on study days."""
    ccfg = cfg.classifier()
    if days is None:
        days = day_file_sequence(cfg.input_dir, cfg.warmup_days, cfg.study_days)
    graph = DynamicGraph(backend)
    metrics = MetricsEngine(graph, keep_probabilities=keep_probabilities)
    ingest: dict[int, IngestStats] = {}
    seq = 0
    # the loop allocates millions of acyclic objects (subscriber strings, ids);
    # full collections would rescan the whole growing heap every few thousand
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        seq = _replay(days, graph, metrics, ingest, ccfg)
        seconds = time.perf_counter() - t0
    finally:
        if was_enabled:
            gc.enable()
    report = RunReport(metrics.summaries, metrics.degree_hists, metrics.pa_hists, cfg.echo())
    return RunResult(report, graph, ingest, metrics.probabilities, seq, seconds)


def _replay(days, graph, metrics, ingest, ccfg) -> int:
    seq = 0
    for df in days:
        metrics.begin_day(df.day, df.analyze)
        events, stats = load_day(df.path, df.day, graph, first_sequence=seq)
        seq += len(events)
        ingest[df.day] = stats
        batch = graph.insert_batch(events.u, events.v)
        labels = None
        if df.analyze:
            labels = classify_batch(batch, graph.birth_days(), df.day, metrics.averages, ccfg)
        metrics.record_batch(batch, labels)
        s = metrics.end_day()
        log.info("day %d (%s): %d events, |V|=%d |E|=%d", df.day, df.path.name, len(events),
                 s.n_nodes, s.n_edges)
    return seq


def bench(cfg: RunConfig, max_days: int | None = None, backend: str | None = None,
          repeat: int = 3) -> list[dict]:
    """Re-run the pipeline from scratch on day-file prefixes 1..D.

    Each prefix uses ``min(warmup, d)`` build-only days; the rest are analyzed.
    ``total_ms`` is the fastest of ``repeat`` runs.
    """
    if repeat < 1:
        raise ValueError("repeat must be >= 1")
    all_files = list_day_files(cfg.input_dir)
    if max_days is None:
        max_days = cfg.warmup_days + cfg.study_days
    if max_days > len(all_files):
        raise InputError(f"{cfg.input_dir} holds {len(all_files)} day file(s); bench needs {max_days}")
    rows = []
    for d in range(1, max_days + 1):
        warm = min(cfg.warmup_days, d)
        days = [DayFile(i, p, i >= warm) for i, p in enumerate(all_files[:d])]
        runs = [run_analysis(cfg, backend=backend, days=days) for _ in range(repeat)]
        res = runs[0]
        rows.append({
            "days": d,
            "total_ms": min(r.seconds for r in runs) * 1e3,
            "events": res.events,
            "edges": res.graph.n_edges,
        })
        log.info("bench prefix %d: %.1f ms, %d events", d, res.seconds * 1e3, res.events)
    return rows


def loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])
