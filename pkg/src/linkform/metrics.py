"""Per-day summaries, histograms and their on-disk exports."""
from __future__ import annotations

import csv
import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import (
    HIGH_HIGH,
    LOW_LOW,
    MIXED,
    AgeClass,
    BatchLabels,
    ClusteringClass,
    DayAverages,
    DegreeClass,
    LocalClasses,
    MechanismLabel,
    snapshot_averages,
)
from .graph import DynamicGraph, EdgeBatch, InsertOutcome

SUMMARY_COLUMNS = [
    "day", "n_nodes", "n_edges", "new_nodes", "new_edges", "density", "avg_cc",
    "avg_degree", "max_degree", "pa", "tc", "r", "dhh", "dll", "dhl", "chh",
    "cll", "chl", "ajj", "aoo", "ajo", "wall_time_ms",
]
CLASS_COLUMNS = ["pa", "tc", "r", "dhh", "dll", "dhl", "chh", "cll", "chl", "ajj", "aoo", "ajo"]
PROPORTION_COLUMNS = [
    "day", "new_edges", "pa", "tc", "r", "pa_tc_overlap",
    "dhh", "dll", "dhl", "chh", "cll", "chl", "ajj", "aoo", "ajo",
]

# exact-zero bin followed by 60 log-spaced bins over [1e-9, 1]
PA_BIN_EDGES = np.logspace(-9.0, 0.0, 61)
N_PA_BINS = len(PA_BIN_EDGES)  # zero bin + 60


class ProtocolError(RuntimeError):
    """begin_day / end_day called out of order."""


@dataclass
class DaySummary:
    day: int
    n_nodes: int
    n_edges: int
    new_nodes: int
    new_edges: int
    density: float
    avg_cc: float
    avg_degree: float
    max_degree: int
    pa: int | None = None
    tc: int | None = None
    r: int | None = None
    dhh: int | None = None
    dll: int | None = None
    dhl: int | None = None
    chh: int | None = None
    cll: int | None = None
    chl: int | None = None
    ajj: int | None = None
    aoo: int | None = None
    ajo: int | None = None
    wall_time_ms: float | None = None
    analyzed: bool = True
    pa_tc_overlap: int | None = None
    pa_undefined: int | None = None
    events: int = 0
    avg_degree_threshold: float | None = None
    avg_cc_threshold: float | None = None


@dataclass
class Histogram:
    kind: str  # "degree" or "pa_probability"
    day: int
    bins: list  # degree: (degree, count); pa_probability: (lower, upper, count)

    def total(self) -> int:
        return int(sum(b[-1] for b in self.bins))


def pa_bin_index(p: np.ndarray) -> np.ndarray:
    """Bin 0 holds exact zeros; bins 1..60 are log-spaced, clamped at both ends."""
    p = np.asarray(p, dtype=np.float64)
    idx = np.searchsorted(PA_BIN_EDGES, p, side="right")
    idx = np.clip(idx, 1, N_PA_BINS - 1)
    idx[p <= 0.0] = 0
    return idx


def pa_histogram(day: int, counts: np.ndarray) -> Histogram:
    bins = [(0.0, 0.0, int(counts[0]))]
    for i in range(1, N_PA_BINS):
        bins.append((float(PA_BIN_EDGES[i - 1]), float(PA_BIN_EDGES[i]), int(counts[i])))
    return Histogram("pa_probability", day, bins)


def degree_histogram(day: int, degrees: np.ndarray) -> Histogram:
    counts = np.bincount(degrees) if len(degrees) else np.zeros(0, dtype=np.int64)
    nz = np.flatnonzero(counts)
    return Histogram("degree", day, [(int(k), int(counts[k])) for k in nz])


_DEG = {HIGH_HIGH: "dhh", LOW_LOW: "dll", MIXED: "dhl"}
_CC = {HIGH_HIGH: "chh", LOW_LOW: "cll", MIXED: "chl"}
_AGE = {HIGH_HIGH: "ajj", LOW_LOW: "aoo", MIXED: "ajo"}
_SCALAR_KEYS = {
    DegreeClass.DHH: "dhh", DegreeClass.DLL: "dll", DegreeClass.DHL: "dhl",
    ClusteringClass.CHH: "chh", ClusteringClass.CLL: "cll", ClusteringClass.CHL: "chl",
    AgeClass.AJJ: "ajj", AgeClass.AOO: "aoo", AgeClass.AJO: "ajo",
}


class MetricsEngine:
    """Accumulates one DaySummary per day from the run loop."""

    def __init__(self, graph: DynamicGraph, keep_probabilities: bool = False):
        self.graph = graph
        self.summaries: list[DaySummary] = []
        self.degree_hists: dict[int, Histogram] = {}
        self.pa_hists: dict[int, Histogram] = {}
        self.keep_probabilities = keep_probabilities
        self.probabilities: dict[int, np.ndarray] = {}
        self._open = False
        self._day = None
        self.averages: DayAverages | None = None

    def begin_day(self, day: int, analyze: bool = True) -> DayAverages:
        if self._open:
            raise ProtocolError(f"begin_day({day}) while day {self._day} is still open")
        self._open = True
        self._day = day
        self._analyze = analyze
        self._t0 = time.perf_counter()
        self._nodes0 = self.graph.n_nodes
        self._new_edges = 0
        self._events = 0
        self._counts = dict.fromkeys(CLASS_COLUMNS, 0)
        self._overlap = 0
        self._undefined = 0
        self._pa_counts = np.zeros(N_PA_BINS, dtype=np.int64)
        self._probs: list[np.ndarray] = []
        self.averages = snapshot_averages(self.graph, day)
        return self.averages

    def _require_open(self):
        if not self._open:
            raise ProtocolError("no day is open; call begin_day first")

    def record_edge(self, outcome: InsertOutcome, mech: MechanismLabel | None = None,
                    local: LocalClasses | None = None, p: float | None = None) -> None:
        self._require_open()
        self._events += 1
        if not outcome.added:
            return
        self._new_edges += 1
        if not self._analyze or mech is None:
            return
        c = self._counts
        c["pa"] += mech.is_pa
        c["tc"] += mech.is_tc
        c["r"] += mech.is_r
        self._overlap += mech.is_pa and mech.is_tc
        for cls in (local.degree_class, local.clustering_class, local.age_class):
            c[_SCALAR_KEYS[cls]] += 1
        prob = 0.0 if p is None else p
        self._pa_counts[pa_bin_index(np.array([prob]))[0]] += 1
        if self.keep_probabilities:
            self._probs.append(np.array([prob]))

    def record_batch(self, batch: EdgeBatch, labels: BatchLabels | None = None) -> None:
        self._require_open()
        self._events += len(batch)
        n_added = int(np.count_nonzero(batch.added))
        self._new_edges += n_added
        if not self._analyze or labels is None:
            return
        if len(labels) != n_added:
            raise ValueError("labels do not match the batch's added edges")
        c = self._counts
        c["pa"] += int(labels.is_pa.sum())
        c["tc"] += int(labels.is_tc.sum())
        c["r"] += int(labels.is_r.sum())
        self._overlap += int((labels.is_pa & labels.is_tc).sum())
        self._undefined += int(labels.undefined_probability.sum())
        for codes, names in ((labels.degree, _DEG), (labels.clustering, _CC), (labels.age, _AGE)):
            counts = np.bincount(codes, minlength=3)
            for code, name in names.items():
                c[name] += int(counts[code])
        self._pa_counts += np.bincount(pa_bin_index(labels.probability), minlength=N_PA_BINS)
        if self.keep_probabilities:
            self._probs.append(labels.probability.copy())

    def end_day(self) -> DaySummary:
        self._require_open()
        stats = self.graph.global_stats()
        day = self._day
        s = DaySummary(
            day=day,
            n_nodes=stats.n_nodes,
            n_edges=stats.n_edges,
            new_nodes=stats.n_nodes - self._nodes0,
            new_edges=self._new_edges,
            density=stats.density,
            avg_cc=stats.avg_cc,
            avg_degree=stats.avg_degree,
            max_degree=stats.max_degree,
            analyzed=self._analyze,
            events=self._events,
        )
        if self._analyze:
            for k, val in self._counts.items():
                setattr(s, k, val)
            s.pa_tc_overlap = self._overlap
            s.pa_undefined = self._undefined
            s.avg_degree_threshold = self.averages.avg_degree
            s.avg_cc_threshold = self.averages.avg_cc
            self.pa_hists[day] = pa_histogram(day, self._pa_counts)
            if self.keep_probabilities:
                self.probabilities[day] = (np.concatenate(self._probs) if self._probs
                                           else np.zeros(0))
        self.degree_hists[day] = degree_histogram(day, self.graph.degrees())
        s.wall_time_ms = (time.perf_counter() - self._t0) * 1e3
        self.summaries.append(s)
        self._open = False
        return s


# -- export ------------------------------------------------------------------

@dataclass
class RunReport:
    summaries: list[DaySummary]
    degree_hists: dict[int, Histogram]
    pa_hists: dict[int, Histogram]
    config: dict = field(default_factory=dict)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def proportions(s: DaySummary) -> list | None:
    if not s.analyzed:
        return None
    n = s.new_edges
    row = [s.day, n]
    for name in ["pa", "tc", "r", "pa_tc_overlap"] + CLASS_COLUMNS[3:]:
        row.append(getattr(s, name) / n if n else None)
    return row


def export(report: RunReport, out_dir, formats=("csv", "json"), timings: bool = False) -> list[Path]:
    """Write the run's series and histograms; returns the files written.

    ``wall_time_ms`` is left blank in summary.csv/json unless ``timings`` is
    set, so repeated runs stay byte-identical; timings.csv always carries it.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    written = []
    formats = set(formats)

    def wall(s):
        return s.wall_time_ms if timings else None

    if "csv" in formats:
        p = out / "summary.csv"
        _write_csv(p, SUMMARY_COLUMNS,
                   ([getattr(s, c) for c in SUMMARY_COLUMNS[:-1]] + [wall(s)] for s in report.summaries))
        written.append(p)
        p = out / "proportions.csv"
        _write_csv(p, PROPORTION_COLUMNS,
                   (r for r in map(proportions, report.summaries) if r is not None))
        written.append(p)
        for day, h in sorted(report.degree_hists.items()):
            p = out / f"degree_hist_day{day}.csv"
            _write_csv(p, ["degree", "count"], h.bins)
            written.append(p)
        for day, h in sorted(report.pa_hists.items()):
            p = out / f"pa_prob_hist_day{day}.csv"
            _write_csv(p, ["lower_bound", "upper_bound", "count"], h.bins)
            written.append(p)
    if "json" in formats:
        days = []
        for s in report.summaries:
            d = dataclasses.asdict(s)
            d["wall_time_ms"] = wall(s)
            days.append(d)
        doc = {
            "config": report.config,
            "days": days,
            "histograms": {
                "degree": {str(d): [list(b) for b in h.bins] for d, h in sorted(report.degree_hists.items())},
                "pa_probability": {str(d): [list(b) for b in h.bins] for d, h in sorted(report.pa_hists.items())},
            },
        }
        p = out / "summary.json"
        with open(p, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1, sort_keys=False)
            fh.write("\n")
        written.append(p)
    p = out / "timings.csv"
    _write_csv(p, ["day", "wall_time_ms", "events"],
               ([s.day, s.wall_time_ms, s.events] for s in report.summaries))
    written.append(p)
    return written


def load_report(run_dir) -> RunReport:
    """Rebuild a RunReport from a previous run's summary.json."""
    path = Path(run_dir) / "summary.json"
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    names = {f.name for f in dataclasses.fields(DaySummary)}
    summaries = [DaySummary(**{k: v for k, v in d.items() if k in names}) for d in doc["days"]]
    hists = doc.get("histograms", {})
    degree = {int(d): Histogram("degree", int(d), [tuple(b) for b in bins])
              for d, bins in hists.get("degree", {}).items()}
    pa = {int(d): Histogram("pa_probability", int(d), [tuple(b) for b in bins])
          for d, bins in hists.get("pa_probability", {}).items()}
    return RunReport(summaries, degree, pa, doc.get("config", {}))
