"""Seeded synthetic CDR streams with ground-truth formation labels.

Three growth models write day files in the ingest format plus a
``ground_truth.csv`` sidecar (``day,u,v,mechanism,origin``):

* ``ba``: Barabási–Albert growth from an (m+1)-clique; each newcomer picks m
  distinct targets with probability proportional to degree.
* ``random``: every day adds ``nodes_per_day`` nodes and ``m * nodes_per_day``
  uniformly random new edges.
* ``mixed``: every newcomer arrives with one degree-proportional edge, then
  ``m`` edge slots each draw a mechanism from ``(w_pa, w_tc, w_r)``.

RNG: numpy ``PCG64`` seeded through ``SeedSequence(seed, spawn_key=(day, s))``
where ``s = 0`` drives topology and ``s = 1`` drives cosmetic fields
(durations), so each day's stream is independent of how many draws earlier
days consumed for cosmetics.
"""
from __future__ import annotations

import csv
import datetime as dt
import enum
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

START_DATE = dt.date(2009, 6, 1)
_BUFFER = 8192


class Model(str, enum.Enum):
    BA = "ba"
    RANDOM = "random"
    MIXED = "mixed"


class Mechanism(str, enum.Enum):
    PREF_ATTACH = "PrefAttach"
    TRI_CLOSE = "TriClose"
    RANDOM = "Random"


# origin column of the sidecar
SEED, ARRIVAL, SLOT, FALLBACK = "seed", "arrival", "slot", "fallback"


@dataclass(frozen=True)
class GenConfig:
    model: Model = Model.BA
    days: int = 18
    nodes_per_day: int = 100
    m: int = 2
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    seed: int = 0
    start_date: dt.date = START_DATE

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != 3 or min(w) < 0 or abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must be three non-negative numbers summing to 1, got {w}")
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.days < 1:
            raise ValueError("days must be >= 1")
        if self.nodes_per_day < 0:
            raise ValueError("nodes_per_day must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class GenResult:
    config: dict
    files: list[Path]
    n_nodes: int = 0
    n_edges: int = 0
    mechanisms: dict = field(default_factory=dict)
    origins: dict = field(default_factory=dict)
    fallbacks: dict = field(default_factory=dict)
    truncated: int = 0

    def summary_line(self) -> str:
        mech = " ".join(f"{k}={v}" for k, v in sorted(self.mechanisms.items()))
        fb = sum(self.fallbacks.values())
        return (f"{self.config['model']}: {len(self.files)} day files, {self.n_nodes} nodes, "
                f"{self.n_edges} edges ({mech}; fallbacks={fb}, truncated={self.truncated})")


def day_rng(seed: int, day: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(day, stream))))


class _Uniform:
    """Buffered U[0, 1) draws; the draw order is the determinism contract."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._buf = rng.random(_BUFFER).tolist()
        self._i = 0

    def __call__(self) -> float:
        if self._i == len(self._buf):
            self._buf = self._rng.random(_BUFFER).tolist()
            self._i = 0
        x = self._buf[self._i]
        self._i += 1
        return x

    def index(self, n: int) -> int:
        return int(self() * n)


class _Growth:
    """Generator-side graph state: adjacency sets and the endpoint urn."""

    def __init__(self):
        self.adj: list[set[int]] = []
        self.urn: list[int] = []  # each edge contributes both endpoints
        self.names: list[str] = []
        self.n_edges = 0

    def add_node(self) -> int:
        n = len(self.adj)
        self.adj.append(set())
        self.names.append("S%09d" % n)
        return n

    def add_edge(self, u: int, v: int) -> None:
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.urn.append(u)
        self.urn.append(v)
        self.n_edges += 1

    def roulette(self, draw: _Uniform) -> int:
        return self.urn[draw.index(len(self.urn))]

    def open_wedge_targets(self, u: int) -> set[int]:
        nb = self.adj[u]
        out = set()
        for w in nb:
            out |= self.adj[w]
        out -= nb
        out.discard(u)
        return out


class _Writer:
    def __init__(self, cfg: GenConfig, out_dir: Path, result: GenResult):
        self.cfg = cfg
        self.out = out_dir
        self.result = result
        self.seq = 0
        self.sidecar = open(out_dir / "ground_truth.csv", "w", encoding="utf-8", newline="")
        self.sidecar.write("day,u,v,mechanism,origin\n")

    def start_day(self, day: int):
        self.day = day
        self.date = (self.cfg.start_date + dt.timedelta(days=day)).isoformat()
        self.lines: list[str] = []
        self.truth: list[str] = []
        cos = day_rng(self.cfg.seed, day, 1)
        self._dur = _Uniform(cos)

    def edge(self, g: _Growth, u: int, v: int, mech: Mechanism, origin: str):
        g.add_edge(u, v)
        nu, nv = g.names[u], g.names[v]
        if self.seq % 2 == 0:
            kind, dur = "CALL", 1 + self._dur.index(600)
        else:
            kind, dur = "SMS", 0
        self.seq += 1
        self.lines.append(f"{self.date};{nu};{nv};{kind};{dur}\n")
        self.truth.append(f"{self.day},{nu},{nv},{mech.value},{origin}\n")
        r = self.result
        r.mechanisms[mech.value] = r.mechanisms.get(mech.value, 0) + 1
        r.origins[origin] = r.origins.get(origin, 0) + 1

    def end_day(self):
        name = self.date.replace("-", "") + ".csv"
        path = self.out / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.writelines(self.lines)
        self.sidecar.writelines(self.truth)
        self.result.files.append(path)

    def close(self):
        self.sidecar.close()


def _seed_clique(g: _Growth, w: _Writer, size: int) -> None:
    nodes = [g.add_node() for _ in range(size)]
    for i in nodes:
        for j in nodes[i + 1:]:
            w.edge(g, i, j, Mechanism.PREF_ATTACH, SEED)


def _roulette_distinct(g: _Growth, draw: _Uniform, m: int) -> list[int]:
    targets: list[int] = []
    seen = set()
    while len(targets) < m:
        t = g.roulette(draw)
        if t not in seen:
            seen.add(t)
            targets.append(t)
    return targets


def _random_pair(g: _Growth, draw: _Uniform, tries: int = 64):
    n = len(g.adj)
    for _ in range(tries):
        u = draw.index(n)
        v = draw.index(n)
        if u != v and v not in g.adj[u]:
            return u, v
    free = _free_pairs(g)
    if not free:
        return None
    return free[draw.index(len(free))]


def _free_pairs(g: _Growth) -> list[tuple[int, int]]:
    n = len(g.adj)
    return [(u, v) for u in range(n) for v in range(u + 1, n) if v not in g.adj[u]]


def _run_ba(cfg: GenConfig, g: _Growth, w: _Writer) -> None:
    for day in range(cfg.days):
        w.start_day(day)
        draw = _Uniform(day_rng(cfg.seed, day, 0))
        if day == 0:
            _seed_clique(g, w, cfg.m + 1)
        for _ in range(cfg.nodes_per_day):
            targets = _roulette_distinct(g, draw, cfg.m)
            x = g.add_node()
            for t in targets:
                w.edge(g, x, t, Mechanism.PREF_ATTACH, SLOT)
        w.end_day()


def _run_random(cfg: GenConfig, g: _Growth, w: _Writer, result: GenResult) -> None:
    for day in range(cfg.days):
        w.start_day(day)
        draw = _Uniform(day_rng(cfg.seed, day, 0))
        for _ in range(cfg.nodes_per_day):
            g.add_node()
        n = len(g.adj)
        want = cfg.m * cfg.nodes_per_day
        room = n * (n - 1) // 2 - g.n_edges
        if want > room:
            log.warning("day %d: %d edges requested but only %d free pairs remain; truncating",
                        day, want, room)
            result.truncated += want - room
            want = room
        if want and 2 * want >= room:
            # dense regime: sample the free pairs without replacement
            free = _free_pairs(g)
            for i in range(want):
                j = i + draw.index(len(free) - i)
                free[i], free[j] = free[j], free[i]
                u, v = free[i]
                if draw() < 0.5:
                    u, v = v, u
                w.edge(g, u, v, Mechanism.RANDOM, SLOT)
        else:
            for _ in range(want):
                u, v = _random_pair(g, draw)
                w.edge(g, u, v, Mechanism.RANDOM, SLOT)
        w.end_day()


def _pick_open_wedge(g: _Growth, draw: _Uniform, tries: int = 32):
    n = len(g.adj)
    for _ in range(tries):
        u = draw.index(n)
        cand = g.open_wedge_targets(u)
        if cand:
            break
    else:
        eligible = [x for x in range(n) if g.open_wedge_targets(x)]
        if not eligible:
            return None
        u = eligible[draw.index(len(eligible))]
        cand = g.open_wedge_targets(u)
    cand = sorted(cand)
    return u, cand[draw.index(len(cand))]


def _pick_pref(g: _Growth, draw: _Uniform, tries: int = 32):
    n = len(g.adj)
    for _ in range(tries):
        s = draw.index(n)
        t = g.roulette(draw)
        if s != t and t not in g.adj[s]:
            return s, t
    return None


def _run_mixed(cfg: GenConfig, g: _Growth, w: _Writer, result: GenResult) -> None:
    w_pa, w_tc, _ = cfg.weights
    for day in range(cfg.days):
        w.start_day(day)
        draw = _Uniform(day_rng(cfg.seed, day, 0))
        if day == 0:
            _seed_clique(g, w, cfg.m + 1)
        for _ in range(cfg.nodes_per_day):
            t = g.roulette(draw)
            x = g.add_node()
            w.edge(g, x, t, Mechanism.PREF_ATTACH, ARRIVAL)
            for _ in range(cfg.m):
                r = draw()
                if r < w_pa:
                    mech, pair = Mechanism.PREF_ATTACH, _pick_pref(g, draw)
                elif r < w_pa + w_tc:
                    mech, pair = Mechanism.TRI_CLOSE, _pick_open_wedge(g, draw)
                else:
                    mech, pair = Mechanism.RANDOM, _random_pair(g, draw)
                origin = SLOT
                if pair is None and mech is not Mechanism.RANDOM:
                    result.fallbacks[mech.value] = result.fallbacks.get(mech.value, 0) + 1
                    mech, origin = Mechanism.RANDOM, FALLBACK
                    pair = _random_pair(g, draw)
                if pair is None:
                    result.truncated += 1
                    continue
                w.edge(g, pair[0], pair[1], mech, origin)
        w.end_day()


def generate(cfg: GenConfig, out_dir) -> GenResult:
    """Write ``cfg.days`` day files, ``ground_truth.csv`` and ``generation.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    conf = asdict(cfg)
    conf["model"] = cfg.model.value
    conf["start_date"] = cfg.start_date.isoformat()
    conf["weights"] = list(cfg.weights)
    result = GenResult(config=conf, files=[])
    g = _Growth()
    w = _Writer(cfg, out, result)
    try:
        if cfg.model is Model.BA:
            _run_ba(cfg, g, w)
        elif cfg.model is Model.RANDOM:
            _run_random(cfg, g, w, result)
        else:
            _run_mixed(cfg, g, w, result)
    finally:
        w.close()
    result.n_nodes = sum(1 for a in g.adj if a)
    result.n_edges = g.n_edges
    manifest = {
        "config": conf,
        "n_nodes": result.n_nodes,
        "n_edges": result.n_edges,
        "mechanisms": dict(sorted(result.mechanisms.items())),
        "origins": dict(sorted(result.origins.items())),
        "fallbacks": dict(sorted(result.fallbacks.items())),
        "truncated": result.truncated,
        "files": [p.name for p in result.files],
    }
    with open(out / "generation.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    return result


def generate_ba(cfg: GenConfig, out_dir) -> GenResult:
    return generate(GenConfig(**{**_fields(cfg), "model": Model.BA}), out_dir)


def generate_random_growth(cfg: GenConfig, out_dir) -> GenResult:
    return generate(GenConfig(**{**_fields(cfg), "model": Model.RANDOM}), out_dir)


def generate_mixed(cfg: GenConfig, out_dir) -> GenResult:
    return generate(GenConfig(**{**_fields(cfg), "model": Model.MIXED}), out_dir)


def _fields(cfg: GenConfig) -> dict:
    return {f: getattr(cfg, f) for f in cfg.__dataclass_fields__}


def read_ground_truth(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        r["day"] = int(r["day"])
    return rows
