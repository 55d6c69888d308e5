"""Compiled vs pure-Python kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--edges N] [--nodes N] [--repeat R]

Two kernels are timed: batched edge insertion (adjacency + triangle update)
on a degree-skewed stream, and day-file scanning (parse, filter, intern).
Each figure is the best of ``--repeat`` runs.
"""
import argparse
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from linkform import ingest
from linkform.graph import BACKENDS, DynamicGraph
from linkform.synth import GenConfig, generate


def best_of(repeat, fn):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def skewed_stream(n_nodes, n_edges, seed=0):
    # Zipf-ish endpoints so hub adjacency lists get long, as in BA data
    rng = np.random.default_rng(seed)
    w = 1.0 / np.arange(1, n_nodes + 1) ** 0.8
    w /= w.sum()
    return rng.choice(n_nodes, n_edges, p=w), rng.choice(n_nodes, n_edges, p=w)


def bench_insert(backend, us, vs, n_nodes):
    def run():
        g = DynamicGraph(backend)
        for i in range(n_nodes):
            g.intern_node(f"n{i}", 0)
        g.insert_batch(us, vs)
    return run


def bench_scan(backend, files):
    def run():
        g = DynamicGraph(backend)
        for day, p in enumerate(files):
            ingest.load_day(p, day, g)
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--edges", type=int, default=200_000)
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if "compiled" not in BACKENDS:
        print("compiled kernel not built; only the Python backend is available", file=sys.stderr)

    us, vs = skewed_stream(args.nodes, args.edges)
    with tempfile.TemporaryDirectory() as tmp:
        npd = max(1, args.edges // (2 * 6))
        generate(GenConfig(model="ba", days=6, nodes_per_day=npd, m=2, seed=0), tmp)
        files = ingest.list_day_files(Path(tmp))
        lines = sum(p.read_bytes().count(b"\n") for p in files)

        rows = []
        for name in sorted(BACKENDS):
            t_ins = best_of(args.repeat, bench_insert(name, us, vs, args.nodes))
            t_scan = best_of(args.repeat, bench_scan(name, files))
            rows.append((name, t_ins, t_scan))

    print(f"{'backend':<10} {'insert ms':>10} {'edges/s':>12} {'scan ms':>10} {'lines/s':>12}")
    for name, t_ins, t_scan in rows:
        print(f"{name:<10} {t_ins * 1e3:>10.1f} {args.edges / t_ins:>12,.0f} "
              f"{t_scan * 1e3:>10.1f} {lines / t_scan:>12,.0f}")
    if len(rows) == 2:
        (_, pi, ps), (_, ci, cs) = rows[1], rows[0]
        print(f"speedup    insert x{pi / ci:.1f}   scan x{ps / cs:.1f}")


if __name__ == "__main__":
    main()
