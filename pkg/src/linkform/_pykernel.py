"""Pure-Python graph kernel.

Reference implementation of the incremental kernel, used when the compiled
``linkform._kernel`` extension is unavailable or when
``LINKFORM_BACKEND=python`` is set. Both kernels expose the same surface and
are checked against each other in the test suite.
"""
from __future__ import annotations

import numpy as np

ADDED = 0
DUPLICATE = 1
SELF_LOOP = 2


class GraphCore:
    """Undirected simple graph with per-node degree and triangle counters."""

    backend = "python"

    def __init__(self):
        self._adj: list[set[int]] = []
        self._tri: list[int] = []
        self._n_edges = 0

    @property
    def n_nodes(self) -> int:
        return len(self._adj)

    @property
    def n_edges(self) -> int:
        return self._n_edges

    @property
    def degree_sum(self) -> int:
        return 2 * self._n_edges

    def add_node(self) -> int:
        self._adj.append(set())
        self._tri.append(0)
        return len(self._adj) - 1

    def _check(self, v: int) -> None:
        if not 0 <= v < len(self._adj):
            raise IndexError(f"unknown node id {v}")

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self._adj[v])

    def triangles(self, v: int) -> int:
        self._check(v)
        return self._tri[v]

    def neighbors(self, v: int) -> list[int]:
        self._check(v)
        return sorted(self._adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        self._check(u)
        self._check(v)
        return v in self._adj[u]

    def common_neighbor_count(self, u: int, v: int) -> int:
        self._check(u)
        self._check(v)
        a, b = self._adj[u], self._adj[v]
        if len(a) > len(b):
            a, b = b, a
        return sum(1 for w in a if w in b)

    def insert(self, u: int, v: int) -> tuple[int, int, int, int, int, int, int]:
        """Insert edge (u, v).

        Returns ``(status, k_u, k_v, T_u, T_v, common, degree_sum)`` with all
        counters taken before the insertion.
        """
        self._check(u)
        self._check(v)
        adj = self._adj
        tri = self._tri
        au, av = adj[u], adj[v]
        dsum = 2 * self._n_edges
        if u == v:
            return SELF_LOOP, len(au), len(av), tri[u], tri[v], 0, dsum
        if v in au:
            return DUPLICATE, len(au), len(av), tri[u], tri[v], 0, dsum
        ku, kv, tu, tv = len(au), len(av), tri[u], tri[v]
        common = au & av
        c = len(common)
        if c:
            tri[u] += c
            tri[v] += c
            for w in common:
                tri[w] += 1
        au.add(v)
        av.add(u)
        self._n_edges += 1
        return ADDED, ku, kv, tu, tv, c, dsum

    def insert_batch(self, us, vs):
        """Insert edges in order; returns per-event pre-insertion arrays."""
        us = np.asarray(us, dtype=np.int64)
        vs = np.asarray(vs, dtype=np.int64)
        if us.shape != vs.shape:
            raise ValueError("endpoint arrays differ in length")
        n = len(us)
        if n and (min(us.min(), vs.min()) < 0 or max(us.max(), vs.max()) >= len(self._adj)):
            raise IndexError("unknown node id in batch")
        status = np.empty(n, dtype=np.int8)
        ku = np.empty(n, dtype=np.int64)
        kv = np.empty(n, dtype=np.int64)
        tu = np.empty(n, dtype=np.int64)
        tv = np.empty(n, dtype=np.int64)
        cn = np.zeros(n, dtype=np.int64)
        dsum = np.empty(n, dtype=np.int64)
        adj = self._adj
        tri = self._tri
        m = self._n_edges
        for i, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
            au, av = adj[u], adj[v]
            ku[i] = len(au)
            kv[i] = len(av)
            tu[i] = tri[u]
            tv[i] = tri[v]
            dsum[i] = 2 * m
            if u == v:
                status[i] = SELF_LOOP
                continue
            if v in au:
                status[i] = DUPLICATE
                continue
            status[i] = ADDED
            common = au & av
            c = len(common)
            if c:
                cn[i] = c
                tri[u] += c
                tri[v] += c
                for w in common:
                    tri[w] += 1
            au.add(v)
            av.add(u)
            m += 1
        self._n_edges = m
        return status, ku, kv, tu, tv, cn, dsum

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self._adj), dtype=np.int64, count=len(self._adj))

    def triangle_counts(self) -> np.ndarray:
        return np.asarray(self._tri, dtype=np.int64)
