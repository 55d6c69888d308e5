"""Brute-force references the incremental code is checked against."""
from itertools import combinations

import numpy as np


def brute_cc(adj: dict[int, set[int]], v: int) -> float:
    nbrs = sorted(adj[v])
    k = len(nbrs)
    if k < 2:
        return 0.0
    links = sum(1 for a, b in combinations(nbrs, 2) if b in adj[a])
    return 2.0 * links / (k * (k - 1))


def brute_triangles(adj: dict[int, set[int]], v: int) -> int:
    return sum(1 for a, b in combinations(sorted(adj[v]), 2) if b in adj[a])


def prefix_clustering(edges: list[tuple[int, int]], n: int) -> np.ndarray:
    """cc of every node after every prefix, from triangle appearance times.

    A triangle exists from the moment its last edge arrives, and a degree
    grows when an edge first appears, so both are cumulative sums over the
    stream. Returns an array of shape (len(edges), n).
    """
    first: dict[tuple[int, int], int] = {}
    for i, (u, v) in enumerate(edges):
        if u != v:
            first.setdefault((min(u, v), max(u, v)), i)
    adj: dict[int, set[int]] = {x: set() for x in range(n)}
    deg_step = np.zeros((len(edges), n))
    for (a, b), i in first.items():
        adj[a].add(b)
        adj[b].add(a)
        deg_step[i, a] += 1
        deg_step[i, b] += 1
    tri_step = np.zeros((len(edges), n))
    for (a, b), i_ab in first.items():
        for c in adj[a] & adj[b]:
            if c > b:
                i = max(i_ab, first[(a, c)], first[(b, c)])
                tri_step[i, [a, b, c]] += 1
    k = np.cumsum(deg_step, axis=0)
    t = np.cumsum(tri_step, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cc = np.where(k >= 2, 2.0 * t / (k * (k - 1)), 0.0)
    return cc
