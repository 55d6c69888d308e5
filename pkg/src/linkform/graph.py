"""Cumulative undirected simple graph with incremental clustering.

The adjacency/triangle kernel is chosen at import: the compiled extension
``linkform._kernel`` when it is built, otherwise the pure-Python
``linkform._pykernel``. Set ``LINKFORM_BACKEND=python`` (or ``compiled``) to
force one.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass

import numpy as np

from . import _pykernel


def _load_compiled():
    try:
        from . import _kernel
    except ImportError:
        return None
    return _kernel


_compiled = _load_compiled()
_requested = os.environ.get("LINKFORM_BACKEND", "").strip().lower()
if _requested == "compiled" and _compiled is None:
    raise ImportError("LINKFORM_BACKEND=compiled but linkform._kernel is not built")

BACKENDS = {"python": _pykernel.GraphCore}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.GraphCore

DEFAULT_BACKEND = _requested if _requested in BACKENDS else ("compiled" if _compiled else "python")


class InsertStatus(enum.IntEnum):
    ADDED = _pykernel.ADDED
    DUPLICATE_EDGE = _pykernel.DUPLICATE
    SELF_LOOP = _pykernel.SELF_LOOP


@dataclass(frozen=True)
class InsertOutcome:
    """Result of one insert_edge call.

    The ``*_pre`` fields hold the endpoint state strictly before the edge was
    added; ``degree_sum_pre`` is 2|E| at that moment.
    """

    status: InsertStatus
    u: int
    v: int
    k_u_pre: int = 0
    k_v_pre: int = 0
    cc_u_pre: float = 0.0
    cc_v_pre: float = 0.0
    common_neighbor_count_pre: int = 0
    degree_sum_pre: int = 0

    @property
    def added(self) -> bool:
        return self.status is InsertStatus.ADDED


@dataclass(frozen=True)
class GlobalStats:
    n_nodes: int
    n_edges: int
    density: float
    avg_degree: float
    max_degree: int
    avg_cc: float


def clustering(k, t):
    """Local clustering from degree and triangle count; 0 where k < 2.

    Works elementwise on numpy arrays as well as on scalars.
    """
    if np.ndim(k) == 0:
        return 2.0 * t / (k * (k - 1)) if k >= 2 else 0.0
    k = np.asarray(k, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    denom = k * (k - 1.0)
    out = np.zeros_like(k)
    np.divide(2.0 * t, denom, out=out, where=k >= 2)
    return out


class DynamicGraph:
    """Growth-only graph keyed by dense integer node ids.

    Subscriber strings are interned to ids ``0..n-1`` in order of first
    appearance; each node remembers the day it was interned.
    """

    def __init__(self, backend: str | None = None):
        name = backend or DEFAULT_BACKEND
        try:
            self._core = BACKENDS[name]()
        except KeyError:
            raise ValueError(f"unknown backend {name!r}; available: {sorted(BACKENDS)}") from None
        self.backend = name
        self._ids: dict[str, int] = {}
        self.original_ids: list[str] = []
        self._birth: list[int] = []
        self._birth_arr = np.zeros(0, dtype=np.int64)
        self._stats: tuple[tuple[int, int], GlobalStats] | None = None

    # -- nodes ---------------------------------------------------------------

    def intern_node(self, original_id: str, day: int) -> int:
        nid = self._ids.get(original_id)
        if nid is None:
            nid = self._core.add_node()
            self._ids[original_id] = nid
            self.original_ids.append(original_id)
            self._birth.append(day)
        return nid

    def lookup(self, original_id: str) -> int | None:
        return self._ids.get(original_id)

    def birth_day(self, v: int) -> int:
        return self._birth[v]

    def birth_days(self) -> np.ndarray:
        # grown in place of a full rebuild; callers must not mutate the result
        have = len(self._birth_arr)
        if have < len(self._birth):
            tail = np.asarray(self._birth[have:], dtype=np.int64)
            self._birth_arr = np.concatenate([self._birth_arr, tail])
        return self._birth_arr

    @property
    def n_nodes(self) -> int:
        return self._core.n_nodes

    @property
    def n_edges(self) -> int:
        return self._core.n_edges

    @property
    def degree_sum(self) -> int:
        return self._core.degree_sum

    def degree(self, v: int) -> int:
        return self._core.degree(v)

    def triangles(self, v: int) -> int:
        return self._core.triangles(v)

    def neighbors(self, v: int) -> list[int]:
        return self._core.neighbors(v)

    def has_edge(self, u: int, v: int) -> bool:
        return self._core.has_edge(u, v)

    def degrees(self) -> np.ndarray:
        return self._core.degrees()

    def triangle_counts(self) -> np.ndarray:
        return self._core.triangle_counts()

    # -- edges ---------------------------------------------------------------

    def insert_edge(self, u: int, v: int) -> InsertOutcome:
        status, ku, kv, tu, tv, c, dsum = self._core.insert(u, v)
        status = InsertStatus(status)
        if status is not InsertStatus.ADDED:
            return InsertOutcome(status, u, v)
        return InsertOutcome(
            status, u, v,
            k_u_pre=ku, k_v_pre=kv,
            cc_u_pre=clustering(ku, tu), cc_v_pre=clustering(kv, tv),
            common_neighbor_count_pre=c, degree_sum_pre=dsum,
        )

    def insert_batch(self, us, vs) -> "EdgeBatch":
        """Insert a sequence of edges in order and keep every pre-insertion snapshot."""
        status, ku, kv, tu, tv, cn, dsum = self._core.insert_batch(us, vs)
        return EdgeBatch(
            u=np.asarray(us, dtype=np.int64), v=np.asarray(vs, dtype=np.int64),
            status=status, k_u=ku, k_v=kv,
            cc_u=clustering(ku, tu), cc_v=clustering(kv, tv),
            common=cn, degree_sum=dsum,
        )

    # -- queries -------------------------------------------------------------

    def local_cc(self, v: int) -> float:
        return clustering(self._core.degree(v), self._core.triangles(v))

    def common_neighbor_count(self, u: int, v: int) -> int:
        return self._core.common_neighbor_count(u, v)

    def global_stats(self) -> GlobalStats:
        n = self.n_nodes
        m = self.n_edges
        # the graph only grows, so (n, m) identifies its state
        if self._stats is not None and self._stats[0] == (n, m):
            return self._stats[1]
        if n == 0:
            return GlobalStats(0, 0, 0.0, 0.0, 0, 0.0)
        deg = self.degrees()
        cc = clustering(deg, self.triangle_counts())
        density = 2.0 * m / (n * (n - 1)) if n >= 2 else 0.0
        stats = GlobalStats(
            n_nodes=n,
            n_edges=m,
            density=density,
            avg_degree=2.0 * m / n,
            max_degree=int(deg.max()),
            avg_cc=float(cc.sum() / n),
        )
        self._stats = ((n, m), stats)
        return stats


@dataclass
class EdgeBatch:
    """Struct-of-arrays pre-insertion snapshots for a run of insert_edge calls."""

    u: np.ndarray
    v: np.ndarray
    status: np.ndarray
    k_u: np.ndarray
    k_v: np.ndarray
    cc_u: np.ndarray
    cc_v: np.ndarray
    common: np.ndarray
    degree_sum: np.ndarray

    def __len__(self) -> int:
        return len(self.status)

    @property
    def added(self) -> np.ndarray:
        return self.status == InsertStatus.ADDED

    def outcome(self, i: int) -> InsertOutcome:
        status = InsertStatus(int(self.status[i]))
        u, v = int(self.u[i]), int(self.v[i])
        if status is not InsertStatus.ADDED:
            return InsertOutcome(status, u, v)
        return InsertOutcome(
            status, u, v,
            k_u_pre=int(self.k_u[i]), k_v_pre=int(self.k_v[i]),
            cc_u_pre=float(self.cc_u[i]), cc_v_pre=float(self.cc_v[i]),
            common_neighbor_count_pre=int(self.common[i]),
            degree_sum_pre=int(self.degree_sum[i]),
        )
