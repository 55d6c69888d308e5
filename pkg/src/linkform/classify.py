"""Link-formation labels for newly created edges.

Every rule reads the graph as it was just before the edge was inserted.
Degree and clustering thresholds come from a snapshot taken at the end of the
previous day and held fixed for the whole day.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import DynamicGraph, EdgeBatch, InsertOutcome

DEFAULT_BETA = 4.0e-6
DEFAULT_AGE_WINDOW = 3


class PaPolicy(str, enum.Enum):
    CALLEE_ONLY = "callee"
    EITHER = "either"
    BOTH = "both"


class Denominator(str, enum.Enum):
    EXCLUSIVE = "exclusive"  # k_v / (sum of the other nodes' degrees)
    STANDARD = "standard"  # k_v / 2|E|


class DegreeClass(str, enum.Enum):
    DHH = "DHH"
    DLL = "DLL"
    DHL = "DHL"


class ClusteringClass(str, enum.Enum):
    CHH = "CHH"
    CLL = "CLL"
    CHL = "CHL"


class AgeClass(str, enum.Enum):
    AJJ = "AJJ"
    AOO = "AOO"
    AJO = "AJO"


@dataclass(frozen=True)
class ClassifierConfig:
    beta: float = DEFAULT_BETA
    pa_endpoint_policy: PaPolicy = PaPolicy.CALLEE_ONLY
    age_window_days: int = DEFAULT_AGE_WINDOW
    denominator: Denominator = Denominator.EXCLUSIVE

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {self.beta}")
        if self.age_window_days < 0:
            raise ValueError("age_window_days must be >= 0")
        object.__setattr__(self, "pa_endpoint_policy", PaPolicy(self.pa_endpoint_policy))
        object.__setattr__(self, "denominator", Denominator(self.denominator))


@dataclass(frozen=True)
class MechanismLabel:
    is_pa: bool
    is_tc: bool

    @property
    def is_r(self) -> bool:
        return not (self.is_pa or self.is_tc)


@dataclass(frozen=True)
class LocalClasses:
    degree_class: DegreeClass
    clustering_class: ClusteringClass
    age_class: AgeClass


@dataclass(frozen=True)
class DayAverages:
    avg_degree: float
    avg_cc: float
    snapshot_day: int


def _probability(k, degree_sum, denominator: Denominator):
    if denominator is Denominator.STANDARD:
        denom = degree_sum
    else:
        denom = degree_sum - k
    return k / denom if denom > 0 else 0.0


def pa_probability(graph: DynamicGraph, v: int, denominator: Denominator = Denominator.EXCLUSIVE) -> float:
    """Attachment probability of ``v`` given the current degrees.

    Returns 0 when the denominator vanishes (empty graph, or ``v`` carries
    every edge endpoint but its own).
    """
    return _probability(graph.degree(v), graph.degree_sum, Denominator(denominator))


def pa_probability_pre(k: int, degree_sum: int, denominator: Denominator = Denominator.EXCLUSIVE) -> float:
    return _probability(k, degree_sum, Denominator(denominator))


def tested_probability(outcome: InsertOutcome, cfg: ClassifierConfig) -> float:
    """The probability the active endpoint policy compares against beta.

    ``outcome.v`` is the callee.
    """
    pu = _probability(outcome.k_u_pre, outcome.degree_sum_pre, cfg.denominator)
    pv = _probability(outcome.k_v_pre, outcome.degree_sum_pre, cfg.denominator)
    if cfg.pa_endpoint_policy is PaPolicy.CALLEE_ONLY:
        return pv
    if cfg.pa_endpoint_policy is PaPolicy.EITHER:
        return max(pu, pv)
    return min(pu, pv)


def classify_mechanism(outcome: InsertOutcome, cfg: ClassifierConfig) -> MechanismLabel:
    if not outcome.added:
        raise ValueError(f"only added edges are classified, got {outcome.status.name}")
    return MechanismLabel(
        is_pa=tested_probability(outcome, cfg) >= cfg.beta,
        is_tc=outcome.common_neighbor_count_pre >= 1,
    )


def classify_degree(k_u: float, k_v: float, avg: DayAverages) -> DegreeClass:
    hu, hv = k_u >= avg.avg_degree, k_v >= avg.avg_degree
    if hu and hv:
        return DegreeClass.DHH
    if not (hu or hv):
        return DegreeClass.DLL
    return DegreeClass.DHL


def classify_clustering(cc_u: float, cc_v: float, avg: DayAverages) -> ClusteringClass:
    hu, hv = cc_u >= avg.avg_cc, cc_v >= avg.avg_cc
    if hu and hv:
        return ClusteringClass.CHH
    if not (hu or hv):
        return ClusteringClass.CLL
    return ClusteringClass.CHL


def classify_age(t_u: int, t_v: int, t_e: int, window: int = DEFAULT_AGE_WINDOW) -> AgeClass:
    yu, yv = t_u >= t_e - window, t_v >= t_e - window
    if yu and yv:
        return AgeClass.AJJ
    if not (yu or yv):
        return AgeClass.AOO
    return AgeClass.AJO


def classify_local(outcome: InsertOutcome, t_u: int, t_v: int, t_e: int,
                   avg: DayAverages, cfg: ClassifierConfig) -> LocalClasses:
    return LocalClasses(
        classify_degree(outcome.k_u_pre, outcome.k_v_pre, avg),
        classify_clustering(outcome.cc_u_pre, outcome.cc_v_pre, avg),
        classify_age(t_u, t_v, t_e, cfg.age_window_days),
    )


def snapshot_averages(graph: DynamicGraph, day: int) -> DayAverages:
    stats = graph.global_stats()
    return DayAverages(stats.avg_degree, stats.avg_cc, day)


# -- vectorized day classification -------------------------------------------

# axis codes used in BatchLabels: 0 = both high/young, 1 = both low/old, 2 = mixed
HIGH_HIGH, LOW_LOW, MIXED = 0, 1, 2


def _axis(high_u: np.ndarray, high_v: np.ndarray) -> np.ndarray:
    out = np.full(high_u.shape, MIXED, dtype=np.int8)
    out[high_u & high_v] = HIGH_HIGH
    out[~high_u & ~high_v] = LOW_LOW
    return out


def _probabilities(k: np.ndarray, dsum: np.ndarray, denominator: Denominator):
    denom = dsum if denominator is Denominator.STANDARD else dsum - k
    p = np.zeros(k.shape, dtype=np.float64)
    ok = denom > 0
    np.divide(k, denom, out=p, where=ok)
    return p, ~ok


@dataclass
class BatchLabels:
    """Labels for the added edges of one batch, in stream order."""

    is_pa: np.ndarray
    is_tc: np.ndarray
    degree: np.ndarray
    clustering: np.ndarray
    age: np.ndarray
    probability: np.ndarray
    undefined_probability: np.ndarray

    def __len__(self) -> int:
        return len(self.is_pa)

    @property
    def is_r(self) -> np.ndarray:
        return ~(self.is_pa | self.is_tc)


def classify_batch(batch: EdgeBatch, birth_days: np.ndarray, day: int,
                   avg: DayAverages, cfg: ClassifierConfig) -> BatchLabels:
    """Classify every added edge of ``batch`` (duplicates and self-loops are skipped)."""
    sel = batch.added
    ku, kv = batch.k_u[sel], batch.k_v[sel]
    dsum = batch.degree_sum[sel]
    pu, bad_u = _probabilities(ku, dsum, cfg.denominator)
    pv, bad_v = _probabilities(kv, dsum, cfg.denominator)
    policy = cfg.pa_endpoint_policy
    if policy is PaPolicy.CALLEE_ONLY:
        p, bad = pv, bad_v
    elif policy is PaPolicy.EITHER:
        p, bad = np.maximum(pu, pv), bad_u | bad_v
    else:
        p, bad = np.minimum(pu, pv), bad_u | bad_v
    birth_u = birth_days[batch.u[sel]]
    birth_v = birth_days[batch.v[sel]]
    young = day - cfg.age_window_days
    return BatchLabels(
        is_pa=p >= cfg.beta,
        is_tc=batch.common[sel] >= 1,
        degree=_axis(ku >= avg.avg_degree, kv >= avg.avg_degree),
        clustering=_axis(batch.cc_u[sel] >= avg.avg_cc, batch.cc_v[sel] >= avg.avg_cc),
        age=_axis(birth_u >= young, birth_v >= young),
        probability=p,
        undefined_probability=bad,
    )
