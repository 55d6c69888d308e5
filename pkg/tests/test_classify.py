import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from linkform.classify import (AgeClass, ClassifierConfig, ClusteringClass, DayAverages,
                               DegreeClass, Denominator, PaPolicy, classify_age, classify_batch,
                               classify_clustering, classify_degree, classify_local,
                               classify_mechanism, pa_probability, pa_probability_pre,
                               snapshot_averages)
from linkform.classify import tested_probability as probability_under_test
from linkform.graph import DynamicGraph


def graph(edges, n, backend=None):
    g = DynamicGraph(backend)
    for i in range(n):
        g.intern_node(str(i), 0)
    for u, v in edges:
        g.insert_edge(u, v)
    return g


def test_closing_a_path_is_tc_only(backend):
    # a-b-c, then a-c: callee c has degree 1 of sum 4 -> 1/3 < 0.5
    g = graph([(0, 1), (1, 2)], 3, backend)
    out = g.insert_edge(0, 2)
    lab = classify_mechanism(out, ClassifierConfig(beta=0.5))
    assert (lab.is_pa, lab.is_tc, lab.is_r) == (False, True, False)


def test_joining_a_hub_is_pa_only(backend):
    g = graph([(0, 1), (0, 2), (0, 3)], 5, backend)
    out = g.insert_edge(4, 0)
    assert probability_under_test(out, ClassifierConfig()) == 1.0   # 3 / (6 - 3)
    lab = classify_mechanism(out, ClassifierConfig(beta=0.5))
    assert (lab.is_pa, lab.is_tc) == (True, False)


def test_isolated_pair_is_random():
    g = graph([(0, 1), (2, 3), (2, 4), (3, 4)], 7, None)
    lab = classify_mechanism(g.insert_edge(5, 6), ClassifierConfig(beta=0.01))
    assert lab.is_r


def test_duplicates_are_not_classified():
    g = graph([(0, 1)], 2)
    with pytest.raises(ValueError):
        classify_mechanism(g.insert_edge(0, 1), ClassifierConfig())


def test_probability_denominators():
    assert pa_probability_pre(2, 10) == 2 / 8
    assert pa_probability_pre(2, 10, Denominator.STANDARD) == 2 / 10
    assert pa_probability_pre(0, 0) == 0.0
    assert pa_probability_pre(3, 3) == 0.0   # v holds every endpoint
    g = graph([(0, 1), (0, 2)], 3)
    assert pa_probability(g, 0) == 2 / 2


def test_policies():
    g = graph([(0, 1), (0, 2), (0, 3), (4, 5)], 6)
    out = g.insert_edge(4, 0)      # caller 4 has k=1, callee 0 has k=3, sum 8
    pu, pv = 1 / 7, 3 / 5
    assert probability_under_test(out, ClassifierConfig()) == pv
    assert probability_under_test(out, ClassifierConfig(pa_endpoint_policy="either")) == max(pu, pv)
    assert probability_under_test(out, ClassifierConfig(pa_endpoint_policy="both")) == min(pu, pv)


def test_config_validation():
    with pytest.raises(ValueError):
        ClassifierConfig(beta=1.5)
    with pytest.raises(ValueError):
        ClassifierConfig(age_window_days=-1)
    with pytest.raises(ValueError):
        ClassifierConfig(pa_endpoint_policy="sometimes")


def test_degree_clustering_age_classes():
    avg = DayAverages(avg_degree=2.0, avg_cc=0.5, snapshot_day=4)
    assert classify_degree(2, 5, avg) is DegreeClass.DHH     # equal counts as high
    assert classify_degree(1, 5, avg) is DegreeClass.DHL
    assert classify_degree(1, 1.99, avg) is DegreeClass.DLL
    assert classify_clustering(0.5, 0.5, avg) is ClusteringClass.CHH
    assert classify_clustering(0.0, 0.6, avg) is ClusteringClass.CHL
    assert classify_clustering(0.0, 0.49, avg) is ClusteringClass.CLL
    # day 10, window 3: born on day 7 or later is young
    assert classify_age(7, 9, 10) is AgeClass.AJJ
    assert classify_age(6, 9, 10) is AgeClass.AJO
    assert classify_age(0, 6, 10) is AgeClass.AOO


def test_local_classes_use_pre_insertion_values():
    g = graph([(0, 1), (1, 2)], 3)
    avg = snapshot_averages(g, 0)
    out = g.insert_edge(0, 2)
    loc = classify_local(out, 0, 0, 0, avg, ClassifierConfig())
    # before insertion every cc is 0 and the average cc is 0, so both count as high
    assert loc.clustering_class is ClusteringClass.CHH
    assert loc.degree_class is DegreeClass.DLL        # k = 1, 1 vs avg 4/3
    assert loc.age_class is AgeClass.AJJ


def _batch_setup(seed, n=60, m=400):
    rng = np.random.default_rng(seed)
    g = graph([], n)
    warm = g.insert_batch(rng.integers(0, n, m // 2), rng.integers(0, n, m // 2))
    avg = snapshot_averages(g, 1)
    batch = g.insert_batch(rng.integers(0, n, m), rng.integers(0, n, m))
    del warm
    return g, avg, batch


@pytest.mark.parametrize("policy", list(PaPolicy))
def test_batch_matches_scalar(policy):
    g, avg, batch = _batch_setup(1)
    births = np.zeros(g.n_nodes, dtype=np.int64)
    cfg = ClassifierConfig(beta=0.02, pa_endpoint_policy=policy)
    labels = classify_batch(batch, births, 5, avg, cfg)
    added = [batch.outcome(i) for i in range(len(batch)) if batch.added[i]]
    assert len(labels) == len(added)
    codes = {DegreeClass.DHH: 0, DegreeClass.DLL: 1, DegreeClass.DHL: 2,
             ClusteringClass.CHH: 0, ClusteringClass.CLL: 1, ClusteringClass.CHL: 2}
    for j, out in enumerate(added):
        lab = classify_mechanism(out, cfg)
        loc = classify_local(out, 0, 0, 5, avg, cfg)
        assert (labels.is_pa[j], labels.is_tc[j]) == (lab.is_pa, lab.is_tc)
        assert labels.probability[j] == probability_under_test(out, cfg)
        assert labels.degree[j] == codes[loc.degree_class]
        assert labels.clustering[j] == codes[loc.clustering_class]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.floats(0, 1), min_size=2, max_size=6))
def test_pa_count_is_monotone_in_beta(seed, betas):
    g, avg, batch = _batch_setup(seed)
    births = np.zeros(g.n_nodes, dtype=np.int64)
    counts = [int(classify_batch(batch, births, 1, avg, ClassifierConfig(beta=b)).is_pa.sum())
              for b in sorted(betas)]
    assert counts == sorted(counts, reverse=True)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 0.2))
def test_policy_ordering(seed, beta):
    g, avg, batch = _batch_setup(seed)
    births = np.zeros(g.n_nodes, dtype=np.int64)

    def n_pa(policy):
        cfg = ClassifierConfig(beta=beta, pa_endpoint_policy=policy)
        return int(classify_batch(batch, births, 1, avg, cfg).is_pa.sum())
    assert n_pa("both") <= n_pa("callee") <= n_pa("either")
