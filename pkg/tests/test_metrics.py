import json

import numpy as np
import pytest

from linkform.classify import ClassifierConfig, classify_local, classify_mechanism, tested_probability as prob_of
from linkform.graph import DynamicGraph
from linkform.metrics import (CLASS_COLUMNS, N_PA_BINS, PA_BIN_EDGES, SUMMARY_COLUMNS, MetricsEngine,
                              ProtocolError, RunReport, export, load_report, pa_bin_index)


def test_bin_layout():
    assert N_PA_BINS == 61
    assert PA_BIN_EDGES[0] == pytest.approx(1e-9) and PA_BIN_EDGES[-1] == 1.0
    idx = pa_bin_index(np.array([0.0, 1e-12, 1e-9, 1.2e-9, 0.5, 1.0, 3.0]))
    assert idx.tolist()[:2] == [0, 1]          # zero bin, then clamp into the first log bin
    assert idx[2] == 1 and idx[3] == 1
    assert idx[-1] == idx[-2] == 60            # 1 and above land in the last bin


def test_protocol_errors():
    m = MetricsEngine(DynamicGraph())
    with pytest.raises(ProtocolError):
        m.end_day()
    m.begin_day(0)
    with pytest.raises(ProtocolError):
        m.begin_day(1)


def _engine_day(g, m, edges, day, analyze, cfg=ClassifierConfig(beta=0.1)):
    avg = m.begin_day(day, analyze)
    for u, v in edges:
        out = g.insert_edge(u, v)
        if out.added and analyze:
            m.record_edge(out, classify_mechanism(out, cfg),
                          classify_local(out, 0, 0, day, avg, cfg), prob_of(out, cfg))
        else:
            m.record_edge(out)
    return m.end_day()


def test_scalar_recording_and_warmup_days():
    g = DynamicGraph()
    for i in range(6):
        g.intern_node(str(i), 0)
    m = MetricsEngine(g)
    s0 = _engine_day(g, m, [(0, 1), (1, 2)], 0, analyze=False)
    assert s0.pa is None and s0.new_edges == 2 and not s0.analyzed
    assert 0 not in m.pa_hists and 0 in m.degree_hists
    s1 = _engine_day(g, m, [(0, 2), (0, 2), (3, 3), (4, 5)], 1, analyze=True)
    assert s1.events == 4 and s1.new_edges == 2
    assert s1.tc == 1
    assert s1.pa - s1.pa_tc_overlap + s1.tc + s1.r == s1.new_edges
    for group in (("dhh", "dll", "dhl"), ("chh", "cll", "chl"), ("ajj", "aoo", "ajo")):
        assert sum(getattr(s1, c) for c in group) == s1.new_edges
    assert m.pa_hists[1].total() == s1.new_edges
    assert m.degree_hists[1].total() == g.n_nodes


def _report(tmp_path):
    g = DynamicGraph()
    for i in range(5):
        g.intern_node(str(i), 0)
    m = MetricsEngine(g)
    _engine_day(g, m, [(0, 1), (1, 2)], 0, False)
    _engine_day(g, m, [(0, 2), (3, 4)], 1, True)
    _engine_day(g, m, [], 2, True)
    return RunReport(m.summaries, m.degree_hists, m.pa_hists, {"beta": 0.1})


def test_export_layout(tmp_path):
    rep = _report(tmp_path)
    export(rep, tmp_path)
    lines = (tmp_path / "summary.csv").read_text().splitlines()
    assert lines[0].split(",") == SUMMARY_COLUMNS
    assert len(lines) == 4
    assert lines[1].endswith(",")                       # warmup day: classes and wall time blank
    prop = (tmp_path / "proportions.csv").read_text().splitlines()
    assert len(prop) == 3                               # analyze days only
    assert prop[2].split(",")[2] == ""                  # no new edges: proportions blank
    hist = (tmp_path / "pa_prob_hist_day1.csv").read_text().splitlines()
    assert hist[0] == "lower_bound,upper_bound,count" and len(hist) == 62
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert set(doc) == {"config", "days", "histograms"}
    assert (tmp_path / "timings.csv").exists()


def test_timings_flag(tmp_path):
    rep = _report(tmp_path)
    export(rep, tmp_path, timings=True)
    row = (tmp_path / "summary.csv").read_text().splitlines()[1]
    assert float(row.rsplit(",", 1)[1]) >= 0


def test_report_round_trip(tmp_path):
    rep = _report(tmp_path)
    export(rep, tmp_path / "a", formats=("json",), timings=True)
    again = load_report(tmp_path / "a")
    assert again.summaries == rep.summaries
    assert {d: h.bins for d, h in again.pa_hists.items()} == \
        {d: [tuple(b) for b in h.bins] for d, h in rep.pa_hists.items()}
    assert again.config == rep.config


def test_class_columns_are_summary_columns():
    assert set(CLASS_COLUMNS) <= set(SUMMARY_COLUMNS)
