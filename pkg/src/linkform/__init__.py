"""Incremental temporal-graph engine for link-formation analysis of CDR streams."""

__version__ = "0.1.0"

from .classify import (  # noqa: E402
    ClassifierConfig,
    DayAverages,
    Denominator,
    LocalClasses,
    MechanismLabel,
    PaPolicy,
    classify_age,
    classify_clustering,
    classify_degree,
    classify_mechanism,
    pa_probability,
    snapshot_averages,
)
from .graph import DEFAULT_BACKEND, DynamicGraph, GlobalStats, InsertOutcome, InsertStatus  # noqa: E402
from .ingest import day_file_sequence, load_day, parse_line  # noqa: E402
from .metrics import DaySummary, MetricsEngine, export  # noqa: E402
from .pipeline import RunConfig, run_analysis  # noqa: E402
from .synth import GenConfig, generate, generate_ba, generate_mixed, generate_random_growth  # noqa: E402
