# Benchmark schemes, experiment runs and their files
from .export import LoadedRun, export, load_run
from .report import report
from .runner import (
    AggregateRow, MetricsRecord, SchemeRun, aggregate, generate_scenario, run_scheme, run_seed,
    summarize, sweep_gus, sweep_uavs,
)
from .schemes import SCHEME_POLICIES, ExperimentSpec, Scheme, parse_scheme

__all__ = [
    "LoadedRun", "export", "load_run", "report",
    "AggregateRow", "MetricsRecord", "SchemeRun", "aggregate", "generate_scenario",
    "run_scheme", "run_seed", "summarize", "sweep_gus", "sweep_uavs",
    "SCHEME_POLICIES", "ExperimentSpec", "Scheme", "parse_scheme",
]
