"""Sweep orchestration, the external-predictor protocol, error tracing and chart rendering."""

from .evaluators import METRICS, EvalContext, evaluate, known_metrics, stability_report
from .external import DEFAULT_TIMEOUT_S, HelloMessage, PredictorProcess, run_external_predictor, spawn_predictor
from .plan import (
    BinRangesAxis,
    DatasetRefs,
    ExternalPredictorSpec,
    FilePredictorSpec,
    MetricSpec,
    PredictorSpec,
    RepetitionsAxis,
    RotationAxis,
    SubsetSizesAxis,
    SweepPlan,
    ToyPredictorSpec,
    TransformSpec,
    WindowGridAxis,
    load_plan,
    parse_predictor_spec,
    plan_hash,
)
from .predictor_log import open_predictor_log
from .render import CHART_KINDS, ChartTemplate, RenderedChart, render_report
from .runner import Cell, CellRecord, SweepResult, build_cells, load_dataset, run_plan, samples_of
from .trace import JoinedTable, TraceResult, join_reports, trace_errors

__all__ = [
    "CHART_KINDS",
    "DEFAULT_TIMEOUT_S",
    "METRICS",
    "BinRangesAxis",
    "Cell",
    "CellRecord",
    "ChartTemplate",
    "DatasetRefs",
    "EvalContext",
    "ExternalPredictorSpec",
    "FilePredictorSpec",
    "HelloMessage",
    "JoinedTable",
    "MetricSpec",
    "PredictorProcess",
    "PredictorSpec",
    "RenderedChart",
    "RepetitionsAxis",
    "RotationAxis",
    "SubsetSizesAxis",
    "SweepPlan",
    "SweepResult",
    "ToyPredictorSpec",
    "TraceResult",
    "TransformSpec",
    "WindowGridAxis",
    "build_cells",
    "evaluate",
    "join_reports",
    "known_metrics",
    "load_dataset",
    "load_plan",
    "open_predictor_log",
    "parse_predictor_spec",
    "plan_hash",
    "render_report",
    "run_external_predictor",
    "run_plan",
    "samples_of",
    "spawn_predictor",
    "stability_report",
    "trace_errors",
]
