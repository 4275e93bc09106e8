"""Metric registry: turns (samples, predictions, params) into MetricReports for each workload."""

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from pydantic import ValidationError

from core import (
    ClassScores,
    InvariantError,
    JetEvent,
    MetricInputError,
    MetricReport,
    MolecularFrame,
    PrecipEvent,
    PredictionSet,
    Sample,
    Workload,
)
from metrics import (
    ACTIVE_THRESHOLD,
    CSI_THRESHOLDS,
    CUCSI_BINS,
    CUCSI_STEP,
    StabilityResult,
    active_area_mae,
    auc_report,
    center_of_mass_displacement,
    classification_metrics,
    csi,
    csi_avg,
    cucsi,
    differential_trend,
    energy_error_series,
    error_scatter,
    force_mae,
    mean_intensity,
    raw_mae,
    scatter_reports,
)
from transforms import DescriptorCache, DescriptorParams, PairDistanceDescriptor, similarity_matrix


@dataclass
class EvalContext:
    workload: Workload
    test: Sequence[Sample]
    preds: PredictionSet
    train: Sequence[Sample] = field(default_factory=list)


MetricFn = Callable[[EvalContext, dict[str, Any]], list[MetricReport]]


def _check_params(name: str, params: dict[str, Any], allowed: set[str]) -> None:
    unknown = sorted(set(params) - allowed)
    if unknown:
        raise MetricInputError(f"metric '{name}' got unknown params {unknown}")


def _md_force_mae(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("force_mae", params, {"group_by_species"})
    return [force_mae(ctx.test, ctx.preds, group_by_species=params.get("group_by_species", True))]


def _md_energy_error(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("energy_error", params, {"per_atom"})
    return [energy_error_series(ctx.test, ctx.preds, per_atom=params.get("per_atom", False))]


def _md_error_scatter(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("error_scatter", params, set())
    return scatter_reports(error_scatter(ctx.test, ctx.preds))


def _md_window_similarity(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    """Mean descriptor similarity of each test frame to the training frames."""
    try:
        descriptor_params = DescriptorParams(**params)
    except ValidationError as e:
        raise MetricInputError(f"invalid window_similarity params: {e}") from e
    train = [s for s in ctx.train if isinstance(s, MolecularFrame)]
    test = sorted((s for s in ctx.test if isinstance(s, MolecularFrame)), key=lambda f: f.time_index)
    matrix = similarity_matrix(test, train, DescriptorCache(PairDistanceDescriptor(descriptor_params)))
    per_frame = dict(zip((f.time_index for f in test), matrix.mean(axis=1).tolist(), strict=True))
    return [
        MetricReport.build(
            "window_similarity",
            per_frame,
            params=descriptor_params.model_dump(),
            values={"mean": float(matrix.mean())},
        )
    ]


def _jet_inputs(ctx: EvalContext) -> tuple[list[int], list[float], list[int]]:
    events = sorted((s for s in ctx.test if isinstance(s, JetEvent)), key=lambda e: e.event_id)
    ids, scores, labels = [], [], []
    for event in events:
        prediction = ctx.preds.entries.get(event.event_id)
        if not isinstance(prediction, ClassScores):
            raise MetricInputError(f"no class scores for event {event.event_id}")
        ids.append(event.event_id)
        scores.append(prediction.signal)
        labels.append(event.label)
    return ids, scores, labels


def _jet_accuracy(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("accuracy", params, set())
    ids, scores, labels = _jet_inputs(ctx)
    return [classification_metrics(scores, labels, ids)]


def _jet_auc(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("auc", params, set())
    ids, scores, labels = _jet_inputs(ctx)
    return [auc_report(scores, labels, ids)]


FrameMetric = Callable[[np.ndarray, np.ndarray], float | None]


def _precip_pairs(ctx: EvalContext) -> list[tuple[PrecipEvent, np.ndarray]]:
    events = sorted((s for s in ctx.test if isinstance(s, PrecipEvent)), key=lambda e: e.event_id)
    try:
        ctx.preds.check_against(events)
    except InvariantError as e:
        raise MetricInputError(str(e)) from e
    return [(event, ctx.preds[event.event_id].frames) for event in events]


def per_lead_report(
    name: str,
    ctx: EvalContext,
    frame_metric: FrameMetric,
    leads: Sequence[int] | None,
    params: dict[str, Any],
) -> MetricReport:
    """Per-event mean over the defined lead values, plus a per-lead mean across events."""
    per_event: dict[int, float | None] = {}
    by_lead: dict[int, list[float]] = {}
    for event, frames in _precip_pairs(ctx):
        selected = list(range(event.output_len)) if leads is None else list(leads)
        defined = []
        for lead in selected:
            if not 0 <= lead < event.output_len:
                raise MetricInputError(f"lead {lead} outside [0, {event.output_len})")
            value = frame_metric(event.targets[lead], frames[lead])
            if value is not None:
                defined.append(value)
                by_lead.setdefault(lead, []).append(value)
        per_event[event.event_id] = math.fsum(defined) / len(defined) if defined else None
    values = {f"lead_{lead}": math.fsum(v) / len(v) for lead, v in sorted(by_lead.items())}
    return MetricReport.build(name, per_event, params=params, values=values)


def _leads(params: dict[str, Any]) -> list[int] | None:
    leads = params.get("leads")
    return None if leads is None else [int(lead) for lead in leads]


def _precip_csi(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("csi", params, {"threshold", "leads"})
    threshold = float(params.get("threshold", CSI_THRESHOLDS[0]))
    return [
        per_lead_report(
            "csi", ctx, lambda gt, pd: csi(gt, pd, threshold), _leads(params), {**params, "threshold": threshold}
        )
    ]


def _precip_csi_avg(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("csi_avg", params, {"thresholds", "leads"})
    thresholds = tuple(float(t) for t in params.get("thresholds", CSI_THRESHOLDS))
    return [
        per_lead_report(
            "csi_avg",
            ctx,
            lambda gt, pd: csi_avg(gt, pd, thresholds),
            _leads(params),
            {**params, "thresholds": list(thresholds)},
        )
    ]


def _precip_cucsi(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("cucsi", params, {"threshold", "n_bins", "step"})
    threshold = float(params.get("threshold", CSI_THRESHOLDS[0]))
    n_bins = int(params.get("n_bins", CUCSI_BINS))
    step = float(params.get("step", CUCSI_STEP))
    events = [event for event, _ in _precip_pairs(ctx)]
    grid = cucsi(events, ctx.preds, threshold, n_bins, step)
    return [
        MetricReport.build(
            "cucsi",
            {},
            params={"threshold": threshold, "n_bins": n_bins, "step": step},
            values={"considered": float(grid.considered)},
            grid=grid,
        )
    ]


def _precip_mae(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("mae", params, {"leads"})
    return [per_lead_report("mae", ctx, raw_mae, _leads(params), params)]


def _precip_active_mae(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("active_mae", params, {"threshold", "union", "leads"})
    threshold = float(params.get("threshold", ACTIVE_THRESHOLD))
    union = bool(params.get("union", False))
    return [
        per_lead_report(
            "active_mae",
            ctx,
            lambda gt, pd: active_area_mae(gt, pd, threshold, union),
            _leads(params),
            {**params, "threshold": threshold, "union": union},
        )
    ]


def _precip_com(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("com_displacement", params, {"leads"})
    return [
        per_lead_report(
            "com_displacement",
            ctx,
            lambda gt, pd: center_of_mass_displacement(gt, pd).delta_r,
            _leads(params),
            params,
        )
    ]


def _precip_mean_intensity(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("mean_intensity", params, {"leads"})
    return [per_lead_report("mean_intensity", ctx, lambda gt, _: mean_intensity(gt), _leads(params), params)]


def _precip_differential_trend(ctx: EvalContext, params: dict[str, Any]) -> list[MetricReport]:
    _check_params("differential_trend", params, {"i", "j"})
    i, j = int(params.get("i", -1)), int(params.get("j", 0))
    gt_values, pd_values = {}, {}
    for event, frames in _precip_pairs(ctx):
        gt_values[event.event_id], pd_values[event.event_id] = differential_trend(event, frames, i, j)
    return [
        MetricReport.build("differential_trend_gt", gt_values, params={"i": i, "j": j}),
        MetricReport.build("differential_trend_pd", pd_values, params={"i": i, "j": j}),
    ]


METRICS: dict[str, dict[str, MetricFn]] = {
    "md": {
        "force_mae": _md_force_mae,
        "energy_error": _md_energy_error,
        "error_scatter": _md_error_scatter,
        "window_similarity": _md_window_similarity,
    },
    "jet": {
        "accuracy": _jet_accuracy,
        "auc": _jet_auc,
    },
    "precip": {
        "csi": _precip_csi,
        "csi_avg": _precip_csi_avg,
        "cucsi": _precip_cucsi,
        "mae": _precip_mae,
        "active_mae": _precip_active_mae,
        "com_displacement": _precip_com,
        "mean_intensity": _precip_mean_intensity,
        "differential_trend": _precip_differential_trend,
    },
}

# Stability analysis reuses these precipitation metric names.
STABILITY_METRICS = {"mae": "mae", "com_displacement": "delta_r"}


def known_metrics(workload: Workload) -> set[str]:
    return set(METRICS[workload])


def evaluate(ctx: EvalContext, name: str, params: dict[str, Any] | None = None) -> list[MetricReport]:
    metric = METRICS[ctx.workload].get(name)
    if metric is None:
        raise MetricInputError(f"unknown metric '{name}' for the {ctx.workload} workload")
    return metric(ctx, dict(params or {}))


def stability_report(result: StabilityResult, event_id: int) -> MetricReport:
    """Per-run values (mean over leads) with one histogram per lead."""
    entries = [entry for entry in result.entries if entry.event_id == event_id]
    if not entries:
        raise MetricInputError(f"no stability entries for event {event_id}")
    per_run = {
        run: math.fsum(entry.samples[run] for entry in entries) / len(entries) for run in range(result.runs)
    }
    values: dict[str, float | None] = {}
    for entry in entries:
        values[f"lead_{entry.lead}_std"] = float(np.std(entry.samples))
        values[f"lead_{entry.lead}_outliers"] = float(len(entry.outliers))
    return MetricReport.build(
        f"stability_{result.metric}",
        per_run,
        params={"runs": result.runs, "leads": [entry.lead for entry in entries]},
        scope={"event_id": event_id},
        values=values,
        histograms=[entry.histogram for entry in entries],
    )

