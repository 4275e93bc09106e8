import json
import logging
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from core import PredictionSet, Sample, UsageError, load_predictions, sample_id, write_predictions, write_report
from harness import (
    EvalContext,
    ExternalPredictorSpec,
    FilePredictorSpec,
    PredictorSpec,
    evaluate,
    load_dataset,
    parse_predictor_spec,
    run_external_predictor,
    samples_of,
)
from state import State
from synth import toy_predict

logger = logging.getLogger(__name__)


class EvalCommandContext(BaseModel):
    workload: Literal["md", "jet", "precip"]
    dataset: str
    train: str | None = None
    predictor: dict[str, Any]
    metrics: list[str] = Field(..., min_length=1)
    params: dict[str, dict[str, Any]] = Field(default_factory=dict, description="Metric name -> params")


def _predictor_spec(raw: dict[str, Any]) -> PredictorSpec:
    try:
        return parse_predictor_spec(raw)
    except (ValidationError, ValueError) as e:
        raise UsageError(f"Invalid predictor spec: {e}") from e


async def obtain_predictions(
    state: State, spec: PredictorSpec, workload: str, train: list[Sample], test: list[Sample]
) -> PredictionSet:
    if isinstance(spec, FilePredictorSpec):
        file_workload, predictions = load_predictions(spec.path)
        if file_workload != workload:
            raise UsageError(f"predictions file is for the {file_workload} workload, not {workload}")
        return predictions
    if isinstance(spec, ExternalPredictorSpec):
        return await run_external_predictor(
            spec.command,
            workload,
            test,
            train=train,
            options=spec.options,
            seed=spec.seed,
            timeout_s=spec.timeout_s or state.config.predictor_timeout_s,
            log_dir=state.output_dir,
            env=spec.env,
            cwd=spec.cwd,
            run_id="eval",
        )
    return toy_predict(spec.kind, train, test, spec.seed, spec.options)


async def handle_eval(state: State, context: EvalCommandContext) -> int:
    unused = set(context.params) - set(context.metrics)
    if unused:
        raise UsageError(f"Parameters given for metrics that are not requested: {sorted(unused)}")
    spec = _predictor_spec(context.predictor)
    test = samples_of(load_dataset(context.workload, Path(context.dataset)))
    train = samples_of(load_dataset(context.workload, Path(context.train))) if context.train else []

    predictions = await obtain_predictions(state, spec, context.workload, train, test)
    write_predictions(predictions, context.workload, state.output_dir / "predictions.jsonl")
    missing = [sample_id(s) for s in test if sample_id(s) not in predictions]
    if missing:
        logger.warning(f"{len(missing)} test samples have no prediction and are left out")
        test = [s for s in test if sample_id(s) in predictions]

    ctx = EvalContext(context.workload, test, predictions, train)
    written = []
    for metric in context.metrics:
        for report in evaluate(ctx, metric, context.params.get(metric)):
            path = state.output_dir / f"{report.metric_name}.json"
            write_report(report, path)
            written.append((report, path))

    for report, path in written:
        if state.json_output:
            line = {"metric": report.metric_name, "path": path.as_posix(), "values": report.values}
            if report.aggregates is not None:
                line["mean"] = report.aggregates.mean
            print(json.dumps(line))
        else:
            mean = f" mean={report.aggregates.mean:.6g}" if report.aggregates else ""
            print(f"{report.metric_name}:{mean} -> {path}")
    return 0
