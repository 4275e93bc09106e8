import json
import logging
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, TypeAdapter, ValidationError

from core import (
    JetDataset,
    Trajectory,
    UsageError,
    atomic_write_text,
    canonical_dumps,
    load_predictions,
    sample_id,
)
from harness import load_dataset, samples_of
from sampling import (
    FeatureBins,
    Provenance,
    RandomSubset,
    SliceResult,
    SliceSpec,
    ThresholdResponsive,
    TimeWindow,
    bin_by_scalar,
    equalized_bin_sample,
    random_subsample,
    threshold_responsive_subset,
    time_window_slice,
)
from state import State

logger = logging.getLogger(__name__)


class SliceContext(BaseModel):
    workload: Literal["md", "jet", "precip"]
    dataset: str
    spec: dict[str, Any]
    predictions: str | None = None
    total: int | None = None
    name: str = "slice"


def _parse_spec(raw: dict[str, Any]) -> TimeWindow | RandomSubset | FeatureBins | ThresholdResponsive:
    try:
        return TypeAdapter(SliceSpec).validate_python(raw)
    except ValidationError as e:
        raise UsageError(f"Invalid slice spec: {e}") from e


def run_slice(context: SliceContext, seed: int | None = None) -> SliceResult:
    spec = _parse_spec(context.spec)
    dataset = load_dataset(context.workload, Path(context.dataset))
    samples = samples_of(dataset)
    dataset_id = Path(context.dataset).stem

    if isinstance(spec, TimeWindow):
        if not isinstance(dataset, Trajectory):
            raise UsageError("time_window slices apply to MD trajectories")
        return time_window_slice(dataset, spec.start_frac, spec.size_frac)

    if isinstance(spec, RandomSubset):
        draw_seed = seed if seed is not None else spec.seed
        ids = [sample_id(s) for s in samples]
        size = spec.count if spec.count is not None else spec.fraction
        return random_subsample(ids, size, draw_seed, dataset_id=dataset_id)

    if isinstance(spec, FeatureBins):
        if not isinstance(dataset, JetDataset):
            raise UsageError("feature_bins slices apply to jet datasets")
        bins = bin_by_scalar(samples, lambda e: e.jet_energy, spec.lo, spec.hi, spec.n_bins)
        selected = spec.selected or list(range(spec.n_bins))
        if context.total is not None:
            return equalized_bin_sample(bins, selected, context.total, seed or 0, spec, dataset_id)
        ids = sorted(i for index in selected for i in bins[index])
        return SliceResult(spec=spec, sample_ids=ids, provenance=Provenance(dataset_id=dataset_id))

    if context.workload != "precip":
        raise UsageError("threshold_responsive slices apply to precipitation datasets")
    if context.predictions is None:
        raise UsageError("threshold_responsive slices need --predictions")
    _, predictions = load_predictions(context.predictions)
    return threshold_responsive_subset(samples, predictions, spec.threshold, dataset_id)


async def handle_slice(state: State, context: SliceContext) -> int:
    result = run_slice(context, state.seed)
    path = state.output_dir / f"{context.name}.json"
    atomic_write_text(path, canonical_dumps(result.model_dump(mode="json")))
    logger.info(f"Slice {result.spec.variant if result.spec else 'custom'} selected {len(result)} samples")
    if state.json_output:
        print(json.dumps({"samples": len(result), "path": path.as_posix()}))
    else:
        print(f"Selected {len(result)} samples; wrote {path}")
    return 0
