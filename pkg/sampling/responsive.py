import numpy as np

from core import OutputFrames, PrecipEvent, PredictionSet, SliceError

from .specs import Provenance, SliceResult, ThresholdResponsive


def is_responsive(gt_frames: np.ndarray, pd_frames: np.ndarray, threshold: float) -> bool:
    """True iff every lead frame has A + B + C > 0, i.e. some pixel reaches T in truth or prediction."""
    active = (gt_frames >= threshold) | (pd_frames >= threshold)
    return bool(np.all(active.reshape(len(active), -1).any(axis=1)))


def threshold_responsive_subset(
    events: list[PrecipEvent], preds: PredictionSet, threshold: float, dataset_id: str = "precip"
) -> SliceResult:
    kept = []
    for event in events:
        prediction = preds.entries.get(event.event_id)
        if not isinstance(prediction, OutputFrames):
            raise SliceError(f"missing prediction for event {event.event_id}")
        if is_responsive(event.targets, prediction.frames, threshold):
            kept.append(event.event_id)
    return SliceResult(
        spec=ThresholdResponsive(threshold=threshold),
        sample_ids=sorted(kept),
        provenance=Provenance(dataset_id=dataset_id),
    )
