"""Verification metrics for precipitation nowcasts.

Frames are H×W intensity arrays in mm/h. Pixel coordinates follow image
convention: x is the column index, y the row index, origin top-left.
"""

import logging
import math
from collections.abc import Iterable, Sequence

import numpy as np
from pydantic import BaseModel
from scipy import ndimage

from core import CuCsiGrid, MetricInputError, OutputFrames, PrecipEvent, PredictionSet
from sampling import threshold_responsive_subset

logger = logging.getLogger(__name__)

CSI_THRESHOLDS = (16.0, 32.0, 64.0)
CUCSI_BINS = 30
CUCSI_STEP = 0.015
ACTIVE_THRESHOLD = 5.0
# absorbs division round-off so a CSI that sits exactly on a bin edge lands in the upper bin
_BIN_EPSILON = 1e-9


class ComDisplacement(BaseModel):
    x_gt: float
    y_gt: float
    x_pd: float
    y_pd: float
    delta_r: float


def _pair(gt_frame: np.ndarray, pd_frame: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    gt = np.asarray(gt_frame, dtype=np.float64)
    pd = np.asarray(pd_frame, dtype=np.float64)
    if gt.shape != pd.shape:
        raise MetricInputError(f"frame shapes differ: {gt.shape} vs {pd.shape}")
    return gt, pd


def csi(gt_frame: np.ndarray, pd_frame: np.ndarray, threshold: float) -> float | None:
    """A / (A + B + C) for hits A, misses B and false alarms C at `threshold`; None when nothing is active."""
    gt, pd = _pair(gt_frame, pd_frame)
    observed, forecast = gt >= threshold, pd >= threshold
    hits = int(np.count_nonzero(observed & forecast))
    misses = int(np.count_nonzero(observed & ~forecast))
    false_alarms = int(np.count_nonzero(~observed & forecast))
    total = hits + misses + false_alarms
    return hits / total if total else None


def csi_avg(
    gt_frame: np.ndarray, pd_frame: np.ndarray, thresholds: Sequence[float] = CSI_THRESHOLDS
) -> float | None:
    scores = [csi(gt_frame, pd_frame, t) for t in thresholds]
    if any(score is None for score in scores):
        return None
    return math.fsum(scores) / len(scores)


def csi_bin(score: float, n_bins: int, step: float) -> int:
    return min(int(math.floor(score / step + _BIN_EPSILON)), n_bins - 1)


def cucsi(
    events: list[PrecipEvent],
    preds: PredictionSet,
    threshold: float,
    n_bins: int = CUCSI_BINS,
    step: float = CUCSI_STEP,
) -> CuCsiGrid:
    """Cumulative CSI histogram per lead frame over the threshold-responsive events."""
    if n_bins < 1 or step <= 0:
        raise MetricInputError(f"CuCSI needs n_bins >= 1 and step > 0, got {n_bins} and {step}")
    if n_bins * step < 1:
        logger.warning(f"CuCSI bins cover CSI up to {n_bins * step:g} < 1; higher scores clamp into the top bin")
    output_lens = {event.output_len for event in events}
    if len(output_lens) > 1:
        raise MetricInputError(f"events have differing output lengths {sorted(output_lens)}")
    n_leads = output_lens.pop() if output_lens else 0

    responsive = threshold_responsive_subset(events, preds, threshold).sample_ids
    by_id = {event.event_id: event for event in events}
    counts = np.zeros((n_leads, n_bins), dtype=np.int64)
    for event_id in responsive:
        targets, frames = by_id[event_id].targets, preds[event_id].frames
        for lead in range(n_leads):
            counts[lead, csi_bin(csi(targets[lead], frames[lead], threshold), n_bins, step)] += 1
    return CuCsiGrid(
        threshold=threshold,
        n_bins=n_bins,
        step=step,
        counts=counts.tolist(),
        considered=len(responsive),
        event_ids=list(responsive),
    )


def active_mask(gt_frame: np.ndarray, pd_frame: np.ndarray, threshold: float, union: bool = False) -> np.ndarray:
    gt, pd = _pair(gt_frame, pd_frame)
    return (gt >= threshold) | (pd >= threshold) if union else gt >= threshold


def active_area_mae(
    gt_frame: np.ndarray, pd_frame: np.ndarray, threshold: float = ACTIVE_THRESHOLD, union: bool = False
) -> float | None:
    """MAE restricted to pixels where the ground truth (or, with `union`, either frame) reaches the threshold."""
    gt, pd = _pair(gt_frame, pd_frame)
    mask = active_mask(gt, pd, threshold, union)
    if not mask.any():
        return None
    return float(np.abs(gt[mask] - pd[mask]).mean())


def raw_mae(gt_frame: np.ndarray, pd_frame: np.ndarray) -> float:
    gt, pd = _pair(gt_frame, pd_frame)
    return float(np.abs(gt - pd).mean())


def mean_intensity(frame: np.ndarray) -> float:
    return float(np.asarray(frame, dtype=np.float64).mean())


def center_of_mass(frame: np.ndarray, label: str = "frame") -> tuple[float, float]:
    """Intensity-weighted centre as (x, y) = (column, row)."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.sum() <= 0:
        raise MetricInputError(f"{label} has zero total mass")
    row, col = ndimage.center_of_mass(frame)
    return float(col), float(row)


def center_of_mass_displacement(gt_frame: np.ndarray, pd_frame: np.ndarray) -> ComDisplacement:
    gt, pd = _pair(gt_frame, pd_frame)
    x_gt, y_gt = center_of_mass(gt, "ground truth frame")
    x_pd, y_pd = center_of_mass(pd, "predicted frame")
    return ComDisplacement(x_gt=x_gt, y_gt=y_gt, x_pd=x_pd, y_pd=y_pd, delta_r=math.hypot(x_pd - x_gt, y_pd - y_gt))


def differential_trend(
    event: PrecipEvent, pred_frames: np.ndarray | OutputFrames, i: int, j: int
) -> tuple[float, float]:
    """Mean intensity change from frame i to output frame j, for truth and prediction.

    Both differences use the ground-truth frame i as offset. Indices follow the
    event timeline: outputs are 0..f-1 and inputs -p..-1.
    """
    frames = pred_frames.frames if isinstance(pred_frames, OutputFrames) else np.asarray(pred_frames)
    if not -event.input_len <= i < event.output_len:
        raise MetricInputError(f"offset index {i} outside [-{event.input_len}, {event.output_len})")
    if not 0 <= j < min(event.output_len, len(frames)):
        raise MetricInputError(f"output index {j} outside [0, {min(event.output_len, len(frames))})")
    height, width = event.shape
    area = height * width
    offset = float(event.frame_at(i).sum())
    diff_gt = (float(event.frame_at(j).sum()) - offset) / area
    diff_pd = (float(frames[j].sum()) - offset) / area
    return diff_gt, diff_pd


def shift_frame(frame: np.ndarray, dx: float, dy: float) -> np.ndarray:
    """Translate by dx columns and dy rows, filling uncovered pixels with zero."""
    frame = np.asarray(frame, dtype=np.float64)
    if float(dx).is_integer() and float(dy).is_integer():
        dx, dy = int(dx), int(dy)
        shifted = np.zeros_like(frame)
        height, width = frame.shape
        if abs(dy) >= height or abs(dx) >= width:
            return shifted
        src_rows = slice(max(0, -dy), height - max(0, dy))
        dst_rows = slice(max(0, dy), height - max(0, -dy))
        src_cols = slice(max(0, -dx), width - max(0, dx))
        dst_cols = slice(max(0, dx), width - max(0, -dx))
        shifted[dst_rows, dst_cols] = frame[src_rows, src_cols]
        return shifted
    return ndimage.shift(frame, (dy, dx), order=1, mode="constant", cval=0.0)


def displacement_mae_curve(
    frame: np.ndarray, displacements: Iterable[tuple[float, float]]
) -> list[tuple[float, float]]:
    """(|d|, MAE) of a frame against copies of itself shifted by each (dx, dy)."""
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise MetricInputError("displacement curve needs a non-empty frame")
    return [
        (math.hypot(dx, dy), float(np.abs(frame - shift_frame(frame, dx, dy)).mean())) for dx, dy in displacements
    ]
