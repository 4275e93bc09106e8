import math
from collections.abc import Callable, Iterable

from core import OutOfRangeError, Sample, SliceError, sample_id


def bin_index(value: float, lo: float, hi: float, n_bins: int) -> int | None:
    """Index of the half-open bin holding value; the last bin is closed above."""
    if not math.isfinite(value) or value < lo or value > hi:
        return None
    if value == hi:
        return n_bins - 1
    width = (hi - lo) / n_bins
    return min(int((value - lo) // width), n_bins - 1)


def bin_by_scalar(
    events: Iterable[Sample],
    feature_fn: Callable[[Sample], float],
    lo: float,
    hi: float,
    n_bins: int,
) -> dict[int, list[int]]:
    if not lo < hi:
        raise SliceError(f"lo ({lo}) must be below hi ({hi})")
    if n_bins < 1:
        raise SliceError(f"n_bins must be at least 1, got {n_bins}")
    bins: dict[int, list[int]] = {k: [] for k in range(n_bins)}
    out_of_range = []
    for event in events:
        index = bin_index(float(feature_fn(event)), lo, hi, n_bins)
        if index is None:
            out_of_range.append(sample_id(event))
        else:
            bins[index].append(sample_id(event))
    if out_of_range:
        raise OutOfRangeError(f"values outside [{lo}, {hi}]", sorted(out_of_range))
    return {k: sorted(v) for k, v in bins.items()}
