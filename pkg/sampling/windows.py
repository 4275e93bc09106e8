import itertools
import math

from pydantic import ValidationError

from core import SliceError, Trajectory

from .specs import FRACTION_EPSILON, Provenance, SliceResult, TimeWindow


def window_ranks(n_frames: int, start_frac: float, size_frac: float) -> range:
    """Ranks r with floor(start*M) <= r < floor((start+size)*M)."""
    lo = math.floor(start_frac * n_frames + FRACTION_EPSILON)
    hi = math.floor((start_frac + size_frac) * n_frames + FRACTION_EPSILON)
    return range(lo, min(hi, n_frames))


def time_window_slice(traj: Trajectory, start_frac: float, size_frac: float) -> SliceResult:
    try:
        spec = TimeWindow(start_frac=start_frac, size_frac=size_frac)
    except ValidationError as e:
        raise SliceError(f"invalid time window: {e}") from e
    ranks = window_ranks(len(traj), spec.start_frac, spec.size_frac)
    if len(ranks) == 0:
        raise SliceError(f"window start={start_frac} size={size_frac} selects no frames out of {len(traj)}")
    ids = traj.ids
    return SliceResult(
        spec=spec,
        sample_ids=[ids[r] for r in ranks],
        provenance=Provenance(dataset_id=traj.molecule_name),
    )


def window_grid(sizes: list[float], starts: list[float], max_end: float) -> list[TimeWindow]:
    """Cartesian product of sizes and starts (size-major) keeping windows ending by max_end."""
    for size in sizes:
        if not 0.0 < size <= 1.0:
            raise SliceError(f"window size {size} outside (0, 1]")
    for start in starts:
        if not 0.0 <= start < 1.0:
            raise SliceError(f"window start {start} outside [0, 1)")
    if not 0.0 < max_end <= 1.0:
        raise SliceError(f"max_end {max_end} outside (0, 1]")
    windows = [
        TimeWindow(start_frac=start, size_frac=size)
        for size, start in itertools.product(sizes, starts)
        if start + size <= max_end + FRACTION_EPSILON
    ]
    if not windows:
        raise SliceError(f"no window with start + size <= {max_end}")
    return windows
