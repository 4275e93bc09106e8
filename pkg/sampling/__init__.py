"""Problem-space partitioning: windows, seeded subsets, scalar bins and responsive subsets."""

from .bins import bin_by_scalar, bin_index
from .responsive import is_responsive, threshold_responsive_subset
from .rng import derive_seed, make_rng
from .specs import (
    FeatureBins,
    Provenance,
    RandomSubset,
    SliceResult,
    SliceSpec,
    ThresholdResponsive,
    TimeWindow,
)
from .subsets import equalized_bin_sample, equalized_counts, random_subsample, resolve_count
from .windows import time_window_slice, window_grid, window_ranks

__all__ = [
    "FeatureBins",
    "Provenance",
    "RandomSubset",
    "SliceResult",
    "SliceSpec",
    "ThresholdResponsive",
    "TimeWindow",
    "bin_by_scalar",
    "bin_index",
    "derive_seed",
    "equalized_bin_sample",
    "equalized_counts",
    "is_responsive",
    "make_rng",
    "random_subsample",
    "resolve_count",
    "threshold_responsive_subset",
    "time_window_slice",
    "window_grid",
    "window_ranks",
]
