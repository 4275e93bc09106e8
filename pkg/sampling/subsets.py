import math
from collections.abc import Iterable, Mapping

import numpy as np

from core import InsufficientPopulationError, SliceError

from .rng import derive_seed, make_rng
from .specs import FRACTION_EPSILON, FeatureBins, Provenance, RandomSubset, SliceResult


def resolve_count(count_or_fraction: int | float, population: int) -> int:
    """An int is an absolute count; a float is a fraction of the population, floored."""
    if isinstance(count_or_fraction, bool):
        raise SliceError("subset size must be a count or a fraction")
    if isinstance(count_or_fraction, int | np.integer):
        count = int(count_or_fraction)
        if count < 1:
            raise SliceError(f"subset count must be positive, got {count}")
        return count
    fraction = float(count_or_fraction)
    if not 0.0 < fraction <= 1.0:
        raise SliceError(f"subset fraction {fraction} outside (0, 1]")
    return max(1, math.floor(fraction * population + FRACTION_EPSILON))


def _draw(unique_ids: np.ndarray, count: int, seed: int) -> list[int]:
    order = make_rng(seed).permutation(len(unique_ids))[:count]
    return sorted(int(i) for i in unique_ids[order])


def random_subsample(
    ids: Iterable[int], count_or_fraction: int | float, seed: int, dataset_id: str = "dataset"
) -> SliceResult:
    """Uniform draw without replacement; the result is sorted by id."""
    unique_ids = np.unique(np.fromiter(ids, dtype=np.int64))
    count = resolve_count(count_or_fraction, len(unique_ids))
    if count > len(unique_ids):
        raise InsufficientPopulationError(f"cannot draw {count} samples from a population of {len(unique_ids)}")
    if isinstance(count_or_fraction, float):
        spec = RandomSubset(fraction=count_or_fraction, seed=seed)
    else:
        spec = RandomSubset(count=count, seed=seed)
    return SliceResult(
        spec=spec,
        sample_ids=_draw(unique_ids, count, seed),
        provenance=Provenance(dataset_id=dataset_id, seed=seed),
    )


def equalized_counts(n_selected: int, total: int) -> list[int]:
    """floor(total/k) per bin, remainder spread +1 over the lowest-index bins."""
    base, remainder = divmod(total, n_selected)
    return [base + (1 if i < remainder else 0) for i in range(n_selected)]


def equalized_bin_sample(
    bins: Mapping[int, list[int]],
    selected: Iterable[int],
    total: int,
    seed: int,
    spec: FeatureBins | None = None,
    dataset_id: str = "dataset",
) -> SliceResult:
    chosen_bins = sorted(set(selected))
    if not chosen_bins:
        raise SliceError("no bins selected")
    if total < 1:
        raise SliceError(f"total must be positive, got {total}")
    sample_ids: list[int] = []
    for bin_index, count in zip(chosen_bins, equalized_counts(len(chosen_bins), total), strict=True):
        members = np.unique(np.asarray(bins.get(bin_index, []), dtype=np.int64))
        if len(members) < count:
            raise InsufficientPopulationError(f"bin {bin_index} holds {len(members)} samples, {count} required")
        sample_ids.extend(_draw(members, count, derive_seed(seed, bin_index)))
    return SliceResult(
        spec=spec,
        sample_ids=sorted(sample_ids),
        provenance=Provenance(dataset_id=dataset_id, seed=seed),
    )
