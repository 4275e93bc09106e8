"""Tests for windows, seeded subsets, scalar bins and threshold-responsive subsets."""

import numpy as np
import pytest

from core import (
    InsufficientPopulationError,
    JetEvent,
    MolecularFrame,
    OutOfRangeError,
    OutputFrames,
    PrecipEvent,
    PredictionSet,
    SliceError,
    Trajectory,
)
from sampling import (
    bin_by_scalar,
    bin_index,
    derive_seed,
    equalized_bin_sample,
    equalized_counts,
    random_subsample,
    resolve_count,
    threshold_responsive_subset,
    time_window_slice,
    window_grid,
    window_ranks,
)


def _trajectory(ids):
    frames = tuple(MolecularFrame(time_index=t, species=[1], positions=[[0.0, 0.0, float(t)]]) for t in ids)
    return Trajectory(frames=frames)


def _jet(event_id, energy):
    return JetEvent(event_id=event_id, particles=[[energy, 0.0, 0.0, energy]], label=event_id % 2)


def test_window_ranks_follow_the_floor_rule():
    assert window_ranks(100, 0.0, 0.9) == range(0, 90)
    assert window_ranks(100, 0.6, 0.3) == range(60, 90)
    assert window_ranks(7, 0.5, 0.5) == range(3, 7)


def test_time_window_slice_uses_time_sorted_ranks():
    traj = _trajectory([10, 20, 30, 40, 50, 60, 70])
    result = time_window_slice(traj, 0.5, 0.5)
    assert result.sample_ids == [40, 50, 60, 70]
    assert time_window_slice(traj, 0.0, 1.0).sample_ids == traj.ids


def test_time_window_containment_and_disjointness():
    traj = _trajectory(range(50))
    inner = set(time_window_slice(traj, 0.2, 0.2).sample_ids)
    outer = set(time_window_slice(traj, 0.1, 0.5).sample_ids)
    later = set(time_window_slice(traj, 0.4, 0.2).sample_ids)
    assert inner <= outer
    assert inner.isdisjoint(later)


def test_time_window_errors():
    traj = _trajectory(range(3))
    with pytest.raises(SliceError):
        time_window_slice(traj, 0.0, 0.1)
    with pytest.raises(SliceError):
        time_window_slice(traj, 0.5, 0.6)


def test_window_grid_enumeration():
    sizes = [0.30, 0.45, 0.60, 0.75, 0.90]
    starts = [0.0, 0.15, 0.30, 0.45, 0.60]
    windows = window_grid(sizes, starts, 0.90)
    assert len(windows) == 15
    assert (windows[0].size_frac, windows[0].start_frac) == (0.30, 0.0)
    assert (windows[-1].size_frac, windows[-1].start_frac) == (0.90, 0.0)
    assert len(window_grid([0.9], [0.0], 0.9)) == 1
    with pytest.raises(SliceError):
        window_grid([0.5], [0.6], 0.9)


def test_resolve_count():
    assert resolve_count(10, 100) == 10
    assert resolve_count(0.05, 10000) == 500
    assert resolve_count(1.0, 37) == 37
    with pytest.raises(SliceError):
        resolve_count(1.5, 10)


def test_random_subsample_basics():
    ids = list(range(100))
    assert random_subsample(ids, 1.0, seed=3).sample_ids == ids
    first = random_subsample(ids, 10, seed=7)
    second = random_subsample(ids, 10, seed=7)
    assert first.sample_ids == second.sample_ids
    assert first.sample_ids == sorted(first.sample_ids)
    assert len(set(first.sample_ids)) == 10
    assert first.provenance.seed == 7


def test_random_subsample_ignores_duplicate_ids():
    ids = list(range(40))
    assert random_subsample(ids + ids, 10, seed=5).sample_ids == random_subsample(ids, 10, seed=5).sample_ids


def test_random_subsample_rejects_oversized_draw():
    with pytest.raises(InsufficientPopulationError):
        random_subsample(range(5), 6, seed=0)


def test_random_subsample_is_uniform():
    """Inclusion frequency of every id stays near the sampling fraction."""
    assert len(random_subsample(range(10000), 0.05, seed=11)) == 500

    n_ids, n_seeds = 1000, 2000
    hits = np.zeros(n_ids)
    for seed in range(n_seeds):
        hits[random_subsample(range(n_ids), 0.05, seed=seed).sample_ids] += 1
    frequency = hits / n_seeds
    assert frequency.mean() == pytest.approx(0.05)
    assert np.abs(frequency - 0.05).max() < 0.03


def test_derive_seed_is_stable_and_distinct():
    assert derive_seed(42, 3) == derive_seed(42, 3)
    assert len({derive_seed(42, i) for i in range(100)}) == 100
    assert derive_seed(42, 0) != derive_seed(43, 0)


def test_bin_index_boundaries():
    assert bin_index(550.0, 550.0, 2440.0, 8) == 0
    assert bin_index(2440.0, 550.0, 2440.0, 8) == 7
    assert bin_index(550.0 + 236.25, 550.0, 2440.0, 8) == 1
    assert bin_index(549.9, 550.0, 2440.0, 8) is None


def test_bin_by_scalar_counts_every_value_once():
    rng = np.random.default_rng(0)
    events = [_jet(i, e) for i, e in enumerate(rng.uniform(550.0, 2440.0, 1000))]
    bins = bin_by_scalar(events, lambda e: e.jet_energy, 550.0, 2440.0, 8)
    assert sorted(bins) == list(range(8))
    assert sum(len(ids) for ids in bins.values()) == 1000
    single = bin_by_scalar(events, lambda e: e.jet_energy, 550.0, 2440.0, 1)
    assert single[0] == list(range(1000))


def test_bin_by_scalar_reports_out_of_range_ids():
    events = [_jet(0, 600.0), _jet(1, 3000.0), _jet(2, 100.0)]
    with pytest.raises(OutOfRangeError) as excinfo:
        bin_by_scalar(events, lambda e: e.jet_energy, 550.0, 2440.0, 8)
    assert excinfo.value.ids == [1, 2]


def test_equalized_counts_remainder_rule():
    assert equalized_counts(2, 10) == [5, 5]
    assert equalized_counts(3, 10) == [4, 3, 3]


def test_equalized_bin_sample_draws_per_bin():
    bins = {k: list(range(1000 * k, 1000 * (k + 1))) for k in range(4)}
    result = equalized_bin_sample(bins, [0, 1, 2, 3], 400, seed=1)
    assert len(result.sample_ids) == len(set(result.sample_ids)) == 400
    per_bin = [sum(1 for i in result.sample_ids if i // 1000 == k) for k in range(4)]
    assert per_bin == [100, 100, 100, 100]
    assert equalized_bin_sample(bins, [0, 1, 2, 3], 400, seed=1).sample_ids == result.sample_ids


def test_equalized_bin_sample_insufficient_population():
    bins = {0: [1, 2, 3], 1: list(range(10, 30))}
    with pytest.raises(InsufficientPopulationError):
        equalized_bin_sample(bins, [0, 1], 10, seed=0)


def _event(event_id, targets):
    targets = np.asarray(targets, dtype=float)
    frames = np.concatenate([np.zeros((1, *targets.shape[1:])), targets])
    return PrecipEvent(event_id=event_id, frames=frames, input_len=1, output_len=len(targets))


def _predictions(events, fill=0.0):
    entries = {e.event_id: OutputFrames(frames=np.full_like(e.targets, fill)) for e in events}
    return PredictionSet(model_id="m", run_id="r", seed=None, entries=entries)


def test_threshold_responsive_subset_cases():
    zero = _event(0, np.zeros((3, 4, 4)))
    every_frame = np.zeros((3, 4, 4))
    every_frame[:, 1, 1] = 16.0
    responsive = _event(1, every_frame)
    one_frame = np.zeros((3, 4, 4))
    one_frame[0, 2, 2] = 40.0
    partial = _event(2, one_frame)
    events = [zero, responsive, partial]

    result = threshold_responsive_subset(events, _predictions(events), 16.0)
    assert result.sample_ids == [1]
    # A prediction above T on every frame makes every event responsive.
    assert threshold_responsive_subset(events, _predictions(events, 20.0), 16.0).sample_ids == [0, 1, 2]


def test_threshold_responsive_subset_is_monotone_in_threshold():
    rng = np.random.default_rng(4)
    events = [_event(i, rng.gamma(1.0, 10.0, (3, 6, 6)) * rng.uniform(0.2, 3.0)) for i in range(30)]
    preds = _predictions(events)
    previous = None
    for threshold in (4.0, 16.0, 32.0, 64.0):
        ids = set(threshold_responsive_subset(events, preds, threshold).sample_ids)
        if previous is not None:
            assert ids <= previous
        previous = ids


def test_threshold_responsive_subset_missing_prediction():
    events = [_event(0, np.ones((2, 3, 3)))]
    empty = PredictionSet(model_id="m", run_id="r", seed=None, entries={})
    with pytest.raises(SliceError):
        threshold_responsive_subset(events, empty, 16.0)
