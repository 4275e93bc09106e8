import threading
from collections.abc import Mapping, Sequence
from typing import TypeVar

import numpy as np

from core import MolecularFrame, SliceError, Trajectory
from sampling import SliceResult

from .descriptor import Descriptor, DescriptorParams, PairDistanceDescriptor

K = TypeVar("K")


class DescriptorCache:
    """Read-mostly memo of descriptors keyed by frame id; insertion is serialized."""

    def __init__(self, descriptor: Descriptor):
        self.descriptor = descriptor
        self._vectors: dict[tuple[int, tuple[int, ...]], np.ndarray] = {}
        self._lock = threading.Lock()

    def get(self, frame: MolecularFrame, species: Sequence[int]) -> np.ndarray:
        key = (frame.time_index, tuple(species))
        vector = self._vectors.get(key)
        if vector is None:
            vector = self.descriptor(frame, species)
            with self._lock:
                vector = self._vectors.setdefault(key, vector)
        return vector

    def __len__(self) -> int:
        return len(self._vectors)


def _stack(frames: list[MolecularFrame], species: Sequence[int], cache: DescriptorCache) -> np.ndarray:
    return np.stack([cache.get(frame, species) for frame in frames])


def similarity_matrix(
    frames_a: list[MolecularFrame], frames_b: list[MolecularFrame], cache: DescriptorCache
) -> np.ndarray:
    """Cosine similarity of every (a, b) descriptor pair; zero descriptors score 0."""
    if not frames_a or not frames_b:
        raise SliceError("window similarity needs two non-empty windows")
    species = sorted({int(z) for frame in (*frames_a, *frames_b) for z in frame.species})
    # descriptors are unit-normalized (or all-zero), so the dot product is the cosine
    return _stack(frames_a, species, cache) @ _stack(frames_b, species, cache).T


def window_similarity(
    traj: Trajectory,
    window_a: SliceResult,
    window_b: SliceResult,
    params: DescriptorParams,
    cache: DescriptorCache | None = None,
) -> float:
    cache = cache or DescriptorCache(PairDistanceDescriptor(params))
    matrix = similarity_matrix(traj.select(window_a.sample_ids), traj.select(window_b.sample_ids), cache)
    return float(matrix.mean())


def flag_low_similarity(similarities: Mapping[K, float], threshold: float) -> list[K]:
    """Keys whose similarity to the reference window falls below the trust threshold."""
    return sorted(key for key, value in similarities.items() if value < threshold)
