"""Smooth structural fingerprint of a molecular frame.

Each unordered species pair (a, b) gets a block of ``n_bins`` bins over
[0, r_cut]; every interatomic distance of that pair contributes a Gaussian of
width ``sigma`` integrated over each bin. The fingerprint is invariant under
rigid motion and atom permutation and is compared by cosine similarity.
"""

import itertools
import math
from collections.abc import Sequence
from typing import Protocol

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.spatial.distance import pdist
from scipy.special import erf

from core import InvariantError, MolecularFrame


class DescriptorParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    r_cut: float = Field(default=5.0, gt=0, description="Cutoff radius in Å")
    n_bins: int = Field(default=32, ge=4)
    sigma: float = Field(default=0.1, gt=0, description="Gaussian smearing width in Å")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.r_cut, self.n_bins + 1)


class Descriptor(Protocol):
    params: DescriptorParams

    def __call__(self, frame: MolecularFrame, species: Sequence[int] | None = None) -> np.ndarray: ...


def species_pairs(species: Sequence[int]) -> list[tuple[int, int]]:
    return list(itertools.combinations_with_replacement(sorted(set(int(z) for z in species)), 2))


def smeared_histogram(distances: np.ndarray, params: DescriptorParams) -> np.ndarray:
    if len(distances) == 0:
        return np.zeros(params.n_bins)
    scaled = (params.edges[None, :] - distances[:, None]) / (params.sigma * math.sqrt(2.0))
    cdf = 0.5 * erf(scaled)
    return np.diff(cdf, axis=1).sum(axis=0)


class PairDistanceDescriptor:
    def __init__(self, params: DescriptorParams | None = None):
        self.params = params or DescriptorParams()

    def __call__(self, frame: MolecularFrame, species: Sequence[int] | None = None) -> np.ndarray:
        if frame.n_atoms < 2:
            raise InvariantError(f"frame {frame.time_index}: descriptor needs at least 2 atoms")
        universe = species if species is not None else frame.species.tolist()
        distances = pdist(frame.positions)
        pairs_i, pairs_j = np.triu_indices(frame.n_atoms, k=1)
        z_lo = np.minimum(frame.species[pairs_i], frame.species[pairs_j])
        z_hi = np.maximum(frame.species[pairs_i], frame.species[pairs_j])
        blocks = [
            smeared_histogram(distances[(z_lo == a) & (z_hi == b)], self.params) for a, b in species_pairs(universe)
        ]
        vector = np.concatenate(blocks)
        norm = np.linalg.norm(vector)
        return vector / norm if norm > 0 else vector


def structural_descriptor(
    frame: MolecularFrame, params: DescriptorParams, species: Sequence[int] | None = None
) -> np.ndarray:
    return PairDistanceDescriptor(params)(frame, species)
