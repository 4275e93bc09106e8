"""Domain data model for the three workload families and their predictions."""

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np

from .errors import InvariantError

Workload = Literal["md", "jet", "precip"]


def _frozen_array(value: Any, dtype: type, name: str) -> np.ndarray:
    array = np.array(value, dtype=dtype)
    if array.dtype.kind == "f" and not np.all(np.isfinite(array)):
        raise InvariantError(f"{name} contains non-finite values")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MolecularFrame:
    time_index: int
    species: np.ndarray
    positions: np.ndarray
    energy: float | None = None
    forces: np.ndarray | None = None

    def __post_init__(self):
        species = _frozen_array(self.species, np.int64, "species").reshape(-1)
        positions = _frozen_array(self.positions, np.float64, f"frame {self.time_index} positions")
        if positions.ndim != 2 or positions.shape != (len(species), 3):
            raise InvariantError(
                f"frame {self.time_index}: positions shape {positions.shape} does not match "
                f"{len(species)} species"
            )
        object.__setattr__(self, "species", species)
        object.__setattr__(self, "positions", positions)
        if self.forces is not None:
            forces = _frozen_array(self.forces, np.float64, f"frame {self.time_index} forces")
            if forces.shape != positions.shape:
                raise InvariantError(
                    f"frame {self.time_index}: forces shape {forces.shape} does not match "
                    f"{len(species)} species"
                )
            object.__setattr__(self, "forces", forces)
        if self.energy is not None:
            energy = float(self.energy)
            if not np.isfinite(energy):
                raise InvariantError(f"frame {self.time_index}: energy is not finite")
            object.__setattr__(self, "energy", energy)

    @property
    def n_atoms(self) -> int:
        return len(self.species)

    @property
    def is_labeled(self) -> bool:
        return self.energy is not None and self.forces is not None

    def unlabeled(self) -> "MolecularFrame":
        return MolecularFrame(time_index=self.time_index, species=self.species, positions=self.positions)


@dataclass(frozen=True, eq=False)
class Trajectory:
    frames: tuple[MolecularFrame, ...]
    molecule_name: str = "molecule"

    def __post_init__(self):
        frames = tuple(self.frames)
        if not frames:
            raise InvariantError("trajectory must contain at least one frame")
        reference = frames[0].species
        for previous, frame in zip(frames, frames[1:], strict=False):
            if frame.time_index <= previous.time_index:
                raise InvariantError(
                    f"time_index must be strictly increasing: {previous.time_index} then {frame.time_index}"
                )
        for frame in frames:
            if not np.array_equal(frame.species, reference):
                raise InvariantError(f"frame {frame.time_index}: species differ from the first frame")
        object.__setattr__(self, "frames", frames)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self) -> Iterator[MolecularFrame]:
        return iter(self.frames)

    @property
    def ids(self) -> list[int]:
        return [frame.time_index for frame in self.frames]

    @property
    def species(self) -> np.ndarray:
        return self.frames[0].species

    def by_id(self) -> dict[int, MolecularFrame]:
        return {frame.time_index: frame for frame in self.frames}

    def select(self, ids: Iterable[int]) -> list[MolecularFrame]:
        lookup = self.by_id()
        return [lookup[i] for i in sorted(ids)]


@dataclass(frozen=True, eq=False)
class JetEvent:
    event_id: int
    particles: np.ndarray
    label: int
    jet_energy: float | None = None

    def __post_init__(self):
        particles = _frozen_array(self.particles, np.float64, f"event {self.event_id} particles")
        if particles.ndim != 2 or particles.shape[1] != 4:
            raise InvariantError(f"event {self.event_id}: particles must be an (n, 4) array of (E, px, py, pz)")
        if len(particles) == 0:
            raise InvariantError(f"event {self.event_id}: at least one particle is required")
        if self.label not in (0, 1):
            raise InvariantError(f"event {self.event_id}: label must be 0 or 1, got {self.label}")
        total = float(particles[:, 0].sum())
        if self.jet_energy is None:
            object.__setattr__(self, "jet_energy", total)
        elif abs(self.jet_energy - total) > 1e-6 * max(abs(total), 1.0):
            raise InvariantError(
                f"event {self.event_id}: jet_energy {self.jet_energy} differs from constituent sum {total}"
            )
        object.__setattr__(self, "particles", particles)

    @property
    def energies(self) -> np.ndarray:
        return self.particles[:, 0]

    @property
    def momenta(self) -> np.ndarray:
        return self.particles[:, 1:]


@dataclass(frozen=True, eq=False)
class JetDataset:
    events: tuple[JetEvent, ...]
    name: str = "jets"

    def __post_init__(self):
        events = tuple(sorted(self.events, key=lambda e: e.event_id))
        seen = set()
        for event in events:
            if event.event_id in seen:
                raise InvariantError(f"duplicate event_id {event.event_id}")
            seen.add(event.event_id)
        object.__setattr__(self, "events", events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self) -> Iterator[JetEvent]:
        return iter(self.events)

    @property
    def ids(self) -> list[int]:
        return [event.event_id for event in self.events]

    def by_id(self) -> dict[int, JetEvent]:
        return {event.event_id: event for event in self.events}

    def select(self, ids: Iterable[int]) -> list[JetEvent]:
        lookup = self.by_id()
        return [lookup[i] for i in sorted(ids)]


@dataclass(frozen=True, eq=False)
class PrecipEvent:
    event_id: int
    frames: np.ndarray
    input_len: int = 9
    output_len: int = 20
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        frames = _frozen_array(self.frames, np.float64, f"event {self.event_id} frames")
        if frames.ndim != 3 or frames.shape[1] < 1 or frames.shape[2] < 1:
            raise InvariantError(f"event {self.event_id}: frames must be a T×H×W array")
        if frames.shape[0] != self.input_len + self.output_len:
            raise InvariantError(
                f"event {self.event_id}: T={frames.shape[0]} but p + f = {self.input_len + self.output_len}"
            )
        if np.any(frames < 0):
            raise InvariantError(f"event {self.event_id}: negative intensity")
        object.__setattr__(self, "frames", frames)

    @property
    def shape(self) -> tuple[int, int]:
        return self.frames.shape[1], self.frames.shape[2]

    @property
    def inputs(self) -> np.ndarray:
        return self.frames[: self.input_len]

    @property
    def targets(self) -> np.ndarray:
        return self.frames[self.input_len :]

    def frame_at(self, index: int) -> np.ndarray:
        """Frame on the timeline where output frames are 0..f-1 and inputs are -p..-1."""
        if not -self.input_len <= index < self.output_len:
            raise IndexError(f"frame index {index} outside [-{self.input_len}, {self.output_len})")
        return self.frames[self.input_len + index]


@dataclass(frozen=True, eq=False)
class EnergyForces:
    energy: float
    forces: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "energy", float(self.energy))
        object.__setattr__(self, "forces", _frozen_array(self.forces, np.float64, "predicted forces"))


@dataclass(frozen=True, eq=False)
class ClassScores:
    scores: np.ndarray

    def __post_init__(self):
        scores = _frozen_array(self.scores, np.float64, "class scores").reshape(-1)
        if np.any(scores < 0) or np.any(scores > 1):
            raise InvariantError("class scores must lie in [0, 1]")
        if abs(scores.sum() - 1.0) > 1e-9:
            raise InvariantError(f"class scores must sum to 1, got {scores.sum()}")
        object.__setattr__(self, "scores", scores)

    @property
    def signal(self) -> float:
        return float(self.scores[1])


@dataclass(frozen=True, eq=False)
class OutputFrames:
    frames: np.ndarray

    def __post_init__(self):
        frames = _frozen_array(self.frames, np.float64, "predicted frames")
        if frames.ndim != 3:
            raise InvariantError("predicted frames must be an f×H×W array")
        object.__setattr__(self, "frames", frames)


Prediction = EnergyForces | ClassScores | OutputFrames


@dataclass(frozen=True, eq=False)
class PredictionSet:
    model_id: str
    run_id: str
    seed: int | None
    entries: Mapping[int, Prediction]

    def __getitem__(self, sample_id: int) -> Prediction:
        return self.entries[sample_id]

    def __contains__(self, sample_id: int) -> bool:
        return sample_id in self.entries

    @property
    def ids(self) -> list[int]:
        return sorted(self.entries)

    def check_against(self, samples: Iterable[MolecularFrame | JetEvent | PrecipEvent]) -> None:
        """Validate that every sample has a prediction of the expected shape."""
        for sample in samples:
            if isinstance(sample, MolecularFrame):
                entry = self.entries.get(sample.time_index)
                if not isinstance(entry, EnergyForces) or entry.forces.shape != sample.positions.shape:
                    raise InvariantError(f"prediction for frame {sample.time_index} is missing or mis-shaped")
            elif isinstance(sample, JetEvent):
                entry = self.entries.get(sample.event_id)
                if not isinstance(entry, ClassScores) or len(entry.scores) != 2:
                    raise InvariantError(f"prediction for event {sample.event_id} is missing or mis-shaped")
            else:
                entry = self.entries.get(sample.event_id)
                expected = (sample.output_len, *sample.shape)
                if not isinstance(entry, OutputFrames) or entry.frames.shape != expected:
                    raise InvariantError(f"prediction for event {sample.event_id} is missing or mis-shaped")
