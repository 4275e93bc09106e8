"""Harmonic toy molecule that hops between two configuration basins."""

import numpy as np
from pydantic import BaseModel, Field, model_validator

from core import MolecularFrame, Trajectory
from sampling import make_rng

DEFAULT_SPECIES = (1, 6, 8)
DEFAULT_BOND_LENGTH = 1.2


class MdToyParams(BaseModel):
    n_atoms: int = Field(default=4, ge=1)
    species: list[int] | None = Field(default=None, description="Atomic numbers; cycles H, C, O when omitted")
    k: float = Field(default=2.0, gt=0, description="Spring constant in eV/Å²")
    equilibrium: list[list[float]] | None = Field(default=None, description="x0 in Å; a chain along x when omitted")
    basin_period: int = Field(default=200, ge=2, description="Frames per full A→B→A basin cycle")
    basin_amplitude: float = Field(default=0.3, ge=0, description="Displacement of each basin from x0 in Å")
    breathing: float = Field(default=0.5, ge=0, description="Relative spread of the basin displacement per frame")
    noise: float = Field(default=0.01, ge=0, description="Gaussian positional jitter in Å")
    n_frames: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_geometry(self):
        if self.species is not None and len(self.species) != self.n_atoms:
            raise ValueError(f"{len(self.species)} species given for {self.n_atoms} atoms")
        if self.equilibrium is not None:
            if len(self.equilibrium) != self.n_atoms or any(len(row) != 3 for row in self.equilibrium):
                raise ValueError(f"equilibrium must be a {self.n_atoms}×3 list")
        return self

    def species_array(self) -> np.ndarray:
        if self.species is not None:
            return np.array(self.species, dtype=np.int64)
        return np.array([DEFAULT_SPECIES[i % len(DEFAULT_SPECIES)] for i in range(self.n_atoms)], dtype=np.int64)

    def equilibrium_array(self) -> np.ndarray:
        if self.equilibrium is not None:
            return np.array(self.equilibrium, dtype=np.float64)
        positions = np.zeros((self.n_atoms, 3))
        positions[:, 0] = DEFAULT_BOND_LENGTH * np.arange(self.n_atoms)
        return positions


def harmonic_energy_forces(positions: np.ndarray, equilibrium: np.ndarray, k: float) -> tuple[float, np.ndarray]:
    """E = k/2 * sum |x - x0|^2 and F = -k (x - x0)."""
    displacement = np.asarray(positions, dtype=np.float64) - equilibrium
    return 0.5 * k * float(np.sum(displacement**2)), -k * displacement


def basin_sign(time_index: int, period: int) -> int:
    """+1 during the first half of each cycle, -1 during the second."""
    return 1 if time_index % period < period // 2 else -1


def gen_md_toy(params: MdToyParams | None = None) -> Trajectory:
    params = params or MdToyParams()
    rng = make_rng(params.seed)
    species = params.species_array()
    x0 = params.equilibrium_array()

    directions = rng.normal(size=(params.n_atoms, 3))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    offsets = params.basin_amplitude * directions

    frames = []
    for t in range(params.n_frames):
        stretch = 1.0 + params.breathing * rng.uniform(-1.0, 1.0)
        jitter = rng.normal(scale=params.noise, size=(params.n_atoms, 3))
        positions = x0 + basin_sign(t, params.basin_period) * stretch * offsets + jitter
        energy, forces = harmonic_energy_forces(positions, x0, params.k)
        frames.append(MolecularFrame(time_index=t, species=species, positions=positions, energy=energy, forces=forces))
    return Trajectory(frames=tuple(frames), molecule_name="toy")
