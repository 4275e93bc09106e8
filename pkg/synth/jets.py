"""Two-class toy jets built from massless constituents around a random jet axis."""

import math

import numpy as np
from pydantic import BaseModel, Field, model_validator

from core import InvariantError, JetDataset, JetEvent
from sampling import make_rng


class JetClassParams(BaseModel):
    energy_lo: float = Field(default=100.0, gt=0, description="Lower bound of the total jet energy")
    energy_hi: float = Field(default=500.0, gt=0)
    angular_spread: float = Field(default=0.08, gt=0, description="Std of constituent angles around the axis (rad)")
    min_particles: int = Field(default=5, ge=1)
    max_particles: int = Field(default=20, ge=1)

    @model_validator(mode="after")
    def validate_ranges(self):
        if self.energy_hi < self.energy_lo:
            raise ValueError("energy_hi must not be below energy_lo")
        if self.max_particles < self.min_particles:
            raise ValueError("max_particles must not be below min_particles")
        return self


class JetToyParams(BaseModel):
    signal: JetClassParams = Field(default_factory=lambda: JetClassParams(angular_spread=0.04))
    background: JetClassParams = Field(default_factory=lambda: JetClassParams(angular_spread=0.12))
    axis_phi_range: float = Field(
        default=math.pi, gt=0, le=math.pi, description="Jet axes are drawn with azimuth in [-range, range]"
    )
    axis_lat_range: float = Field(default=0.5, ge=0, lt=math.pi / 2)


def _constituents(rng: np.random.Generator, cls: JetClassParams, params: JetToyParams) -> np.ndarray:
    total = rng.uniform(cls.energy_lo, cls.energy_hi)
    n = int(rng.integers(cls.min_particles, cls.max_particles + 1))
    energies = total * rng.dirichlet(np.ones(n))
    axis_phi = rng.uniform(-params.axis_phi_range, params.axis_phi_range)
    axis_lat = rng.uniform(-params.axis_lat_range, params.axis_lat_range)
    phi = axis_phi + rng.normal(scale=cls.angular_spread, size=n)
    lat = axis_lat + rng.normal(scale=cls.angular_spread, size=n)
    directions = np.stack([np.cos(lat) * np.cos(phi), np.cos(lat) * np.sin(phi), np.sin(lat)], axis=1)
    return np.column_stack([energies, energies[:, None] * directions])


def gen_jet_toy(n_events: int, seed: int = 0, params: JetToyParams | None = None) -> JetDataset:
    """Alternating signal/background events; even event ids are background."""
    if n_events < 2:
        raise InvariantError(f"need at least 2 events for both classes, got {n_events}")
    params = params or JetToyParams()
    rng = make_rng(seed)
    events = []
    for event_id in range(n_events):
        label = event_id % 2
        cls = params.signal if label == 1 else params.background
        events.append(JetEvent(event_id=event_id, particles=_constituents(rng, cls, params), label=label))
    return JetDataset(events=tuple(events), name="toy_jets")
