"""Advected, decaying Gaussian rain cells with an analytic mass and centre path."""

import math

import numpy as np
from pydantic import BaseModel, Field

from core import InvariantError, PrecipEvent
from sampling import derive_seed, make_rng

# Blobs must keep this many widths clear of the border so the sampled mass matches 2*pi*sigma^2*peak.
BOUNDS_MARGIN = 7.0


class Blob(BaseModel):
    row: float
    col: float
    sigma: float = Field(default=2.0, ge=1.5, description="Width in pixels")
    peak: float = Field(default=40.0, gt=0, description="Peak intensity in mm/h")

    @property
    def mass(self) -> float:
        return 2.0 * math.pi * self.sigma**2 * self.peak


class PrecipToyParams(BaseModel):
    height: int = Field(default=64, ge=8)
    width: int = Field(default=64, ge=8)
    input_len: int = Field(default=9, ge=1)
    output_len: int = Field(default=20, ge=1)
    blobs: list[Blob] = Field(default_factory=lambda: [Blob(row=28.0, col=22.0)], min_length=1)
    velocity: tuple[float, float] = Field(default=(0.5, 0.25), description="(columns, rows) per frame")
    decay: float = Field(default=1.0, gt=0, le=1, description="Multiplicative intensity factor per frame")
    event_id: int = Field(default=0, ge=0)
    seed: int = Field(default=0, ge=0, description="Base seed for per-event variation in datasets")

    @property
    def n_frames(self) -> int:
        return self.input_len + self.output_len


def _check_bounds(params: PrecipToyParams) -> None:
    vx, vy = params.velocity
    last = params.n_frames - 1
    for index, blob in enumerate(params.blobs):
        margin = BOUNDS_MARGIN * blob.sigma
        rows = (blob.row, blob.row + vy * last)
        cols = (blob.col, blob.col + vx * last)
        if min(rows) < margin or max(rows) > params.height - 1 - margin:
            raise InvariantError(f"blob {index} leaves the {params.height}-row grid within {params.n_frames} frames")
        if min(cols) < margin or max(cols) > params.width - 1 - margin:
            raise InvariantError(f"blob {index} leaves the {params.width}-column grid within {params.n_frames} frames")


def gen_precip_toy(params: PrecipToyParams | None = None) -> PrecipEvent:
    """Blobs move by `velocity` per frame while every intensity is scaled by `decay` per frame.

    The metadata carries the analytic centre-of-mass path (x = column, y = row)
    and total mass for every frame of the event.
    """
    params = params or PrecipToyParams()
    _check_bounds(params)
    vx, vy = params.velocity
    rows, cols = np.mgrid[0 : params.height, 0 : params.width].astype(np.float64)
    frames = np.zeros((params.n_frames, params.height, params.width))
    com_path, mass_path = [], []
    total_mass = math.fsum(blob.mass for blob in params.blobs)
    for t in range(params.n_frames):
        scale = params.decay**t
        for blob in params.blobs:
            r, c = blob.row + vy * t, blob.col + vx * t
            frames[t] += scale * blob.peak * np.exp(-((rows - r) ** 2 + (cols - c) ** 2) / (2.0 * blob.sigma**2))
        x = math.fsum(blob.mass * (blob.col + vx * t) for blob in params.blobs) / total_mass
        y = math.fsum(blob.mass * (blob.row + vy * t) for blob in params.blobs) / total_mass
        com_path.append([x, y])
        mass_path.append(total_mass * scale)
    return PrecipEvent(
        event_id=params.event_id,
        frames=frames,
        input_len=params.input_len,
        output_len=params.output_len,
        metadata={
            "com_path": com_path,
            "mass": mass_path,
            "velocity": [vx, vy],
            "decay": params.decay,
        },
    )


def gen_precip_dataset(n_events: int, params: PrecipToyParams | None = None) -> list[PrecipEvent]:
    """Events that vary peak intensity by up to 2x and start position by up to 2 px either way."""
    if n_events < 1:
        raise InvariantError(f"need at least one event, got {n_events}")
    params = params or PrecipToyParams()
    events = []
    for index in range(n_events):
        rng = make_rng(derive_seed(params.seed, index))
        blobs = [
            blob.model_copy(
                update={
                    "row": blob.row + rng.uniform(-2.0, 2.0),
                    "col": blob.col + rng.uniform(-2.0, 2.0),
                    "peak": blob.peak * rng.uniform(0.5, 2.0),
                }
            )
            for blob in params.blobs
        ]
        events.append(gen_precip_toy(params.model_copy(update={"blobs": blobs, "event_id": index})))
    return events
