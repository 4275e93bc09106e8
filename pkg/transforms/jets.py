"""Jet-frame projection and beam-axis rotation of 4-momenta point clouds."""

import math
from dataclasses import dataclass

import numpy as np

from core import InvariantError, JetDataset, JetEvent


@dataclass(frozen=True, eq=False)
class JetFeatures:
    energies: np.ndarray
    dphi: np.ndarray
    deta: np.ndarray

    def __len__(self) -> int:
        return len(self.energies)


@dataclass(frozen=True)
class RotatedDataset:
    angle_deg: float
    dataset: JetDataset


def wrap_angle(phi: np.ndarray | float) -> np.ndarray:
    """Wrap angles into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(phi, dtype=np.float64), 2 * np.pi)


def _angles(momenta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # eta follows atan(pz / |p|) as written for the detector projection, not atanh
    norm = np.linalg.norm(momenta, axis=-1)
    phi = np.arctan2(momenta[..., 1], momenta[..., 0])
    eta = np.arctan(momenta[..., 2] / norm)
    return phi, eta


def project_jet_features(event: JetEvent) -> JetFeatures:
    momenta = event.momenta
    norms = np.linalg.norm(momenta, axis=1)
    if np.any(norms == 0):
        zero = np.flatnonzero(norms == 0).tolist()
        raise InvariantError(f"event {event.event_id}: zero-momentum particles at indices {zero}")
    axis = momenta.sum(axis=0)
    if np.linalg.norm(axis) == 0:
        raise InvariantError(f"event {event.event_id}: summed momentum is zero, jet axis undefined")
    phi, eta = _angles(momenta)
    phi_jet, eta_jet = _angles(axis)
    return JetFeatures(
        energies=event.energies.copy(),
        dphi=wrap_angle(phi - phi_jet),
        deta=eta - eta_jet,
    )


def rotate_event(event: JetEvent, theta: float) -> JetEvent:
    """Rotate every particle about the beam (z) axis; E and pz are untouched."""
    if not math.isfinite(theta):
        raise InvariantError(f"rotation angle must be finite, got {theta}")
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    particles = np.array(event.particles, dtype=np.float64)
    px, py = event.particles[:, 1], event.particles[:, 2]
    particles[:, 1] = px * cos_t - py * sin_t
    particles[:, 2] = px * sin_t + py * cos_t
    return JetEvent(event_id=event.event_id, particles=particles, label=event.label, jet_energy=event.jet_energy)


def rotate_dataset(dataset: JetDataset, theta: float, name: str | None = None) -> JetDataset:
    return JetDataset(events=tuple(rotate_event(e, theta) for e in dataset), name=name or dataset.name)


def rotation_sweep(dataset: JetDataset, step_deg: float = 5.0, count: int = 36) -> list[RotatedDataset]:
    if count < 1:
        raise InvariantError(f"rotation count must be positive, got {count}")
    if step_deg * count > 360.0:
        raise InvariantError(f"sweep of {count} × {step_deg}° exceeds a full turn")
    sweep = []
    for k in range(count):
        angle = k * step_deg
        if k == 0:
            rotated = dataset
        else:
            rotated = rotate_dataset(dataset, math.radians(angle), name=f"{dataset.name}@{angle:g}deg")
        sweep.append(RotatedDataset(angle_deg=angle, dataset=rotated))
    return sweep
