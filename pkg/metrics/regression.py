"""Energy and force error metrics for force-field predictions, with per-frame detail."""

import math
from collections.abc import Callable, Iterable, Mapping

import numpy as np
from pydantic import BaseModel

from core import Aggregates, EnergyForces, MetricInputError, MetricReport, MolecularFrame, PredictionSet


class ScatterPoint(BaseModel):
    sample_id: int
    energy_error: float
    force_error: float


def _labeled_pairs(frames: Iterable[MolecularFrame], preds: PredictionSet) -> list[tuple[MolecularFrame, EnergyForces]]:
    pairs = []
    for frame in sorted(frames, key=lambda fr: fr.time_index):
        if not frame.is_labeled:
            raise MetricInputError(f"frame {frame.time_index} has no energy/force labels")
        prediction = preds.entries.get(frame.time_index)
        if not isinstance(prediction, EnergyForces):
            raise MetricInputError(f"no energy/force prediction for frame {frame.time_index}")
        if prediction.forces.shape != frame.forces.shape:
            raise MetricInputError(
                f"frame {frame.time_index}: predicted forces {prediction.forces.shape} "
                f"vs labels {frame.forces.shape}"
            )
        pairs.append((frame, prediction))
    return pairs


def force_mae(frames: Iterable[MolecularFrame], preds: PredictionSet, group_by_species: bool = True) -> MetricReport:
    """Per-atom force MAE, averaged over atoms and the three components."""
    pairs = _labeled_pairs(frames, preds)
    if not pairs:
        raise MetricInputError("force MAE needs at least one frame")
    per_frame = {}
    all_errors = []
    per_species: dict[int, list[float]] = {}
    for frame, prediction in pairs:
        atom_errors = np.abs(prediction.forces - frame.forces).mean(axis=1)
        per_frame[frame.time_index] = math.fsum(atom_errors) / len(atom_errors)
        all_errors.extend(atom_errors.tolist())
        if group_by_species:
            for z, err in zip(frame.species.tolist(), atom_errors.tolist(), strict=True):
                per_species.setdefault(z, []).append(err)
    groups = {}
    for z in sorted(per_species):
        errors = per_species[z]
        groups[f"Z={z}"] = Aggregates.of(dict(enumerate(errors)))
    return MetricReport.build(
        "force_mae",
        per_frame,
        params={"group_by_species": group_by_species},
        values={"overall": math.fsum(all_errors) / len(all_errors)},
        groups=groups,
    )


def energy_error_series(frames: Iterable[MolecularFrame], preds: PredictionSet, per_atom: bool = False) -> MetricReport:
    """Signed energy error per frame in time order; `mae` summarizes the magnitudes."""
    pairs = _labeled_pairs(frames, preds)
    if not pairs:
        raise MetricInputError("energy error series needs at least one frame")
    errors = {}
    for frame, prediction in pairs:
        error = prediction.energy - frame.energy
        errors[frame.time_index] = error / frame.n_atoms if per_atom else error
    magnitudes = [abs(errors[k]) for k in sorted(errors)]
    return MetricReport.build(
        "energy_error",
        errors,
        params={"per_atom": per_atom},
        values={"mae": math.fsum(magnitudes) / len(magnitudes)},
    )


def error_scatter(frames: Iterable[MolecularFrame], preds: PredictionSet) -> list[ScatterPoint]:
    return [
        ScatterPoint(
            sample_id=frame.time_index,
            energy_error=abs(prediction.energy - frame.energy),
            force_error=float(np.abs(prediction.forces - frame.forces).mean()),
        )
        for frame, prediction in _labeled_pairs(frames, preds)
    ]


def scatter_reports(points: list[ScatterPoint]) -> list[MetricReport]:
    """Split energy/force scatter pairs into two joinable per-frame reports."""
    return [
        MetricReport.build("energy_abs_error", {p.sample_id: p.energy_error for p in points}),
        MetricReport.build("force_abs_error", {p.sample_id: p.force_error for p in points}),
    ]


def flag_anomalous_frames(series: MetricReport | Mapping[int, float | None], n_sigma: float = 3.0) -> list[int]:
    """Ids whose value lies more than n_sigma standard deviations from the remainder.

    Starts from a median/MAD estimate and iterates on the unflagged remainder
    until the flagged set stops changing.
    """
    if isinstance(series, MetricReport):
        values = series.defined()
    else:
        values = {k: v for k, v in series.items() if v is not None}
    if len(values) < 3:
        return []
    ids = np.array(sorted(values))
    data = np.array([values[i] for i in ids])
    median = np.median(data)
    spread = 1.4826 * np.median(np.abs(data - median))
    flagged = np.abs(data - median) > n_sigma * spread if spread > 0 else data != median
    for _ in range(100):
        remainder = data[~flagged]
        if len(remainder) < 2:
            break
        mean, std = remainder.mean(), remainder.std()
        updated = np.abs(data - mean) > n_sigma * std if std > 0 else data != mean
        if np.array_equal(updated, flagged):
            break
        flagged = updated
    return ids[flagged].tolist()


def contiguous_ranges(flagged: Iterable[int], order: Iterable[int]) -> list[tuple[int, int]]:
    """Group flagged ids into (first, last) runs that are consecutive within `order`."""
    position = {sample_id: rank for rank, sample_id in enumerate(sorted(order))}
    ranges: list[tuple[int, int]] = []
    previous_rank = None
    for sample_id in sorted(flagged, key=position.__getitem__):
        rank = position[sample_id]
        if ranges and previous_rank is not None and rank == previous_rank + 1:
            ranges[-1] = (ranges[-1][0], sample_id)
        else:
            ranges.append((sample_id, sample_id))
        previous_rank = rank
    return ranges


def equivariance_error(
    frame: MolecularFrame, predict_fn: Callable[[MolecularFrame], EnergyForces], rotation: np.ndarray
) -> float:
    """Mean componentwise |F(R x) - R F(x)|; zero for a rotation-equivariant force predictor."""
    rotation = np.asarray(rotation, dtype=np.float64)
    if rotation.shape != (3, 3) or not np.allclose(rotation @ rotation.T, np.eye(3), atol=1e-9):
        raise MetricInputError("rotation must be an orthogonal 3×3 matrix")
    rotated = MolecularFrame(time_index=frame.time_index, species=frame.species, positions=frame.positions @ rotation.T)
    reference = predict_fn(frame).forces @ rotation.T
    return float(np.abs(predict_fn(rotated).forces - reference).mean())
