"""JSON encodings of samples and predictions shared by prediction files and the predictor wire protocol."""

from typing import Any

import numpy as np

from .errors import DataFormatError
from .models import (
    ClassScores,
    EnergyForces,
    JetEvent,
    MolecularFrame,
    OutputFrames,
    Prediction,
    PrecipEvent,
    Workload,
)

Sample = MolecularFrame | JetEvent | PrecipEvent


def sample_id(sample: Sample) -> int:
    return sample.time_index if isinstance(sample, MolecularFrame) else sample.event_id


def encode_input(sample: Sample) -> dict[str, Any]:
    """The part of a sample a predictor may see."""
    if isinstance(sample, MolecularFrame):
        return {"species": sample.species.tolist(), "positions": sample.positions.tolist()}
    if isinstance(sample, JetEvent):
        return {"particles": sample.particles.tolist()}
    return {"frames": sample.inputs.tolist(), "output_len": sample.output_len}


def encode_target(sample: Sample) -> dict[str, Any]:
    if isinstance(sample, MolecularFrame):
        if not sample.is_labeled:
            raise DataFormatError(f"frame {sample.time_index} has no energy/force labels")
        return {"energy": sample.energy, "forces": sample.forces.tolist()}
    if isinstance(sample, JetEvent):
        return {"label": sample.label}
    return {"frames": sample.targets.tolist()}


def decode_training_sample(workload: Workload, sample_id: int, payload: dict[str, Any]) -> Sample:
    """Rebuild a labeled sample from its encoded input and target."""
    inputs, target = payload["input"], payload.get("target", {})
    try:
        if workload == "md":
            return MolecularFrame(
                time_index=sample_id,
                species=inputs["species"],
                positions=inputs["positions"],
                energy=target.get("energy"),
                forces=target.get("forces"),
            )
        if workload == "jet":
            return JetEvent(event_id=sample_id, particles=inputs["particles"], label=target.get("label", 0))
        past = np.asarray(inputs["frames"], dtype=np.float64)
        future = np.asarray(target["frames"], dtype=np.float64) if "frames" in target else None
        if future is None:
            future = np.zeros((inputs["output_len"], *past.shape[1:]))
        return PrecipEvent(
            event_id=sample_id,
            frames=np.concatenate([past, future]),
            input_len=len(past),
            output_len=len(future),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed {workload} sample {sample_id}: {e}") from e


def encode_prediction(prediction: Prediction) -> dict[str, Any]:
    if isinstance(prediction, EnergyForces):
        return {"energy": prediction.energy, "forces": prediction.forces.tolist()}
    if isinstance(prediction, ClassScores):
        return {"scores": prediction.scores.tolist()}
    return {"frames": prediction.frames.tolist()}


def decode_prediction(workload: Workload, payload: dict[str, Any]) -> Prediction:
    try:
        if workload == "md":
            return EnergyForces(energy=payload["energy"], forces=payload["forces"])
        if workload == "jet":
            return ClassScores(scores=payload["scores"])
        return OutputFrames(frames=payload["frames"])
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"malformed {workload} prediction: {e}") from e
