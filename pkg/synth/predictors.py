"""Simple, analyzable stand-in models for the three workloads.

Each predictor is fit on a training slice and predicts one sample at a time.
Predictions are deterministic; passing a seed adds Gaussian perturbation drawn
from a per-sample stream, so results do not depend on evaluation order.
"""

import logging
from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from core import (
    ClassScores,
    EnergyForces,
    JetEvent,
    MolecularFrame,
    OutputFrames,
    Prediction,
    PrecipEvent,
    PredictionSet,
    PredictorError,
    Sample,
    Workload,
    sample_id,
)
from metrics import center_of_mass, shift_frame
from sampling import derive_seed, make_rng
from transforms import DescriptorCache, DescriptorParams, PairDistanceDescriptor, project_jet_features

logger = logging.getLogger(__name__)

ToyKind = Literal["knn_forces", "linear_tagger", "advection_extrapolator"]


class ToyPredictor(ABC):
    kind: str
    workload: Workload

    def __init__(self, options: dict[str, Any] | None = None):
        self.options = self.Options(**(options or {}))

    class Options(BaseModel):
        model_config = ConfigDict(extra="forbid")

    def fit(self, samples: Sequence[Sample]) -> None:
        """Training is optional; predictors that need it override this."""

    @abstractmethod
    def predict_one(self, sample: Sample, seed: int | None = None) -> Prediction: ...

    def _rng(self, sample: Sample, seed: int | None) -> np.random.Generator | None:
        return None if seed is None else make_rng(derive_seed(seed, sample_id(sample)))


class KnnForces(ToyPredictor):
    """Copies energy and forces of the training frame with the closest structural descriptor."""

    kind = "knn_forces"
    workload = "md"

    class Options(BaseModel):
        model_config = ConfigDict(extra="forbid")
        noise: float = Field(default=0.01, ge=0, description="Force perturbation std in eV/Å when seeded")
        descriptor: DescriptorParams = Field(default_factory=DescriptorParams)

    def __init__(self, options: dict[str, Any] | None = None):
        super().__init__(options)
        self.cache = DescriptorCache(PairDistanceDescriptor(self.options.descriptor))
        self._train: list[MolecularFrame] = []
        self._matrices: dict[tuple[int, ...], np.ndarray] = {}

    def fit(self, samples: Sequence[Sample]) -> None:
        frames = sorted((s for s in samples if isinstance(s, MolecularFrame)), key=lambda f: f.time_index)
        if not frames:
            raise PredictorError("knn_forces needs a non-empty training slice")
        if any(not frame.is_labeled for frame in frames):
            raise PredictorError("knn_forces training frames must carry energy and forces")
        self._train = frames
        self.cache = DescriptorCache(PairDistanceDescriptor(self.options.descriptor))
        self._matrices.clear()

    def predict_one(self, sample: Sample, seed: int | None = None) -> EnergyForces:
        if not self._train:
            raise PredictorError("knn_forces used before fit")
        species = sorted({int(z) for z in (*self._train[0].species, *sample.species)})
        key = tuple(species)
        if key not in self._matrices:
            self._matrices[key] = np.stack([self.cache.get(frame, species) for frame in self._train])
        train = self._matrices[key]
        query = PairDistanceDescriptor(self.options.descriptor)(sample, species)
        nearest = self._train[int(np.argmin(np.linalg.norm(train - query, axis=1)))]
        forces = np.array(nearest.forces)
        rng = self._rng(sample, seed)
        if rng is not None:
            forces = forces + rng.normal(scale=self.options.noise, size=forces.shape)
        return EnergyForces(energy=nearest.energy, forces=forces)


def projected_moments(event: JetEvent) -> np.ndarray:
    """Jet energy and energy-weighted angular widths in the jet frame."""
    features = project_jet_features(event)
    weights = features.energies / features.energies.sum()
    radius = np.sqrt(np.sum(weights * (features.dphi**2 + features.deta**2)))
    return np.array(
        [
            event.jet_energy,
            np.sum(weights * np.abs(features.dphi)),
            np.sum(weights * np.abs(features.deta)),
            radius,
        ]
    )


def raw_moments(event: JetEvent) -> np.ndarray:
    """Jet energy and energy-weighted spreads of the lab-frame direction cosines."""
    weights = event.energies / event.energies.sum()
    directions = event.momenta / np.linalg.norm(event.momenta, axis=1, keepdims=True)
    mean = weights @ directions
    spread = np.sqrt(weights @ (directions - mean) ** 2)
    return np.concatenate([[event.jet_energy], spread])


class LinearTagger(ToyPredictor):
    """Diagonal linear discriminant on standardized jet moments, squashed by a sigmoid."""

    kind = "linear_tagger"
    workload = "jet"

    class Options(BaseModel):
        model_config = ConfigDict(extra="forbid")
        features: Literal["raw", "projected"] = "projected"
        noise: float = Field(default=0.1, ge=0, description="Logit perturbation std when seeded")

    def __init__(self, options: dict[str, Any] | None = None):
        super().__init__(options)
        self._center: np.ndarray | None = None
        self._scale: np.ndarray | None = None
        self._weights: np.ndarray | None = None
        self._bias = 0.0

    def moments(self, event: JetEvent) -> np.ndarray:
        return projected_moments(event) if self.options.features == "projected" else raw_moments(event)

    def fit(self, samples: Sequence[Sample]) -> None:
        events = [s for s in samples if isinstance(s, JetEvent)]
        if not events:
            raise PredictorError("linear_tagger needs a non-empty training slice")
        labels = np.array([event.label for event in events])
        if labels.min() == labels.max():
            raise PredictorError("linear_tagger needs both classes in the training slice")
        x = np.stack([self.moments(event) for event in events])
        self._center = x.mean(axis=0)
        scale = x.std(axis=0)
        self._scale = np.where(scale > 0, scale, 1.0)
        z = (x - self._center) / self._scale
        mean_sig, mean_bkg = z[labels == 1].mean(axis=0), z[labels == 0].mean(axis=0)
        within = 0.5 * (z[labels == 1].var(axis=0) + z[labels == 0].var(axis=0))
        self._weights = (mean_sig - mean_bkg) / np.where(within > 0, within, 1.0)
        self._bias = -float(self._weights @ (mean_sig + mean_bkg)) / 2.0
        logger.debug(f"linear_tagger weights {self._weights.tolist()}")

    def predict_one(self, sample: Sample, seed: int | None = None) -> ClassScores:
        if self._weights is None:
            raise PredictorError("linear_tagger used before fit")
        logit = float(self._weights @ ((self.moments(sample) - self._center) / self._scale)) + self._bias
        rng = self._rng(sample, seed)
        if rng is not None:
            logit += rng.normal(scale=self.options.noise)
        signal = float(expit(logit))
        return ClassScores(scores=[1.0 - signal, signal])


class AdvectionExtrapolator(ToyPredictor):
    """Moves the last input frame along the centre-of-mass velocity of the last two inputs.

    The mass ratio of the same two frames is applied as a per-frame growth or decay.
    """

    kind = "advection_extrapolator"
    workload = "precip"

    class Options(BaseModel):
        model_config = ConfigDict(extra="forbid")
        noise: Literal["additive", "proportional"] = "proportional"
        amplitude: float = Field(default=0.1, ge=0, description="Gaussian noise std when seeded")

    def motion(self, event: PrecipEvent) -> tuple[float, float, float]:
        """(vx, vy, mass ratio) estimated from the last two input frames."""
        if event.input_len < 2:
            return 0.0, 0.0, 1.0
        before, last = event.inputs[-2], event.inputs[-1]
        if before.sum() <= 0 or last.sum() <= 0:
            return 0.0, 0.0, 1.0
        x0, y0 = center_of_mass(before)
        x1, y1 = center_of_mass(last)
        return x1 - x0, y1 - y0, float(last.sum() / before.sum())

    def predict_one(self, sample: Sample, seed: int | None = None) -> OutputFrames:
        vx, vy, ratio = self.motion(sample)
        last = sample.inputs[-1]
        frames = np.stack(
            [ratio ** (k + 1) * shift_frame(last, vx * (k + 1), vy * (k + 1)) for k in range(sample.output_len)]
        )
        rng = self._rng(sample, seed)
        if rng is not None:
            noise = rng.normal(scale=self.options.amplitude, size=frames.shape)
            frames = frames + noise if self.options.noise == "additive" else frames * (1.0 + noise)
        return OutputFrames(frames=np.clip(frames, 0.0, None))


TOY_PREDICTORS: dict[str, type[ToyPredictor]] = {
    cls.kind: cls for cls in (KnnForces, LinearTagger, AdvectionExtrapolator)
}


def make_toy_predictor(kind: str, options: dict[str, Any] | None = None) -> ToyPredictor:
    if kind not in TOY_PREDICTORS:
        raise PredictorError(f"unknown toy predictor '{kind}'; expected one of {sorted(TOY_PREDICTORS)}")
    return TOY_PREDICTORS[kind](options)


def toy_predict(
    kind: ToyKind,
    train: Sequence[Sample],
    test: Sequence[Sample],
    seed: int | None = None,
    options: dict[str, Any] | None = None,
) -> PredictionSet:
    predictor = make_toy_predictor(kind, options)
    predictor.fit(train)
    entries = {sample_id(sample): predictor.predict_one(sample, seed) for sample in test}
    return PredictionSet(model_id=f"toy:{kind}", run_id="in-process", seed=seed, entries=entries)
