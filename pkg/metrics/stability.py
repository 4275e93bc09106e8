"""Run-to-run spread of a stochastic nowcaster on fixed events."""

import logging
from collections.abc import Callable, Sequence
from typing import Literal

import numpy as np
from pydantic import BaseModel, model_validator

from core import Histogram, MetricInputError, PrecipEvent, PredictorError
from sampling import derive_seed

from .precip import center_of_mass_displacement, raw_mae
from .stats import histogram

logger = logging.getLogger(__name__)

STABILITY_BINS = 16
TUKEY_FENCE = 1.5

StabilityMetric = Literal["mae", "delta_r"]
StochasticPredictor = Callable[[PrecipEvent, int], np.ndarray]


class StabilityEntry(BaseModel):
    event_id: int
    lead: int
    samples: list[float]
    histogram: Histogram
    outliers: list[int]

    @model_validator(mode="after")
    def validate_counts(self):
        if self.histogram.total != len(self.samples):
            raise ValueError(f"event {self.event_id} lead {self.lead}: histogram does not cover every run")
        return self


class StabilityResult(BaseModel):
    metric: StabilityMetric
    runs: int
    entries: list[StabilityEntry]

    def spread(self) -> float:
        """Mean standard deviation over runs, across all events and leads."""
        if not self.entries:
            return 0.0
        return float(np.mean([np.std(entry.samples) for entry in self.entries]))


def tukey_outliers(samples: Sequence[float], fence: float = TUKEY_FENCE) -> list[int]:
    data = np.asarray(samples, dtype=np.float64)
    q1, q3 = np.percentile(data, [25, 75])
    iqr = q3 - q1
    outside = (data < q1 - fence * iqr) | (data > q3 + fence * iqr)
    return np.flatnonzero(outside).tolist()


def _score(metric: StabilityMetric, truth: np.ndarray, prediction: np.ndarray) -> float:
    if metric == "mae":
        return raw_mae(truth, prediction)
    return center_of_mass_displacement(truth, prediction).delta_r


def stability_analysis(
    predictor: StochasticPredictor,
    events: Sequence[PrecipEvent],
    runs: int = 100,
    metric: StabilityMetric = "mae",
    lead_times: Sequence[int] | None = None,
    seed: int = 0,
) -> StabilityResult:
    """Run every event `runs` times with per-run seeds and summarize each (event, lead) distribution."""
    if runs < 2:
        raise MetricInputError(f"stability analysis needs at least 2 runs, got {runs}")
    if metric not in ("mae", "delta_r"):
        raise MetricInputError(f"unknown stability metric '{metric}'")
    entries = []
    for event in sorted(events, key=lambda e: e.event_id):
        leads = list(range(event.output_len)) if lead_times is None else list(lead_times)
        for lead in leads:
            if not 0 <= lead < event.output_len:
                raise MetricInputError(f"lead {lead} outside [0, {event.output_len}) for event {event.event_id}")
        samples: dict[int, list[float]] = {lead: [] for lead in leads}
        for run in range(runs):
            try:
                frames = np.asarray(predictor(event, derive_seed(seed, run)), dtype=np.float64)
            except Exception as e:
                raise PredictorError(f"predictor failed on event {event.event_id}: {e}", run_id=str(run)) from e
            if frames.shape != (event.output_len, *event.shape):
                raise PredictorError(
                    f"predictor returned shape {frames.shape} for event {event.event_id}", run_id=str(run)
                )
            for lead in leads:
                samples[lead].append(_score(metric, event.targets[lead], frames[lead]))
        for lead in leads:
            values = samples[lead]
            entries.append(
                StabilityEntry(
                    event_id=event.event_id,
                    lead=lead,
                    samples=values,
                    histogram=histogram(values, STABILITY_BINS, label=f"event {event.event_id} lead {lead}"),
                    outliers=tukey_outliers(values),
                )
            )
        logger.debug(f"Stability runs finished for event {event.event_id}")
    return StabilityResult(metric=metric, runs=runs, entries=entries)
