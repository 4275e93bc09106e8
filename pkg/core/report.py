"""Metric-space output models and their canonical JSON form."""

import json
import math
from collections.abc import Mapping
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

REPORT_SCHEMA_VERSION = 1
AGGREGATE_TOLERANCE = 1e-12


def canonical_dumps(data: Any) -> str:
    """Serialize JSON-compatible data so that equal content always yields equal bytes."""
    return json.dumps(data, sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


class Aggregates(BaseModel):
    count: int
    mean: float
    median: float
    min: float
    max: float

    @classmethod
    def of(cls, values: Mapping[int, float | None]) -> "Aggregates | None":
        """Aggregate the defined values, reduced in id order."""
        ordered = [values[k] for k in sorted(values) if values[k] is not None]
        if not ordered:
            return None
        return cls(
            count=len(ordered),
            mean=math.fsum(ordered) / len(ordered),
            median=float(np.median(ordered)),
            min=min(ordered),
            max=max(ordered),
        )

    def close_to(self, other: "Aggregates") -> bool:
        if self.count != other.count:
            return False
        pairs = [(self.mean, other.mean), (self.median, other.median), (self.min, other.min), (self.max, other.max)]
        return all(abs(a - b) <= AGGREGATE_TOLERANCE * max(1.0, abs(b)) for a, b in pairs)


class Histogram(BaseModel):
    label: str = ""
    lo: float
    hi: float
    edges: list[float]
    counts: list[int]
    dropped: int = 0

    @model_validator(mode="after")
    def validate_shape(self):
        if len(self.edges) != len(self.counts) + 1:
            raise ValueError("histogram needs exactly one more edge than counts")
        if any(c < 0 for c in self.counts):
            raise ValueError("histogram counts must be non-negative")
        return self

    @property
    def total(self) -> int:
        return sum(self.counts)


class CuCsiGrid(BaseModel):
    threshold: float = Field(..., description="CSI threshold T in mm/h")
    n_bins: int = Field(..., ge=1)
    step: float = Field(..., gt=0)
    counts: list[list[int]] = Field(..., description="lead frame × CSI bin")
    considered: int = Field(..., ge=0)
    event_ids: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_rows(self):
        for lead, row in enumerate(self.counts):
            if len(row) != self.n_bins:
                raise ValueError(f"lead {lead}: expected {self.n_bins} bins, got {len(row)}")
            if any(c < 0 for c in row):
                raise ValueError(f"lead {lead}: negative count")
            if sum(row) != self.considered:
                raise ValueError(f"lead {lead}: row sums to {sum(row)}, expected {self.considered}")
        return self


class MetricReport(BaseModel):
    metric_name: str
    params: dict[str, Any] = Field(default_factory=dict)
    scope: dict[str, Any] | None = None
    per_sample: dict[int, float | None] = Field(default_factory=dict)
    aggregates: Aggregates | None = None
    values: dict[str, float | None] = Field(default_factory=dict)
    groups: dict[str, Aggregates] = Field(default_factory=dict)
    histograms: list[Histogram] | None = None
    grid: CuCsiGrid | None = None
    schema_version: int = REPORT_SCHEMA_VERSION

    @field_validator("per_sample")
    @classmethod
    def validate_per_sample(cls, v):
        for sample_id, value in v.items():
            if value is not None and not math.isfinite(value):
                raise ValueError(f"sample {sample_id}: value must be finite or null")
        return v

    @model_validator(mode="after")
    def validate_aggregates(self):
        if self.aggregates is None:
            return self
        expected = Aggregates.of(self.per_sample)
        if expected is None:
            raise ValueError("aggregates present but per_sample has no defined values")
        if not self.aggregates.close_to(expected):
            raise ValueError("aggregates are inconsistent with per_sample values")
        return self

    @classmethod
    def build(cls, metric_name: str, per_sample: Mapping[int, float | None], **kwargs: Any) -> "MetricReport":
        cleaned = {int(k): (None if v is None else float(v)) for k, v in per_sample.items()}
        return cls(metric_name=metric_name, per_sample=cleaned, aggregates=Aggregates.of(cleaned), **kwargs)

    def defined(self) -> dict[int, float]:
        return {k: v for k, v in sorted(self.per_sample.items()) if v is not None}

    def to_canonical_json(self) -> str:
        return canonical_dumps(self.model_dump(mode="json"))
