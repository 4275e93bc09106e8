"""Declarative sweep plans and their validation."""

import hashlib
import json
import shlex
from pathlib import Path, PurePosixPath
from typing import Annotated, Any, Literal

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from core import PlanValidationError, Workload
from synth import TOY_PREDICTORS, ToyKind

PLAN_SCHEMA_VERSION = 1


class DatasetRefs(BaseModel):
    test: str = Field(..., description="Test dataset path, relative to the plan file")
    train: str | None = Field(default=None, description="Training dataset; the test dataset is split when omitted")


class SubsetSizesAxis(BaseModel):
    type: Literal["subset_sizes"] = "subset_sizes"
    sizes: list[int | float] = Field(..., min_length=1, description="Counts (int) or fractions (float) of the pool")
    pool_window: tuple[float, float] | None = Field(default=None, description="(start, size) of the training pool")
    test_window: tuple[float, float] | None = Field(default=None, description="(start, size) of the test window")


class WindowGridAxis(BaseModel):
    type: Literal["window_grid"] = "window_grid"
    sizes: list[float] = Field(..., min_length=1)
    starts: list[float] = Field(..., min_length=1)
    max_end: float = Field(default=0.9, gt=0, le=1)
    sample_count: int | None = Field(default=None, ge=1, description="Random draw per window when set")
    test_window: tuple[float, float] | None = None


class RotationAxis(BaseModel):
    type: Literal["rotation"] = "rotation"
    step_deg: float = Field(default=5.0, gt=0)
    count: int = Field(default=36, ge=1)


class BinRangesAxis(BaseModel):
    type: Literal["bin_ranges"] = "bin_ranges"
    feature: Literal["jet_energy"] = "jet_energy"
    lo: float
    hi: float
    n_bins: int = Field(..., ge=1)
    train_selections: list[list[int]] = Field(..., min_length=1)
    train_total: int = Field(..., ge=1)
    test_bins: list[int] | None = Field(default=None, description="Defaults to every bin")

    @model_validator(mode="after")
    def validate_bins(self):
        if not self.lo < self.hi:
            raise ValueError(f"lo ({self.lo}) must be below hi ({self.hi})")
        indices = [i for selection in self.train_selections for i in selection] + (self.test_bins or [])
        for index in indices:
            if not 0 <= index < self.n_bins:
                raise ValueError(f"bin {index} outside [0, {self.n_bins})")
        if any(not selection for selection in self.train_selections):
            raise ValueError("every train selection needs at least one bin")
        return self


class RepetitionsAxis(BaseModel):
    type: Literal["repetitions"] = "repetitions"
    runs: int = Field(default=100, ge=2)
    events: int = Field(default=10, ge=1)
    lead_times: list[int] | None = None


SweepAxis = Annotated[
    SubsetSizesAxis | WindowGridAxis | RotationAxis | BinRangesAxis | RepetitionsAxis,
    Field(discriminator="type"),
]

AXIS_WORKLOADS: dict[str, tuple[str, ...]] = {
    "subset_sizes": ("md", "jet", "precip"),
    "window_grid": ("md",),
    "rotation": ("jet",),
    "bin_ranges": ("jet",),
    "repetitions": ("precip",),
}


class TransformSpec(BaseModel):
    name: Literal["project_jet_features", "rotate"]
    theta_deg: float | None = None

    @model_validator(mode="after")
    def validate_angle(self):
        if self.name == "rotate" and self.theta_deg is None:
            raise ValueError("rotate needs theta_deg")
        return self


class ToyPredictorSpec(BaseModel):
    type: Literal["toy"] = "toy"
    kind: ToyKind
    options: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = Field(default=None, ge=0, description="Adds seeded perturbation when set")

    @model_validator(mode="after")
    def validate_options(self):
        try:
            TOY_PREDICTORS[self.kind].Options.model_validate(self.options)
        except ValidationError as e:
            raise ValueError(f"invalid options for toy predictor '{self.kind}': {e}") from e
        return self

    @property
    def identity(self) -> str:
        return f"toy:{self.kind}"


class ExternalPredictorSpec(BaseModel):
    type: Literal["external"] = "external"
    command: list[str] = Field(..., min_length=1, description="Command line that starts the predictor")
    options: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = Field(default=None, ge=0)
    env: dict[str, str] | None = Field(default=None, description="Extra environment variables")
    cwd: str | None = None
    timeout_s: float | None = Field(default=None, gt=0, description="Per-response timeout; CLI default when unset")

    @field_validator("command", mode="before")
    @classmethod
    def split_command(cls, v):
        return shlex.split(v) if isinstance(v, str) else v

    @property
    def identity(self) -> str:
        return f"external:{shlex.join(self.command)}"


class FilePredictorSpec(BaseModel):
    type: Literal["file"] = "file"
    path: str

    @property
    def identity(self) -> str:
        return f"file:{self.path}"


PredictorSpec = ToyPredictorSpec | ExternalPredictorSpec | FilePredictorSpec


def parse_predictor_spec(value: Any) -> PredictorSpec:
    """Accept either a typed spec or the {toy: kind} / {external: command} / {file: path} shorthand."""
    if isinstance(value, ToyPredictorSpec | ExternalPredictorSpec | FilePredictorSpec):
        return value
    if not isinstance(value, dict):
        raise ValueError("predictor must be an object")
    config = dict(value)
    for shorthand, field in (("toy", "kind"), ("external", "command"), ("file", "path")):
        if shorthand in config:
            config["type"] = shorthand
            config[field] = config.pop(shorthand)
    predictor_type = config.get("type", "toy")
    if predictor_type == "external":
        return ExternalPredictorSpec(**config)
    if predictor_type == "file":
        return FilePredictorSpec(**config)
    return ToyPredictorSpec(**config)


class MetricSpec(BaseModel):
    name: str
    params: dict[str, Any] = Field(default_factory=dict)


class SweepPlan(BaseModel):
    schema_version: int = PLAN_SCHEMA_VERSION
    plan_id: str = Field(..., min_length=1)
    workload: Workload
    datasets: DatasetRefs
    axis: SweepAxis
    transforms: list[TransformSpec] = Field(default_factory=list)
    predictor: PredictorSpec
    metrics: list[MetricSpec] = Field(..., min_length=1)
    output_dir: str | None = Field(default=None, description="Subdirectory of the output root; plan_id when unset")
    seed: int = Field(default=0, ge=0)

    @field_validator("schema_version")
    @classmethod
    def validate_schema_version(cls, v):
        if v != PLAN_SCHEMA_VERSION:
            raise ValueError(f"unsupported plan schema_version {v}")
        return v

    @field_validator("output_dir")
    @classmethod
    def validate_output_dir(cls, v):
        if v is not None:
            path = PurePosixPath(v)
            if path.is_absolute() or ".." in path.parts:
                raise ValueError("output_dir must be a relative path inside the output root")
        return v

    @model_validator(mode="before")
    @classmethod
    def validate_predictor(cls, values):
        """Custom validation to handle predictor type discrimination."""
        if isinstance(values, dict) and "predictor" in values:
            values = dict(values)
            values["predictor"] = parse_predictor_spec(values["predictor"])
        return values

    @model_validator(mode="after")
    def validate_combination(self):
        from .evaluators import STABILITY_METRICS, known_metrics

        if self.workload not in AXIS_WORKLOADS[self.axis.type]:
            raise ValueError(f"axis '{self.axis.type}' does not apply to the {self.workload} workload")
        unknown = [m.name for m in self.metrics if m.name not in known_metrics(self.workload)]
        if unknown:
            raise ValueError(f"unknown metrics for {self.workload}: {unknown}")
        if self.transforms and self.workload != "jet":
            raise ValueError("transforms apply to the jet workload only")
        if isinstance(self.axis, RepetitionsAxis):
            if isinstance(self.predictor, FilePredictorSpec):
                raise ValueError("repetitions need a predictor that can be re-run with new seeds")
            unsupported = [m.name for m in self.metrics if m.name not in STABILITY_METRICS]
            if unsupported:
                raise ValueError(f"repetitions support the metrics {sorted(STABILITY_METRICS)}, got {unsupported}")
        needs_train = self.axis.type in ("subset_sizes", "rotation", "bin_ranges") and self.workload != "md"
        if needs_train and self.datasets.train is None:
            raise ValueError(f"axis '{self.axis.type}' on the {self.workload} workload needs a train dataset")
        return self

    @property
    def sweep_dir_name(self) -> str:
        return self.output_dir or self.plan_id


def plan_hash(raw: bytes) -> str:
    return hashlib.sha256(raw).hexdigest()


def resolve_dataset(base_dir: Path, ref: str) -> Path:
    path = Path(ref)
    return path if path.is_absolute() else base_dir / path


def load_plan(path: str | Path) -> tuple[SweepPlan, str]:
    """Parse and validate a plan file; returns the plan and the sha256 of its bytes."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except FileNotFoundError as e:
        raise PlanValidationError(f"plan not found: {path}") from e
    try:
        plan = SweepPlan.model_validate(json.loads(raw))
    except json.JSONDecodeError as e:
        raise PlanValidationError(f"{path}: invalid JSON: {e.msg}") from e
    except ValidationError as e:
        raise PlanValidationError(f"{path}: {e}") from e
    except ValueError as e:
        raise PlanValidationError(f"{path}: {e}") from e

    base_dir = path.parent
    refs = [plan.datasets.test] + ([plan.datasets.train] if plan.datasets.train else [])
    if isinstance(plan.predictor, FilePredictorSpec):
        refs.append(plan.predictor.path)
    for ref in refs:
        if not resolve_dataset(base_dir, ref).exists():
            raise PlanValidationError(f"{path}: cannot resolve '{ref}'")
    return plan, plan_hash(raw)
