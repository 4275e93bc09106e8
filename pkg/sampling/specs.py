from typing import Annotated, Literal

from pydantic import BaseModel, Field, model_validator

# Guards floor() against representation error, e.g. (0.6 + 0.3) * 100 == 89.99999999999999.
FRACTION_EPSILON = 1e-9


class TimeWindow(BaseModel):
    variant: Literal["time_window"] = "time_window"
    start_frac: float = Field(..., ge=0.0, le=1.0)
    size_frac: float = Field(..., gt=0.0, le=1.0)

    @model_validator(mode="after")
    def validate_extent(self):
        if self.start_frac + self.size_frac > 1.0 + FRACTION_EPSILON:
            raise ValueError(f"window [{self.start_frac}, {self.start_frac + self.size_frac}) extends past 1.0")
        return self

    @property
    def end_frac(self) -> float:
        return self.start_frac + self.size_frac


class RandomSubset(BaseModel):
    variant: Literal["random_subset"] = "random_subset"
    count: int | None = Field(default=None, ge=1)
    fraction: float | None = Field(default=None, gt=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_size(self):
        if (self.count is None) == (self.fraction is None):
            raise ValueError("exactly one of count or fraction must be given")
        return self


class FeatureBins(BaseModel):
    variant: Literal["feature_bins"] = "feature_bins"
    feature: str = "jet_energy"
    lo: float
    hi: float
    n_bins: int = Field(..., ge=1)
    selected: list[int] = Field(default_factory=list)

    @model_validator(mode="after")
    def validate_bins(self):
        if not self.lo < self.hi:
            raise ValueError(f"lo ({self.lo}) must be below hi ({self.hi})")
        for index in self.selected:
            if not 0 <= index < self.n_bins:
                raise ValueError(f"selected bin {index} outside [0, {self.n_bins})")
        return self

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.n_bins


class ThresholdResponsive(BaseModel):
    variant: Literal["threshold_responsive"] = "threshold_responsive"
    threshold: float = Field(..., gt=0.0, description="Threshold T in mm/h")


SliceSpec = Annotated[TimeWindow | RandomSubset | FeatureBins | ThresholdResponsive, Field(discriminator="variant")]


class Provenance(BaseModel):
    dataset_id: str
    seed: int | None = None


class SliceResult(BaseModel):
    spec: SliceSpec | None = None
    sample_ids: list[int]
    provenance: Provenance

    @model_validator(mode="after")
    def validate_ids(self):
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise ValueError("slice ids must be unique")
        return self

    def __len__(self) -> int:
        return len(self.sample_ids)
