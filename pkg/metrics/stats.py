"""Correlation and histogram helpers shared by the metric-space analyses."""

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, Field
from scipy import stats

from core import Histogram, MetricInputError


class CorrelationResult(BaseModel):
    x_name: str
    y_name: str
    n: int = Field(..., ge=2)
    pearson_r: float = Field(..., ge=-1.0, le=1.0)
    slope: float
    intercept: float


def pearson_linfit(
    xs: Sequence[float], ys: Sequence[float], x_name: str = "x", y_name: str = "y"
) -> CorrelationResult:
    """Pearson r and the least-squares line of y on x."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if len(x) != len(y):
        raise MetricInputError(f"{len(x)} x values but {len(y)} y values")
    if len(x) < 2:
        raise MetricInputError("correlation needs at least two points")
    if np.ptp(x) == 0:
        raise MetricInputError(f"'{x_name}' has zero variance")
    if np.ptp(y) == 0:
        raise MetricInputError(f"'{y_name}' has zero variance")
    fit = stats.linregress(x, y)
    return CorrelationResult(
        x_name=x_name,
        y_name=y_name,
        n=len(x),
        pearson_r=float(np.clip(fit.rvalue, -1.0, 1.0)),
        slope=float(fit.slope),
        intercept=float(fit.intercept),
    )


def histogram(
    values: Sequence[float], n_bins: int, lo: float | None = None, hi: float | None = None, label: str = ""
) -> Histogram:
    """Fixed-width histogram with the last bin closed.

    The range defaults to the data extent; a zero-width range is widened by one
    unit. Values outside an explicit range are counted as dropped.
    """
    if n_bins < 1:
        raise MetricInputError(f"n_bins must be >= 1, got {n_bins}")
    data = np.asarray(values, dtype=np.float64).reshape(-1)
    if data.size == 0 and (lo is None or hi is None):
        raise MetricInputError("histogram of no values needs an explicit range")
    lo = float(data.min()) if lo is None else float(lo)
    hi = float(data.max()) if hi is None else float(hi)
    if hi < lo:
        raise MetricInputError(f"histogram range [{lo}, {hi}] is inverted")
    if hi == lo:
        hi = lo + 1.0
    counts, edges = np.histogram(data, bins=n_bins, range=(lo, hi))
    return Histogram(
        label=label,
        lo=lo,
        hi=hi,
        edges=edges.tolist(),
        counts=counts.tolist(),
        dropped=int(data.size - counts.sum()),
    )
