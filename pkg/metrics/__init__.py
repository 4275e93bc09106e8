"""Metric kernels: regression, classification, precipitation verification and stability."""

from core import CuCsiGrid, Histogram

from .classification import DECISION_THRESHOLD, RocCurve, auc_report, classification_metrics, roc_auc
from .precip import (
    ACTIVE_THRESHOLD,
    CSI_THRESHOLDS,
    CUCSI_BINS,
    CUCSI_STEP,
    ComDisplacement,
    active_area_mae,
    center_of_mass,
    center_of_mass_displacement,
    csi,
    csi_avg,
    csi_bin,
    cucsi,
    differential_trend,
    displacement_mae_curve,
    mean_intensity,
    raw_mae,
    shift_frame,
)
from .regression import (
    ScatterPoint,
    contiguous_ranges,
    energy_error_series,
    equivariance_error,
    error_scatter,
    flag_anomalous_frames,
    force_mae,
    scatter_reports,
)
from .stability import STABILITY_BINS, StabilityEntry, StabilityResult, stability_analysis, tukey_outliers
from .stats import CorrelationResult, histogram, pearson_linfit

__all__ = [
    "ACTIVE_THRESHOLD",
    "CSI_THRESHOLDS",
    "CUCSI_BINS",
    "CUCSI_STEP",
    "DECISION_THRESHOLD",
    "STABILITY_BINS",
    "ComDisplacement",
    "CorrelationResult",
    "CuCsiGrid",
    "Histogram",
    "RocCurve",
    "ScatterPoint",
    "StabilityEntry",
    "StabilityResult",
    "active_area_mae",
    "auc_report",
    "center_of_mass",
    "center_of_mass_displacement",
    "classification_metrics",
    "contiguous_ranges",
    "csi",
    "csi_avg",
    "csi_bin",
    "cucsi",
    "differential_trend",
    "displacement_mae_curve",
    "energy_error_series",
    "equivariance_error",
    "error_scatter",
    "flag_anomalous_frames",
    "force_mae",
    "histogram",
    "mean_intensity",
    "pearson_linfit",
    "raw_mae",
    "roc_auc",
    "scatter_reports",
    "shift_frame",
    "stability_analysis",
    "tukey_outliers",
]
