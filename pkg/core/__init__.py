"""Domain data model, dataset stores and bit-exact file I/O."""

from .codec import (
    Sample,
    decode_prediction,
    decode_training_sample,
    encode_input,
    encode_prediction,
    encode_target,
    sample_id,
)
from .errors import (
    DataFormatError,
    InsufficientPopulationError,
    InvariantError,
    MetricInputError,
    OutOfRangeError,
    PlanValidationError,
    PredictorError,
    PredictorTimeoutError,
    ProtocolError,
    RenderError,
    SaiBenchError,
    SliceError,
    UsageError,
)
from .io import (
    atomic_write_bytes,
    atomic_write_text,
    load_jet_dataset,
    load_precip_dataset,
    load_predictions,
    load_trajectory,
    read_report,
    write_jet_dataset,
    write_precip_dataset,
    write_predictions,
    write_report,
    write_trajectory,
)
from .models import (
    ClassScores,
    EnergyForces,
    JetDataset,
    JetEvent,
    MolecularFrame,
    OutputFrames,
    Prediction,
    PrecipEvent,
    PredictionSet,
    Trajectory,
    Workload,
)
from .report import Aggregates, CuCsiGrid, Histogram, MetricReport, canonical_dumps

__all__ = [
    "Aggregates",
    "ClassScores",
    "CuCsiGrid",
    "DataFormatError",
    "EnergyForces",
    "Histogram",
    "InsufficientPopulationError",
    "InvariantError",
    "JetDataset",
    "JetEvent",
    "MetricInputError",
    "MetricReport",
    "MolecularFrame",
    "OutOfRangeError",
    "OutputFrames",
    "PlanValidationError",
    "Prediction",
    "PrecipEvent",
    "PredictionSet",
    "PredictorError",
    "PredictorTimeoutError",
    "ProtocolError",
    "RenderError",
    "SaiBenchError",
    "Sample",
    "SliceError",
    "Trajectory",
    "UsageError",
    "Workload",
    "atomic_write_bytes",
    "atomic_write_text",
    "canonical_dumps",
    "decode_prediction",
    "decode_training_sample",
    "encode_input",
    "encode_prediction",
    "encode_target",
    "load_jet_dataset",
    "load_precip_dataset",
    "load_predictions",
    "load_trajectory",
    "read_report",
    "sample_id",
    "write_jet_dataset",
    "write_precip_dataset",
    "write_predictions",
    "write_report",
    "write_trajectory",
]
