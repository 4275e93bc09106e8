"""Physically-informed projections, rotations and structural descriptors."""

from .descriptor import Descriptor, DescriptorParams, PairDistanceDescriptor, structural_descriptor
from .jets import (
    JetFeatures,
    RotatedDataset,
    project_jet_features,
    rotate_dataset,
    rotate_event,
    rotation_sweep,
    wrap_angle,
)
from .similarity import DescriptorCache, flag_low_similarity, similarity_matrix, window_similarity

__all__ = [
    "Descriptor",
    "DescriptorCache",
    "DescriptorParams",
    "JetFeatures",
    "PairDistanceDescriptor",
    "RotatedDataset",
    "flag_low_similarity",
    "project_jet_features",
    "rotate_dataset",
    "rotate_event",
    "rotation_sweep",
    "similarity_matrix",
    "structural_descriptor",
    "window_similarity",
    "wrap_angle",
]
