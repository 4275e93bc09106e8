"""Seeded synthetic datasets and toy predictors for end-to-end runs."""

from .jets import JetClassParams, JetToyParams, gen_jet_toy
from .md import MdToyParams, basin_sign, gen_md_toy, harmonic_energy_forces
from .precip import Blob, PrecipToyParams, gen_precip_dataset, gen_precip_toy
from .predictors import (
    TOY_PREDICTORS,
    AdvectionExtrapolator,
    KnnForces,
    LinearTagger,
    ToyKind,
    ToyPredictor,
    make_toy_predictor,
    projected_moments,
    raw_moments,
    toy_predict,
)

__all__ = [
    "TOY_PREDICTORS",
    "AdvectionExtrapolator",
    "Blob",
    "JetClassParams",
    "JetToyParams",
    "KnnForces",
    "LinearTagger",
    "MdToyParams",
    "PrecipToyParams",
    "ToyKind",
    "ToyPredictor",
    "basin_sign",
    "gen_jet_toy",
    "gen_md_toy",
    "gen_precip_dataset",
    "gen_precip_toy",
    "harmonic_energy_forces",
    "make_toy_predictor",
    "projected_moments",
    "raw_moments",
    "toy_predict",
]
