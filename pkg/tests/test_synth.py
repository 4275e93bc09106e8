"""Tests for the seeded generators and the toy predictors."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from core import InvariantError, PredictorError
from metrics import auc_report, center_of_mass, differential_trend, force_mae
from sampling import random_subsample
from synth import (
    JetClassParams,
    JetToyParams,
    KnnForces,
    LinearTagger,
    MdToyParams,
    PrecipToyParams,
    basin_sign,
    gen_jet_toy,
    gen_md_toy,
    gen_precip_dataset,
    gen_precip_toy,
    harmonic_energy_forces,
    make_toy_predictor,
    projected_moments,
    toy_predict,
)
from transforms import rotation_sweep


def test_md_toy_is_deterministic_per_seed():
    params = MdToyParams(n_frames=50, seed=3)
    first, second = gen_md_toy(params), gen_md_toy(params)
    for a, b in zip(first, second, strict=True):
        np.testing.assert_array_equal(a.positions, b.positions)
        assert a.energy == b.energy
    other = gen_md_toy(MdToyParams(n_frames=50, seed=4))
    assert not np.array_equal(first.frames[0].positions, other.frames[0].positions)


def test_md_toy_forces_are_the_negative_energy_gradient():
    params = MdToyParams(n_frames=5, seed=1)
    x0 = params.equilibrium_array()
    h = 1e-5
    for frame in gen_md_toy(params):
        numeric = np.zeros_like(frame.positions)
        for atom in range(frame.n_atoms):
            for axis in range(3):
                plus, minus = frame.positions.copy(), frame.positions.copy()
                plus[atom, axis] += h
                minus[atom, axis] -= h
                e_plus, _ = harmonic_energy_forces(plus, x0, params.k)
                e_minus, _ = harmonic_energy_forces(minus, x0, params.k)
                numeric[atom, axis] = -(e_plus - e_minus) / (2 * h)
        relative = np.linalg.norm(numeric - frame.forces) / np.linalg.norm(frame.forces)
        assert relative <= 1e-5
        energy, _ = harmonic_energy_forces(frame.positions, x0, params.k)
        assert frame.energy == energy


def test_md_toy_hops_between_basins():
    assert [basin_sign(t, 200) for t in (0, 99, 100, 199, 200)] == [1, 1, -1, -1, 1]
    params = MdToyParams(n_frames=200, seed=2)
    traj = gen_md_toy(params)
    x0 = params.equilibrium_array()
    first = np.mean([f.positions - x0 for f in traj.frames[:100]], axis=0)
    second = np.mean([f.positions - x0 for f in traj.frames[100:]], axis=0)
    assert float(np.sum(first * second)) < 0


def test_md_toy_rejects_inconsistent_species():
    with pytest.raises(ValidationError):
        MdToyParams(n_atoms=3, species=[1, 6])


def test_jet_toy_labels_and_determinism():
    dataset = gen_jet_toy(40, seed=5)
    assert [e.label for e in dataset][:4] == [0, 1, 0, 1]
    again = gen_jet_toy(40, seed=5)
    np.testing.assert_array_equal(dataset.events[7].particles, again.events[7].particles)
    for event in dataset:
        assert 100.0 <= event.jet_energy <= 500.0
        np.testing.assert_allclose(np.linalg.norm(event.momenta, axis=1), event.energies, rtol=1e-12)
    with pytest.raises(InvariantError):
        gen_jet_toy(1)


def test_jet_toy_signal_is_narrower():
    dataset = gen_jet_toy(400, seed=6)
    radius = {0: [], 1: []}
    for event in dataset:
        radius[event.label].append(projected_moments(event)[3])
    assert np.mean(radius[1]) < np.mean(radius[0])


def test_precip_toy_mass_and_center_follow_the_analytic_path():
    params = PrecipToyParams(input_len=3, output_len=8, decay=0.9)
    event = gen_precip_toy(params)
    mass, path = event.metadata["mass"], event.metadata["com_path"]
    for t, frame in enumerate(event.frames):
        assert frame.sum() == pytest.approx(mass[t], rel=1e-9)
        x, y = center_of_mass(frame)
        assert math.isclose(x, path[t][0], abs_tol=1e-6)
        assert math.isclose(y, path[t][1], abs_tol=1e-6)

    area = params.height * params.width
    for j in range(params.output_len):
        gt, _ = differential_trend(event, event.targets, -1, j)
        expected = (mass[params.input_len + j] - mass[params.input_len - 1]) / area
        assert gt == pytest.approx(expected, abs=1e-9)


def test_precip_toy_bounds_and_dataset_variation():
    with pytest.raises(InvariantError):
        gen_precip_toy(PrecipToyParams(height=32, width=32))
    events = gen_precip_dataset(4, PrecipToyParams(input_len=2, output_len=2, seed=8))
    assert [e.event_id for e in events] == [0, 1, 2, 3]
    assert events[0].frames.max() != events[1].frames.max()
    again = gen_precip_dataset(4, PrecipToyParams(input_len=2, output_len=2, seed=8))
    np.testing.assert_array_equal(events[2].frames, again[2].frames)


def test_knn_forces_improves_with_more_training_frames():
    traj = gen_md_toy(MdToyParams(n_frames=1000, seed=0))
    frames = traj.frames
    pool, test = [f.time_index for f in frames[:900]], list(frames[900:])
    errors = {}
    for size in (10, 400):
        ids = random_subsample(pool, size, seed=1).sample_ids
        train = traj.select(ids)
        errors[size] = force_mae(test, toy_predict("knn_forces", train, test)).values["overall"]
    assert errors[400] < errors[10]


def test_knn_forces_recalls_training_frames():
    traj = gen_md_toy(MdToyParams(n_frames=30, seed=1))
    predictor = KnnForces()
    predictor.fit(list(traj.frames))
    prediction = predictor.predict_one(traj.frames[12].unlabeled())
    np.testing.assert_array_equal(prediction.forces, traj.frames[12].forces)
    assert prediction.energy == traj.frames[12].energy


def test_knn_forces_errors():
    with pytest.raises(PredictorError, match="before fit"):
        KnnForces().predict_one(gen_md_toy(MdToyParams(n_frames=1)).frames[0])
    with pytest.raises(PredictorError):
        KnnForces().fit([])


def test_seeded_perturbation_is_per_sample():
    traj = gen_md_toy(MdToyParams(n_frames=20, seed=2))
    train, test = list(traj.frames[:15]), list(traj.frames[15:])
    plain = toy_predict("knn_forces", train, test)
    noisy = toy_predict("knn_forces", train, test, seed=9)
    reversed_order = toy_predict("knn_forces", train, test[::-1], seed=9)
    assert not np.array_equal(plain[17].forces, noisy[17].forces)
    np.testing.assert_array_equal(noisy[17].forces, reversed_order[17].forces)
    assert noisy.model_id == "toy:knn_forces"


def test_linear_tagger_separates_toy_jets():
    train, test = gen_jet_toy(2000, seed=0), gen_jet_toy(1000, seed=1)
    preds = toy_predict("linear_tagger", list(train), list(test), options={"features": "projected"})
    scores = [preds[e.event_id].signal for e in test]
    report = auc_report(scores, [e.label for e in test], ids=test.ids)
    assert report.values["auc"] > 0.8


def test_projected_tagger_auc_is_rotation_invariant():
    train, test = gen_jet_toy(600, seed=2), gen_jet_toy(200, seed=3)
    tagger = LinearTagger({"features": "projected"})
    tagger.fit(list(train))
    labels = [e.label for e in test]
    aucs = []
    for rotated in rotation_sweep(test):
        scores = [tagger.predict_one(e).signal for e in rotated.dataset]
        aucs.append(auc_report(scores, labels).values["auc"])
    assert len(aucs) == 36
    assert max(aucs) - min(aucs) <= 1e-9


def test_linear_tagger_defaults_to_projected_moments():
    train, test = gen_jet_toy(300, seed=4), gen_jet_toy(50, seed=5)
    assert LinearTagger().options.features == "projected"
    default = toy_predict("linear_tagger", list(train), list(test))
    projected = toy_predict("linear_tagger", list(train), list(test), options={"features": "projected"})
    raw = toy_predict("linear_tagger", list(train), list(test), options={"features": "raw"})
    signal = [default[e.event_id].signal for e in test]
    assert signal == [projected[e.event_id].signal for e in test]
    assert signal != [raw[e.event_id].signal for e in test]


def test_linear_tagger_needs_both_classes():
    events = [e for e in gen_jet_toy(10, seed=0) if e.label == 1]
    with pytest.raises(PredictorError, match="both classes"):
        LinearTagger().fit(events)


def test_advection_extrapolator_follows_motion_and_decay():
    params = PrecipToyParams(input_len=3, output_len=4, decay=0.9)
    event = gen_precip_toy(params)
    prediction = toy_predict("advection_extrapolator", [], [event])[0].frames
    mass, path = event.metadata["mass"], event.metadata["com_path"]
    for k, frame in enumerate(prediction):
        t = params.input_len + k
        assert frame.sum() == pytest.approx(mass[t], rel=1e-6)
        x, y = center_of_mass(frame)
        assert math.isclose(x, path[t][0], abs_tol=1e-3)
        assert math.isclose(y, path[t][1], abs_tol=1e-3)


def test_toy_predictor_options_are_validated():
    with pytest.raises(ValidationError):
        make_toy_predictor("linear_tagger", {"bogus": 1})
    with pytest.raises(PredictorError, match="unknown toy predictor"):
        make_toy_predictor("transformer")


def test_linear_tagger_is_at_chance_on_identical_classes():
    same = JetClassParams(angular_spread=0.08)
    params = JetToyParams(signal=same, background=same)
    train, test = gen_jet_toy(2000, seed=0, params=params), gen_jet_toy(2000, seed=1, params=params)
    preds = toy_predict("linear_tagger", list(train), list(test))
    report = auc_report([preds[e.event_id].signal for e in test], [e.label for e in test])
    assert report.values["auc"] == pytest.approx(0.5, abs=0.05)
