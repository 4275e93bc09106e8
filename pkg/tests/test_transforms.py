"""Tests for jet projections, beam-axis rotations and the structural descriptor."""

import math

import numpy as np
import pytest

from core import InvariantError, JetEvent, MolecularFrame, Trajectory
from sampling import time_window_slice
from synth import gen_jet_toy
from transforms import (
    DescriptorCache,
    DescriptorParams,
    PairDistanceDescriptor,
    flag_low_similarity,
    project_jet_features,
    rotate_event,
    rotation_sweep,
    similarity_matrix,
    structural_descriptor,
    window_similarity,
    wrap_angle,
)


def test_projection_of_single_particle_is_zero():
    features = project_jet_features(JetEvent(event_id=0, particles=[[1.0, 1.0, 0.0, 0.0]], label=0))
    assert features.dphi.tolist() == [0.0]
    assert features.deta.tolist() == [0.0]
    assert features.energies.tolist() == [1.0]


def test_projection_of_mirrored_pair():
    s = 1.0 / math.sqrt(2.0)
    event = JetEvent(event_id=0, particles=[[1.0, s, s, 0.0], [1.0, s, -s, 0.0]], label=0)
    features = project_jet_features(event)
    np.testing.assert_allclose(features.dphi, [math.pi / 4, -math.pi / 4], atol=1e-12)
    np.testing.assert_allclose(features.deta, [0.0, 0.0], atol=1e-12)


def test_projection_rejects_zero_momentum():
    event = JetEvent(event_id=0, particles=[[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]], label=0)
    with pytest.raises(InvariantError, match="zero-momentum"):
        project_jet_features(event)


def test_wrap_angle_range():
    wrapped = wrap_angle(np.array([math.pi, -math.pi, 3 * math.pi / 2, -3 * math.pi / 2]))
    np.testing.assert_allclose(wrapped, [math.pi, math.pi, -math.pi / 2, math.pi / 2], atol=1e-12)


def test_rotate_event_quarter_turn_and_identity():
    event = JetEvent(event_id=5, particles=[[1.0, 1.0, 0.0, 0.0]], label=1)
    np.testing.assert_array_equal(rotate_event(event, 0.0).particles, event.particles)
    turned = rotate_event(event, math.pi / 2)
    np.testing.assert_allclose(turned.particles, [[1.0, 0.0, 1.0, 0.0]], atol=1e-12)
    assert turned.label == 1
    assert turned.event_id == 5


def test_rotate_event_preserves_energy_pz_and_transverse_momentum():
    event = gen_jet_toy(2, seed=3).events[0]
    rotated = rotate_event(event, 1.234)
    np.testing.assert_array_equal(rotated.particles[:, 0], event.particles[:, 0])
    np.testing.assert_array_equal(rotated.particles[:, 3], event.particles[:, 3])
    np.testing.assert_allclose(
        np.hypot(rotated.particles[:, 1], rotated.particles[:, 2]),
        np.hypot(event.particles[:, 1], event.particles[:, 2]),
        rtol=1e-12,
    )
    assert rotated.jet_energy == event.jet_energy


def test_rotation_composes_to_full_turn():
    event = gen_jet_toy(2, seed=4).events[1]
    rotated = event
    for _ in range(72):
        rotated = rotate_event(rotated, math.radians(5.0))
    np.testing.assert_allclose(rotated.particles, event.particles, atol=1e-9)


def test_rotation_sweep_defaults():
    dataset = gen_jet_toy(10, seed=0)
    sweep = rotation_sweep(dataset)
    assert len(sweep) == 36
    assert [r.angle_deg for r in sweep][:3] == [0.0, 5.0, 10.0]
    assert sweep[-1].angle_deg == 175.0
    assert sweep[0].dataset is dataset
    assert rotation_sweep(dataset, count=1)[0].dataset is dataset
    with pytest.raises(InvariantError):
        rotation_sweep(dataset, step_deg=30.0, count=13)


def test_projected_features_are_rotation_invariant():
    dataset = gen_jet_toy(20, seed=2)
    reference = [project_jet_features(e) for e in dataset]
    for rotated in rotation_sweep(dataset):
        for ref, event in zip(reference, rotated.dataset, strict=True):
            features = project_jet_features(event)
            np.testing.assert_allclose(features.dphi, ref.dphi, atol=1e-9)
            np.testing.assert_allclose(features.deta, ref.deta, atol=1e-9)


def _frame(positions, species, t=0):
    return MolecularFrame(time_index=t, species=species, positions=positions)


def test_descriptor_of_h2_peaks_at_the_bond_length():
    params = DescriptorParams(r_cut=3.0, n_bins=30, sigma=0.1)
    vector = structural_descriptor(_frame([[0, 0, 0], [1.05, 0, 0]], [1, 1]), params)
    assert vector.shape == (30,)
    assert int(np.argmax(vector)) == 10
    assert np.linalg.norm(vector) == pytest.approx(1.0)


def test_descriptor_matches_direct_accumulation():
    rng = np.random.default_rng(0)
    params = DescriptorParams(r_cut=4.0, n_bins=16, sigma=0.2)
    species = [1, 6, 8, 1, 6]
    positions = rng.uniform(-1.5, 1.5, (5, 3))
    vector = structural_descriptor(_frame(positions, species), params)

    pairs = [(1, 1), (1, 6), (1, 8), (6, 6), (6, 8), (8, 8)]
    edges = np.linspace(0.0, params.r_cut, params.n_bins + 1)
    expected = np.zeros(len(pairs) * params.n_bins)
    for i in range(5):
        for j in range(i + 1, 5):
            block = pairs.index(tuple(sorted((species[i], species[j]))))
            d = float(np.linalg.norm(positions[i] - positions[j]))
            for k in range(params.n_bins):
                lo = math.erf((edges[k] - d) / (params.sigma * math.sqrt(2)))
                hi = math.erf((edges[k + 1] - d) / (params.sigma * math.sqrt(2)))
                expected[block * params.n_bins + k] += 0.5 * (hi - lo)
    expected /= np.linalg.norm(expected)
    np.testing.assert_allclose(vector, expected, atol=1e-12)


def test_descriptor_invariances():
    rng = np.random.default_rng(1)
    params = DescriptorParams()
    species = np.array([1, 6, 8, 1, 6])
    positions = rng.uniform(-1.5, 1.5, (5, 3))
    reference = structural_descriptor(_frame(positions, species), params)

    theta = 0.7
    rotation = np.array(
        [[math.cos(theta), -math.sin(theta), 0.0], [math.sin(theta), math.cos(theta), 0.0], [0.0, 0.0, 1.0]]
    )
    moved = positions @ rotation.T + np.array([3.0, -2.0, 0.5])
    np.testing.assert_allclose(structural_descriptor(_frame(moved, species), params), reference, atol=1e-9)

    order = [3, 0, 4, 2, 1]
    permuted = structural_descriptor(_frame(positions[order], species[order]), params)
    np.testing.assert_allclose(permuted, reference, atol=1e-12)


def test_descriptor_needs_two_atoms():
    with pytest.raises(InvariantError):
        structural_descriptor(_frame([[0, 0, 0]], [1]), DescriptorParams())


def _trajectory(n_frames, seed=0, still=False):
    rng = np.random.default_rng(seed)
    base = np.array([[0.0, 0.0, 0.0], [1.1, 0.0, 0.0], [0.0, 1.3, 0.0]])
    frames = []
    for t in range(n_frames):
        jitter = 0.0 if still else rng.normal(0.0, 0.2, base.shape)
        frames.append(_frame(base + jitter, [1, 6, 8], t))
    return Trajectory(frames=tuple(frames))


def test_window_similarity_of_identical_frames_is_one():
    traj = _trajectory(6, still=True)
    first = time_window_slice(traj, 0.0, 0.5)
    second = time_window_slice(traj, 0.5, 0.5)
    assert window_similarity(traj, first, second, DescriptorParams()) == pytest.approx(1.0, abs=1e-12)


def test_window_similarity_matches_pair_loop_and_is_symmetric():
    traj = _trajectory(6, seed=5)
    params = DescriptorParams(sigma=0.2)
    first = time_window_slice(traj, 0.0, 0.5)
    second = time_window_slice(traj, 0.5, 0.5)
    descriptor = PairDistanceDescriptor(params)
    cosines = []
    for a in traj.select(first.sample_ids):
        for b in traj.select(second.sample_ids):
            va, vb = descriptor(a), descriptor(b)
            cosines.append(float(va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb))))
    assert len(cosines) == 9

    cache = DescriptorCache(descriptor)
    forward = window_similarity(traj, first, second, params, cache)
    assert forward == pytest.approx(sum(cosines) / 9, abs=1e-12)
    assert window_similarity(traj, second, first, params, cache) == pytest.approx(forward, abs=1e-12)
    assert len(cache) == 6


def test_disjoint_species_pairs_are_orthogonal():
    cache = DescriptorCache(PairDistanceDescriptor())
    hydrogen = _frame([[0, 0, 0], [0.8, 0, 0]], [1, 1], t=0)
    carbon = _frame([[0, 0, 0], [1.4, 0, 0]], [6, 6], t=1)
    assert similarity_matrix([hydrogen], [carbon], cache)[0, 0] == 0.0


def test_flag_low_similarity():
    assert flag_low_similarity({"w0": 0.95, "w1": 0.42, "w2": 0.88, "w3": 0.1}, 0.5) == ["w1", "w3"]

