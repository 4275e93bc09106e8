"""Tests for the domain model, report invariants and file formats."""

import json
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np
import pytest
from pydantic import ValidationError

from core import (
    Aggregates,
    ClassScores,
    DataFormatError,
    EnergyForces,
    InvariantError,
    JetDataset,
    JetEvent,
    MetricReport,
    MolecularFrame,
    OutputFrames,
    PrecipEvent,
    PredictionSet,
    PredictorError,
    Trajectory,
    decode_prediction,
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


def _frame(t, energy=None, forces=None):
    positions = np.array([[0.0, 0.0, 0.0], [1.2, 0.0, 0.0]]) + 0.01 * t
    return MolecularFrame(time_index=t, species=[1, 8], positions=positions, energy=energy, forces=forces)


def test_frame_rejects_mismatched_positions():
    """Positions must be one xyz row per species."""
    with pytest.raises(InvariantError):
        MolecularFrame(time_index=0, species=[1, 8], positions=[[0.0, 0.0, 0.0]])


def test_frame_arrays_are_read_only():
    frame = _frame(0)
    with pytest.raises(ValueError):
        frame.positions[0, 0] = 5.0


def test_trajectory_requires_increasing_time_and_same_species():
    with pytest.raises(InvariantError):
        Trajectory(frames=(_frame(1), _frame(0)))
    other = MolecularFrame(time_index=2, species=[1, 6], positions=np.zeros((2, 3)))
    with pytest.raises(InvariantError):
        Trajectory(frames=(_frame(0), other))


def test_trajectory_file_round_trip_is_byte_stable():
    """Write, read and write again produces the same bytes."""
    frames = tuple(_frame(t, energy=-1.5 * t, forces=np.full((2, 3), 0.1 * t)) for t in range(5))
    with TemporaryDirectory() as temp_dir:
        first = Path(temp_dir) / "mol.jsonl"
        second = Path(temp_dir) / "again.jsonl"
        write_trajectory(Trajectory(frames=frames), first)
        loaded = load_trajectory(first)
        write_trajectory(loaded, second)

        assert first.read_bytes() == second.read_bytes()
        assert loaded.molecule_name == "mol"
        assert loaded.ids == [0, 1, 2, 3, 4]
        np.testing.assert_array_equal(loaded.frames[3].forces, frames[3].forces)


def test_trajectory_duplicate_time_index_reports_line():
    record = {"time_index": 0, "species": [1], "positions": [[0.0, 0.0, 0.0]]}
    with TemporaryDirectory() as temp_dir:
        path = Path(temp_dir) / "dup.jsonl"
        path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n")
        with pytest.raises(DataFormatError) as excinfo:
            load_trajectory(path)
        assert excinfo.value.line == 2
        assert "duplicate time_index" in str(excinfo.value)


def test_trajectory_invalid_json_reports_line():
    with TemporaryDirectory() as temp_dir:
        path = Path(temp_dir) / "bad.jsonl"
        path.write_text('{"time_index": 0, "species": [1], "positions": [[0, 0, 0]]}\n{not json\n')
        with pytest.raises(DataFormatError) as excinfo:
            load_trajectory(path)
        assert excinfo.value.line == 2


def test_jet_event_validates_label_and_energy():
    particles = [[10.0, 1.0, 0.0, 9.0], [5.0, 0.0, 1.0, 4.0]]
    event = JetEvent(event_id=0, particles=particles, label=1)
    assert event.jet_energy == pytest.approx(15.0)
    with pytest.raises(InvariantError):
        JetEvent(event_id=0, particles=particles, label=2)
    with pytest.raises(InvariantError):
        JetEvent(event_id=0, particles=particles, label=0, jet_energy=20.0)


def test_jet_dataset_round_trip():
    events = (
        JetEvent(event_id=3, particles=[[10.0, 1.0, 0.0, 9.0]], label=1),
        JetEvent(event_id=1, particles=[[4.0, 0.0, 2.0, 3.0]], label=0),
    )
    with TemporaryDirectory() as temp_dir:
        path = Path(temp_dir) / "jets.jsonl"
        write_jet_dataset(JetDataset(events=events), path)
        loaded = load_jet_dataset(path)
        assert loaded.ids == [1, 3]
        assert loaded.by_id()[3].label == 1
        with pytest.raises(InvariantError):
            JetDataset(events=events + (events[0],))


def _precip_event(event_id=0, p=2, f=3):
    rng = np.random.default_rng(event_id)
    return PrecipEvent(event_id=event_id, frames=rng.uniform(0, 50, (p + f, 6, 5)), input_len=p, output_len=f)


def test_precip_event_timeline_indexing():
    event = _precip_event(p=2, f=3)
    np.testing.assert_array_equal(event.frame_at(-2), event.frames[0])
    np.testing.assert_array_equal(event.frame_at(0), event.targets[0])
    np.testing.assert_array_equal(event.frame_at(2), event.frames[4])
    with pytest.raises(IndexError):
        event.frame_at(3)
    with pytest.raises(IndexError):
        event.frame_at(-3)


def test_precip_event_rejects_negative_intensity_and_bad_length():
    frames = np.zeros((5, 4, 4))
    frames[1, 2, 2] = -1.0
    with pytest.raises(InvariantError):
        PrecipEvent(event_id=0, frames=frames, input_len=2, output_len=3)
    with pytest.raises(InvariantError):
        PrecipEvent(event_id=0, frames=np.zeros((4, 4, 4)), input_len=2, output_len=3)


def test_precip_dataset_round_trip_on_disk_bytes():
    """Frames are stored as little-endian float32; rewriting a loaded dataset is byte-identical."""
    events = [_precip_event(i) for i in range(3)]
    with TemporaryDirectory() as temp_dir:
        first_dir, second_dir = Path(temp_dir) / "a", Path(temp_dir) / "b"
        write_precip_dataset(events, first_dir / "radar.json")
        loaded = load_precip_dataset(first_dir / "radar.json")
        write_precip_dataset(loaded, second_dir / "radar.json")

        for name in sorted(p.name for p in first_dir.iterdir()):
            assert (first_dir / name).read_bytes() == (second_dir / name).read_bytes()
        quantized = events[1].frames.astype(np.float32).astype(np.float64)
        np.testing.assert_array_equal(loaded[1].frames, quantized)
        assert loaded[1].input_len == 2
        assert loaded[1].output_len == 3


def test_precip_frame_file_corruption_is_detected():
    with TemporaryDirectory() as temp_dir:
        manifest = Path(temp_dir) / "radar.json"
        write_precip_dataset([_precip_event(0)], manifest)
        frame_file = Path(temp_dir) / "radar_000000.saib"
        raw = frame_file.read_bytes()

        frame_file.write_bytes(b"XXXX" + raw[4:])
        with pytest.raises(DataFormatError, match="magic"):
            load_precip_dataset(manifest)

        frame_file.write_bytes(raw[:-4])
        with pytest.raises(DataFormatError, match="size mismatch"):
            load_precip_dataset(manifest)


def test_precip_manifest_must_be_an_object():
    with TemporaryDirectory() as temp_dir:
        manifest = Path(temp_dir) / "radar.json"
        for content in ("[]", "42", '"events"'):
            manifest.write_text(content, encoding="utf-8")
            with pytest.raises(DataFormatError, match="JSON object") as info:
                load_precip_dataset(manifest)
            assert info.value.path == str(manifest)


def test_aggregates_ignore_undefined_values():
    aggregates = Aggregates.of({3: 3.0, 1: None, 2: 1.0, 0: 2.0})
    assert aggregates.count == 3
    assert aggregates.mean == pytest.approx(2.0)
    assert aggregates.median == 2.0
    assert (aggregates.min, aggregates.max) == (1.0, 3.0)
    assert Aggregates.of({0: None}) is None


def test_report_rejects_inconsistent_aggregates():
    bad = Aggregates(count=2, mean=5.0, median=5.0, min=1.0, max=2.0)
    with pytest.raises(ValidationError):
        MetricReport(metric_name="mae", per_sample={0: 1.0, 1: 2.0}, aggregates=bad)


def test_report_rejects_non_finite_values():
    with pytest.raises(ValidationError):
        MetricReport.build("mae", {0: float("nan")})


def test_report_write_and_read():
    report = MetricReport.build("mae", {2: 0.5, 10: None, 1: 1.5}, params={"leads": [0, 1]}, values={"overall": 1.0})
    with TemporaryDirectory() as temp_dir:
        path = Path(temp_dir) / "reports" / "mae.json"
        write_report(report, path)
        text = path.read_text()
        assert text.endswith("\n")
        loaded = read_report(path)
        assert loaded == report
        assert loaded.defined() == {1: 1.5, 2: 0.5}
        assert loaded.to_canonical_json() == text


def test_class_scores_must_be_a_distribution():
    assert ClassScores(scores=[0.25, 0.75]).signal == 0.75
    with pytest.raises(InvariantError):
        ClassScores(scores=[0.5, 0.6])
    with pytest.raises(InvariantError):
        ClassScores(scores=[-0.1, 1.1])


def test_prediction_set_check_against_shapes():
    frames = [_frame(0), _frame(1)]
    preds = PredictionSet(
        model_id="m",
        run_id="r",
        seed=None,
        entries={
            0: EnergyForces(energy=0.0, forces=np.zeros((2, 3))),
            1: EnergyForces(energy=0.0, forces=np.zeros((3, 3))),
        },
    )
    with pytest.raises(InvariantError, match="frame 1"):
        preds.check_against(frames)
    preds.check_against(frames[:1])


def test_predictions_file_round_trip():
    entries = {
        4: OutputFrames(frames=np.ones((2, 3, 3))),
        1: OutputFrames(frames=np.zeros((2, 3, 3))),
    }
    preds = PredictionSet(model_id="toy:advection", run_id="run-1", seed=7, entries=entries)
    with TemporaryDirectory() as temp_dir:
        path = Path(temp_dir) / "preds.jsonl"
        write_predictions(preds, "precip", path)
        workload, loaded = load_predictions(path)
        assert workload == "precip"
        assert loaded.ids == [1, 4]
        assert loaded.seed == 7
        np.testing.assert_array_equal(loaded[4].frames, np.ones((2, 3, 3)))


def test_decode_prediction_malformed_payload():
    with pytest.raises(DataFormatError):
        decode_prediction("md", {"energy": 1.0})


def test_predictor_error_carries_run_id():
    error = PredictorError("exited with status 1", "cell-3")
    assert error.run_id == "cell-3"
    assert str(error) == "[cell-3] exited with status 1"
