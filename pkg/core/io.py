"""Bit-exact file I/O for datasets, predictions and reports."""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from .codec import decode_prediction, encode_prediction
from .errors import DataFormatError, InvariantError, SaiBenchError
from .models import JetDataset, JetEvent, MolecularFrame, PrecipEvent, PredictionSet, Trajectory, Workload
from .report import REPORT_SCHEMA_VERSION, MetricReport, canonical_dumps

logger = logging.getLogger(__name__)

PRECIP_MAGIC = b"SAIB"
PRECIP_VERSION = 1
PRECIP_HEADER_SIZE = 20
MANIFEST_SCHEMA_VERSION = 1
PREDICTIONS_SCHEMA_VERSION = 1


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write through a temporary file in the same directory and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def _jsonl_line(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def _read_jsonl(path: Path) -> list[tuple[int, dict[str, Any]]]:
    if not path.exists():
        raise DataFormatError("file not found", str(path))
    records = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise DataFormatError(f"invalid JSON: {e.msg}", str(path), line_no) from e
            if not isinstance(record, dict):
                raise DataFormatError("record must be a JSON object", str(path), line_no)
            records.append((line_no, record))
    return records


def load_trajectory(path: str | Path, format: str = "jsonl") -> Trajectory:
    if format != "jsonl":
        raise DataFormatError(f"unsupported trajectory format '{format}'", str(path))
    path = Path(path)
    frames: list[MolecularFrame] = []
    seen: dict[int, int] = {}
    for line_no, record in _read_jsonl(path):
        try:
            frame = MolecularFrame(
                time_index=int(record["time_index"]),
                species=record["species"],
                positions=record["positions"],
                energy=record.get("energy"),
                forces=record.get("forces"),
            )
        except KeyError as e:
            raise DataFormatError(f"missing field {e}", str(path), line_no) from e
        except (InvariantError, TypeError, ValueError) as e:
            raise DataFormatError(str(e), str(path), line_no) from e
        if frame.time_index in seen:
            raise DataFormatError(
                f"duplicate time_index {frame.time_index} (first seen on line {seen[frame.time_index]})",
                str(path),
                line_no,
            )
        seen[frame.time_index] = line_no
        frames.append(frame)
    frames.sort(key=lambda fr: fr.time_index)
    try:
        trajectory = Trajectory(frames=tuple(frames), molecule_name=path.stem)
    except InvariantError as e:
        raise DataFormatError(str(e), str(path)) from e
    logger.debug(f"Loaded {len(trajectory)} frames from {path}")
    return trajectory


def write_trajectory(trajectory: Trajectory, path: str | Path) -> None:
    lines = []
    for frame in trajectory:
        record: dict[str, Any] = {
            "time_index": frame.time_index,
            "species": frame.species.tolist(),
            "positions": frame.positions.tolist(),
        }
        if frame.energy is not None:
            record["energy"] = frame.energy
        if frame.forces is not None:
            record["forces"] = frame.forces.tolist()
        lines.append(_jsonl_line(record))
    atomic_write_text(path, "".join(lines))


def load_jet_dataset(path: str | Path, format: str = "jsonl") -> JetDataset:
    if format != "jsonl":
        raise DataFormatError(f"unsupported jet dataset format '{format}'", str(path))
    path = Path(path)
    events: list[JetEvent] = []
    seen: dict[int, int] = {}
    for line_no, record in _read_jsonl(path):
        try:
            particles = np.asarray(record["particles"], dtype=np.float64)
            if particles.size == 0:
                raise DataFormatError(f"event {record['event_id']}: empty particle list", str(path), line_no)
            event = JetEvent(
                event_id=int(record["event_id"]),
                particles=particles,
                label=int(record["label"]),
                jet_energy=record.get("jet_energy"),
            )
        except KeyError as e:
            raise DataFormatError(f"missing field {e}", str(path), line_no) from e
        except (InvariantError, TypeError, ValueError) as e:
            raise DataFormatError(str(e), str(path), line_no) from e
        if event.event_id in seen:
            raise DataFormatError(f"duplicate event_id {event.event_id}", str(path), line_no)
        seen[event.event_id] = line_no
        events.append(event)
    return JetDataset(events=tuple(events), name=path.stem)


def write_jet_dataset(dataset: JetDataset, path: str | Path) -> None:
    lines = [
        _jsonl_line(
            {
                "event_id": event.event_id,
                "label": event.label,
                "particles": event.particles.tolist(),
                "jet_energy": event.jet_energy,
            }
        )
        for event in dataset
    ]
    atomic_write_text(path, "".join(lines))


def encode_precip_frames(frames: np.ndarray) -> bytes:
    t, h, w = frames.shape
    header = PRECIP_MAGIC + np.array([PRECIP_VERSION, t, h, w], dtype="<u4").tobytes()
    return header + np.ascontiguousarray(frames, dtype="<f4").tobytes()


def decode_precip_frames(raw: bytes, dims: tuple[int, int, int] | None = None, path: str | None = None) -> np.ndarray:
    if len(raw) < PRECIP_HEADER_SIZE or raw[:4] != PRECIP_MAGIC:
        raise DataFormatError("header magic mismatch", path)
    version, t, h, w = (int(v) for v in np.frombuffer(raw[4:PRECIP_HEADER_SIZE], dtype="<u4"))
    if version != PRECIP_VERSION:
        raise DataFormatError(f"unsupported frame file version {version}", path)
    if dims is not None and (t, h, w) != tuple(dims):
        raise DataFormatError(f"header dims {(t, h, w)} differ from manifest dims {tuple(dims)}", path)
    expected = PRECIP_HEADER_SIZE + 4 * t * h * w
    if len(raw) != expected:
        raise DataFormatError(f"size mismatch: expected {expected} bytes, found {len(raw)}", path)
    frames = np.frombuffer(raw[PRECIP_HEADER_SIZE:], dtype="<f4").reshape(t, h, w)
    if not np.all(np.isfinite(frames)):
        raise DataFormatError("non-finite intensity", path)
    if np.any(frames < 0):
        raise DataFormatError("negative intensity", path)
    return frames.astype(np.float64)


def load_precip_dataset(manifest_path: str | Path) -> list[PrecipEvent]:
    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise DataFormatError("manifest not found", str(manifest_path)) from e
    except json.JSONDecodeError as e:
        raise DataFormatError(f"invalid manifest JSON: {e.msg}", str(manifest_path), e.lineno) from e

    if not isinstance(manifest, dict):
        raise DataFormatError("manifest must be a JSON object", str(manifest_path))
    events = []
    seen = set()
    for index, entry in enumerate(manifest.get("events", [])):
        try:
            event_id = int(entry["event_id"])
            frame_path = manifest_path.parent / entry["file"]
            dims = tuple(int(d) for d in entry["dims"])
            p, f = int(entry["p"]), int(entry["f"])
        except (KeyError, TypeError, ValueError) as e:
            raise DataFormatError(f"manifest entry {index} is malformed: {e}", str(manifest_path)) from e
        if event_id in seen:
            raise DataFormatError(f"duplicate event_id {event_id}", str(manifest_path))
        seen.add(event_id)
        try:
            raw = frame_path.read_bytes()
        except FileNotFoundError as e:
            raise DataFormatError("frame file not found", str(frame_path)) from e
        frames = decode_precip_frames(raw, dims, str(frame_path))
        try:
            events.append(
                PrecipEvent(
                    event_id=event_id,
                    frames=frames,
                    input_len=p,
                    output_len=f,
                    metadata=entry.get("metadata", {}),
                )
            )
        except InvariantError as e:
            raise DataFormatError(str(e), str(frame_path)) from e
    events.sort(key=lambda e: e.event_id)
    logger.debug(f"Loaded {len(events)} precipitation events from {manifest_path}")
    return events


def write_precip_dataset(events: list[PrecipEvent], manifest_path: str | Path) -> None:
    manifest_path = Path(manifest_path)
    entries = []
    for event in sorted(events, key=lambda e: e.event_id):
        file_name = f"{manifest_path.stem}_{event.event_id:06d}.saib"
        atomic_write_bytes(manifest_path.parent / file_name, encode_precip_frames(event.frames))
        entry: dict[str, Any] = {
            "event_id": event.event_id,
            "p": event.input_len,
            "f": event.output_len,
            "file": file_name,
            "dims": list(event.frames.shape),
        }
        if event.metadata:
            entry["metadata"] = dict(event.metadata)
        entries.append(entry)
    atomic_write_text(manifest_path, canonical_dumps({"schema_version": MANIFEST_SCHEMA_VERSION, "events": entries}))


def write_predictions(predictions: PredictionSet, workload: Workload, path: str | Path) -> None:
    header = {
        "kind": "predictions",
        "model_id": predictions.model_id,
        "run_id": predictions.run_id,
        "seed": predictions.seed,
        "workload": workload,
        "schema_version": PREDICTIONS_SCHEMA_VERSION,
    }
    lines = [_jsonl_line(header)]
    for sample_id in predictions.ids:
        lines.append(_jsonl_line({"id": sample_id, "output": encode_prediction(predictions[sample_id])}))
    atomic_write_text(path, "".join(lines))


def load_predictions(path: str | Path) -> tuple[Workload, PredictionSet]:
    path = Path(path)
    records = _read_jsonl(path)
    if not records or records[0][1].get("kind") != "predictions":
        raise DataFormatError("missing predictions header", str(path), 1)
    header = records[0][1]
    workload = header.get("workload")
    if workload not in ("md", "jet", "precip"):
        raise DataFormatError(f"unknown workload '{workload}'", str(path), 1)
    entries = {}
    for line_no, record in records[1:]:
        try:
            sample_id = int(record["id"])
            entries[sample_id] = decode_prediction(workload, record["output"])
        except KeyError as e:
            raise DataFormatError(f"missing field {e}", str(path), line_no) from e
        except SaiBenchError as e:
            raise DataFormatError(str(e), str(path), line_no) from e
    predictions = PredictionSet(
        model_id=str(header.get("model_id", path.stem)),
        run_id=str(header.get("run_id", "")),
        seed=header.get("seed"),
        entries=entries,
    )
    return workload, predictions


def write_report(report: MetricReport, path: str | Path) -> None:
    try:
        checked = MetricReport.model_validate(report.model_dump())
    except ValidationError as e:
        raise InvariantError(f"report '{report.metric_name}' violates its invariants: {e}") from e
    if checked.schema_version != REPORT_SCHEMA_VERSION:
        raise InvariantError(f"unsupported report schema_version {checked.schema_version}")
    try:
        atomic_write_text(path, checked.to_canonical_json())
    except OSError as e:
        raise SaiBenchError(f"failed to write report to {path}: {e}") from e


def read_report(path: str | Path) -> MetricReport:
    path = Path(path)
    try:
        return MetricReport.model_validate_json(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise DataFormatError("report not found", str(path)) from e
    except ValidationError as e:
        raise DataFormatError(f"invalid report: {e}", str(path)) from e
