"""Sweep execution: enumerate cells, obtain predictions, compute and store reports."""

import asyncio
import itertools
import logging
import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from core import (
    JetDataset,
    OutputFrames,
    PrecipEvent,
    PredictionSet,
    PredictorError,
    SaiBenchError,
    Sample,
    Trajectory,
    atomic_write_text,
    canonical_dumps,
    load_jet_dataset,
    load_precip_dataset,
    load_predictions,
    load_trajectory,
    read_report,
    sample_id,
    write_report,
)
from metrics import stability_analysis
from sampling import (
    FeatureBins,
    bin_by_scalar,
    derive_seed,
    equalized_bin_sample,
    random_subsample,
    time_window_slice,
    window_grid,
)
from synth import make_toy_predictor, toy_predict
from transforms import rotate_event, rotation_sweep

from .evaluators import STABILITY_METRICS, EvalContext, evaluate, stability_report
from .external import DEFAULT_TIMEOUT_S, run_external_predictor
from .plan import (
    BinRangesAxis,
    ExternalPredictorSpec,
    FilePredictorSpec,
    RepetitionsAxis,
    RotationAxis,
    SubsetSizesAxis,
    SweepPlan,
    ToyPredictorSpec,
    WindowGridAxis,
    resolve_dataset,
)

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
DEFAULT_TEST_WINDOW = (0.9, 0.1)
DEFAULT_POOL_WINDOW = (0.0, 0.9)

Dataset = Trajectory | JetDataset | list[PrecipEvent]


class CellRecord(BaseModel):
    index: int
    coords: dict[str, Any]
    seed: int
    plan_sha256: str = Field(..., description="Hash of the plan that produced the reports")
    status: Literal["ok", "failed"]
    reports: list[str] = Field(default_factory=list, description="Report paths relative to the sweep directory")
    error: str | None = None
    predictor_failed: bool = False
    predictor: str
    wall_time_s: float
    out_of_range_ids: dict[str, list[int]] = Field(
        default_factory=dict, description="Ids per dataset left out because their binned feature is outside the axis"
    )


class SweepResult(BaseModel):
    plan_id: str
    plan_sha256: str
    output_dir: str
    cells: list[CellRecord]

    @property
    def failed(self) -> list[CellRecord]:
        return [cell for cell in self.cells if cell.status == "failed"]


@dataclass
class Cell:
    index: int
    coords: dict[str, Any]
    seed: int
    train: list[Sample]
    test: list[Sample]
    out_of_range_ids: dict[str, list[int]] = field(default_factory=dict)


def load_dataset(workload: str, path: Path) -> Dataset:
    if workload == "md":
        return load_trajectory(path)
    if workload == "jet":
        return load_jet_dataset(path)
    return load_precip_dataset(path)


def samples_of(dataset: Dataset) -> list[Sample]:
    if isinstance(dataset, Trajectory):
        return list(dataset.frames)
    if isinstance(dataset, JetDataset):
        return list(dataset.events)
    return sorted(dataset, key=lambda e: e.event_id)


def _pick(samples: Sequence[Sample], ids: Sequence[int]) -> list[Sample]:
    lookup = {sample_id(s): s for s in samples}
    return [lookup[i] for i in sorted(ids)]


def _window_ids(traj: Trajectory, window: tuple[float, float] | None) -> list[int]:
    return traj.ids if window is None else time_window_slice(traj, *window).sample_ids


def build_cells(plan: SweepPlan, train_data: Dataset | None, test_data: Dataset) -> list[Cell]:
    """Enumerate the sweep cells of a plan in a fixed order; cell i draws with seed derive_seed(plan.seed, i)."""
    axis = plan.axis
    same_source = train_data is None
    train_data = test_data if train_data is None else train_data
    train_samples, test_samples = samples_of(train_data), samples_of(test_data)

    def seed_of(index: int) -> int:
        return derive_seed(plan.seed, index)

    cells: list[Cell] = []
    if isinstance(axis, SubsetSizesAxis):
        if isinstance(train_data, Trajectory):
            pool_window = axis.pool_window or (DEFAULT_POOL_WINDOW if same_source else None)
            test_window = axis.test_window or (DEFAULT_TEST_WINDOW if same_source else None)
            pool = _window_ids(train_data, pool_window)
            test = _pick(test_samples, _window_ids(test_data, test_window))
        else:
            pool = [sample_id(s) for s in train_samples]
            test = test_samples
        for index, size in enumerate(axis.sizes):
            ids = random_subsample(pool, size, seed_of(index), dataset_id="train").sample_ids
            coords = {"size": size, "n_train": len(ids)}
            cells.append(Cell(index, coords, seed_of(index), _pick(train_samples, ids), test))

    elif isinstance(axis, WindowGridAxis):
        test_window = axis.test_window or (DEFAULT_TEST_WINDOW if same_source else None)
        test = _pick(test_samples, _window_ids(test_data, test_window))
        for index, window in enumerate(window_grid(axis.sizes, axis.starts, axis.max_end)):
            ids = time_window_slice(train_data, window.start_frac, window.size_frac).sample_ids
            if axis.sample_count is not None:
                ids = random_subsample(ids, axis.sample_count, seed_of(index), dataset_id="window").sample_ids
            coords = {"start": window.start_frac, "size": window.size_frac, "n_train": len(ids)}
            cells.append(Cell(index, coords, seed_of(index), _pick(train_samples, ids), test))

    elif isinstance(axis, RotationAxis):
        for index, rotated in enumerate(rotation_sweep(test_data, axis.step_deg, axis.count)):
            cells.append(
                Cell(index, {"angle_deg": rotated.angle_deg}, seed_of(index), train_samples, list(rotated.dataset))
            )

    elif isinstance(axis, BinRangesAxis):
        def feature(event: Sample) -> float:
            return event.jet_energy

        out_of_range: dict[str, list[int]] = {}

        def in_range(samples: list[Sample], dataset_id: str) -> list[Sample]:
            kept = [s for s in samples if axis.lo <= feature(s) <= axis.hi]
            dropped = sorted(sample_id(s) for s in samples if not axis.lo <= feature(s) <= axis.hi)
            if dropped:
                logger.warning(f"{len(dropped)} {dataset_id} events fall outside [{axis.lo}, {axis.hi}]: {dropped}")
                out_of_range[dataset_id] = dropped
            return kept

        train_pool, test_pool = in_range(train_samples, "train"), in_range(test_samples, "test")
        train_bins = bin_by_scalar(train_pool, feature, axis.lo, axis.hi, axis.n_bins)
        test_bins = bin_by_scalar(test_pool, feature, axis.lo, axis.hi, axis.n_bins)
        width = (axis.hi - axis.lo) / axis.n_bins
        test_bin_indices = axis.test_bins if axis.test_bins is not None else list(range(axis.n_bins))
        for index, (selection, test_bin) in enumerate(itertools.product(axis.train_selections, test_bin_indices)):
            spec = FeatureBins(lo=axis.lo, hi=axis.hi, n_bins=axis.n_bins, selected=sorted(selection))
            drawn = equalized_bin_sample(train_bins, selection, axis.train_total, seed_of(index), spec, "train")
            ids = drawn.sample_ids
            coords = {
                "train_bins": sorted(selection),
                "test_bin": test_bin,
                "test_range": [axis.lo + test_bin * width, axis.lo + (test_bin + 1) * width],
            }
            test = _pick(test_pool, test_bins[test_bin])
            cells.append(Cell(index, coords, seed_of(index), _pick(train_pool, ids), test, out_of_range))

    elif isinstance(axis, RepetitionsAxis):
        ids = [sample_id(s) for s in test_samples]
        chosen = random_subsample(ids, min(axis.events, len(ids)), plan.seed, dataset_id="test").sample_ids
        train = train_samples if not same_source else []
        for index, event_id in enumerate(chosen):
            cells.append(Cell(index, {"event_id": event_id}, seed_of(index), train, _pick(test_samples, [event_id])))

    for transform in plan.transforms:
        if transform.name == "rotate":
            theta = math.radians(transform.theta_deg)
            for cell in cells:
                cell.test = [rotate_event(event, theta) for event in cell.test]
    return cells


class SweepRunner:
    def __init__(
        self,
        plan: SweepPlan,
        plan_sha256: str,
        base_dir: Path,
        output_root: Path,
        workers: int = 1,
        timeout_s: float = DEFAULT_TIMEOUT_S,
        on_cell: Callable[[CellRecord], None] | None = None,
    ):
        self.plan = plan
        self.plan_sha256 = plan_sha256
        self.base_dir = base_dir
        self.sweep_dir = output_root / plan.sweep_dir_name
        self.workers = workers
        self.timeout_s = timeout_s
        self.on_cell = on_cell
        self._file_predictions: PredictionSet | None = None

    @property
    def predictor_options(self) -> dict[str, Any]:
        spec = self.plan.predictor
        options = dict(getattr(spec, "options", {}))
        if any(t.name == "project_jet_features" for t in self.plan.transforms):
            options["features"] = "projected"
        return options

    def _record_path(self, index: int) -> Path:
        return self.sweep_dir / "cells" / f"{index:04d}.json"

    def _completed(self, cell: Cell) -> CellRecord | None:
        path = self._record_path(cell.index)
        if not path.exists():
            return None
        try:
            record = CellRecord.model_validate_json(path.read_text(encoding="utf-8"))
            if record.status != "ok":
                return None
            if record.plan_sha256 != self.plan_sha256:
                logger.info(f"Recomputing cell {cell.index}: its reports belong to plan {record.plan_sha256[:12]}")
                return None
            for report in record.reports:
                read_report(self.sweep_dir / report)
        except (ValidationError, SaiBenchError, OSError):
            return None
        return record

    async def _predict(self, cell: Cell, seed: int | None, test: list[Sample] | None = None) -> PredictionSet:
        spec = self.plan.predictor
        test = cell.test if test is None else test
        if isinstance(spec, ToyPredictorSpec):
            return await asyncio.to_thread(toy_predict, spec.kind, cell.train, test, seed, self.predictor_options)
        if isinstance(spec, ExternalPredictorSpec):
            return await run_external_predictor(
                spec.command,
                self.plan.workload,
                test,
                train=cell.train,
                options=self.predictor_options,
                seed=seed,
                timeout_s=spec.timeout_s or self.timeout_s,
                log_dir=self.sweep_dir,
                env=spec.env,
                cwd=spec.cwd,
                run_id=f"cell-{cell.index}",
            )
        if self._file_predictions is None:
            _, self._file_predictions = load_predictions(resolve_dataset(self.base_dir, spec.path))
        ids = [sample_id(s) for s in test]
        missing = [i for i in ids if i not in self._file_predictions]
        if missing:
            raise PredictorError(f"predictions file has no entry for ids {missing}", f"cell-{cell.index}")
        predictions = self._file_predictions
        return PredictionSet(
            model_id=predictions.model_id,
            run_id=predictions.run_id,
            seed=predictions.seed,
            entries={i: predictions[i] for i in ids},
        )

    async def _stability_reports(self, cell: Cell) -> list:
        axis = self.plan.axis
        spec = self.plan.predictor
        run_seeds = [derive_seed(cell.seed, run) for run in range(axis.runs)]
        if isinstance(spec, ToyPredictorSpec):
            predictor = make_toy_predictor(spec.kind, self.predictor_options)
            if cell.train:
                await asyncio.to_thread(predictor.fit, cell.train)

            def predict(event, seed):
                return predictor.predict_one(event, seed).frames

        else:
            frames_by_seed = {}
            for run, seed in enumerate(run_seeds):
                try:
                    predictions = await self._predict(cell, seed)
                except PredictorError as e:
                    raise PredictorError(f"run {run}: {e}", f"cell-{cell.index}") from e
                prediction = predictions[sample_id(cell.test[0])]
                frames_by_seed[seed] = prediction.frames if isinstance(prediction, OutputFrames) else None

            def predict(event, seed):
                return frames_by_seed[seed]

        reports = []
        event_id = sample_id(cell.test[0])
        for metric in self.plan.metrics:
            result = await asyncio.to_thread(
                stability_analysis,
                predict,
                cell.test,
                axis.runs,
                STABILITY_METRICS[metric.name],
                axis.lead_times,
                cell.seed,
            )
            reports.append(stability_report(result, event_id))
        return reports

    async def _evaluate(self, cell: Cell) -> list:
        if isinstance(self.plan.axis, RepetitionsAxis):
            return await self._stability_reports(cell)
        predictions = await self._predict(cell, getattr(self.plan.predictor, "seed", None))
        ctx = EvalContext(self.plan.workload, cell.test, predictions, cell.train)
        reports = []
        for metric in self.plan.metrics:
            reports.extend(await asyncio.to_thread(evaluate, ctx, metric.name, metric.params))
        return reports

    async def run_cell(self, cell: Cell, semaphore: asyncio.Semaphore) -> CellRecord:
        existing = self._completed(cell)
        if existing is not None:
            logger.info(f"Skipping cell {cell.index}: already complete")
            return existing
        async with semaphore:
            started = time.perf_counter()
            report_paths, error, predictor_failed = [], None, False
            try:
                for report in await self._evaluate(cell):
                    relative = f"reports/{cell.index:04d}_{report.metric_name}.json"
                    write_report(report, self.sweep_dir / relative)
                    report_paths.append(relative)
            except SaiBenchError as e:
                error = str(e)
                predictor_failed = isinstance(e, PredictorError)
                logger.error(f"Cell {cell.index} failed: {e}")
            record = CellRecord(
                index=cell.index,
                coords=cell.coords,
                seed=cell.seed,
                plan_sha256=self.plan_sha256,
                status="failed" if error else "ok",
                reports=report_paths if not error else [],
                error=error,
                predictor_failed=predictor_failed,
                predictor=self.plan.predictor.identity,
                wall_time_s=time.perf_counter() - started,
                out_of_range_ids=cell.out_of_range_ids,
            )
            atomic_write_text(self._record_path(cell.index), canonical_dumps(record.model_dump(mode="json")))
        return record

    def write_manifest(self, records: list[CellRecord]) -> None:
        manifest = {
            "plan_id": self.plan.plan_id,
            "plan_sha256": self.plan_sha256,
            "workload": self.plan.workload,
            "axis": self.plan.axis.type,
            "out_of_range_ids": records[0].out_of_range_ids if records else {},
            "cells": [
                {"index": r.index, "coords": r.coords, "status": r.status, "reports": r.reports} for r in records
            ],
        }
        atomic_write_text(self.sweep_dir / MANIFEST_NAME, canonical_dumps(manifest))

    async def run(self) -> SweepResult:
        train_ref = self.plan.datasets.train
        test_data = load_dataset(self.plan.workload, resolve_dataset(self.base_dir, self.plan.datasets.test))
        train_data = None
        if train_ref is not None:
            train_data = load_dataset(self.plan.workload, resolve_dataset(self.base_dir, train_ref))
        cells = build_cells(self.plan, train_data, test_data)
        logger.info(f"Plan {self.plan.plan_id}: {len(cells)} cells, {self.workers} worker(s)")

        semaphore = asyncio.Semaphore(self.workers)

        async def run_and_report(cell: Cell) -> CellRecord:
            record = await self.run_cell(cell, semaphore)
            if self.on_cell is not None:
                self.on_cell(record)
            return record

        records = await asyncio.gather(*(run_and_report(cell) for cell in cells))
        self.write_manifest(records)
        return SweepResult(
            plan_id=self.plan.plan_id,
            plan_sha256=self.plan_sha256,
            output_dir=str(self.sweep_dir),
            cells=records,
        )


async def run_plan(
    plan: SweepPlan,
    plan_sha256: str,
    base_dir: Path,
    output_root: Path,
    workers: int = 1,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    on_cell: Callable[[CellRecord], None] | None = None,
) -> SweepResult:
    runner = SweepRunner(plan, plan_sha256, base_dir, output_root, workers, timeout_s, on_cell)
    return await runner.run()
