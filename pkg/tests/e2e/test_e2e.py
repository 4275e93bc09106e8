import hashlib
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import pytest

ECHO_PREDICTOR = Path(__file__).parent.parent / "echo_predictor.py"


class TestCLI:
    @pytest.fixture
    def workdir(self):
        """Create a temporary working directory for CLI runs."""
        with tempfile.TemporaryDirectory() as temp_dir:
            yield Path(temp_dir)

    def run_cli(self, args, cwd=None):
        """Run the CLI and return result."""
        cli_path = Path(__file__).parent.parent.parent / "saibench.py"
        cmd = [sys.executable, str(cli_path)] + args
        return subprocess.run(cmd, cwd=cwd, capture_output=True, text=True)

    def gen_md(self, workdir, n_frames=200, out="data", seed=1):
        args = ["gen", "md", "--param", f"n_frames={n_frames}", "--seed", str(seed), "--out", out]
        result = self.run_cli(args, workdir)
        assert result.returncode == 0, result.stderr
        return workdir / out / "md_toy.jsonl"

    def write_plan(self, workdir, plan):
        path = workdir / "plan.json"
        path.write_text(json.dumps(plan, indent=2))
        return path

    def test_help(self, workdir):
        """Every subcommand prints help and exits cleanly."""
        for command in ["gen", "slice", "eval", "sweep", "trace", "render"]:
            result = self.run_cli([command, "--help"], workdir)
            assert result.returncode == 0
            assert "usage:" in result.stdout

    def test_no_command_shows_help(self, workdir):
        result = self.run_cli([], workdir)
        assert result.returncode == 2
        assert "Available commands" in result.stderr

    def test_gen_is_reproducible(self, workdir):
        """Same seed and parameters give byte-identical files."""
        first = self.gen_md(workdir, n_frames=50, out="a").read_bytes()
        second = self.gen_md(workdir, n_frames=50, out="b").read_bytes()
        assert first == second
        assert len(first.splitlines()) == 50
        assert self.gen_md(workdir, n_frames=50, out="c", seed=2).read_bytes() != first

    def test_gen_json_output_and_bad_params(self, workdir):
        result = self.run_cli(
            ["gen", "precip", "--param", "n_events=2", "--param", "output_len=4", "--format", "json"], workdir
        )
        assert result.returncode == 0, result.stderr
        line = json.loads(result.stdout)
        assert line["samples"] == 2
        assert (workdir / line["path"]).exists()
        assert (workdir / "out" / "precip_toy_000001.saib").exists()

        result = self.run_cli(["gen", "md", "--param", "n_frames=0"], workdir)
        assert result.returncode == 2
        assert "Invalid md generator parameters" in result.stderr

        result = self.run_cli(["gen", "md", "--param", "n_frames"], workdir)
        assert result.returncode == 2

    def test_sweep_trace_render_pipeline(self, workdir):
        """gen -> sweep -> trace -> render on the toy MD workload."""
        self.gen_md(workdir)
        plan = {
            "plan_id": "md_windows",
            "workload": "md",
            "datasets": {"test": "data/md_toy.jsonl"},
            "axis": {"type": "window_grid", "sizes": [0.3, 0.6, 0.9], "starts": [0.0]},
            "predictor": {"toy": "knn_forces"},
            "metrics": [{"name": "force_mae"}, {"name": "error_scatter"}],
        }
        plan_path = self.write_plan(workdir, plan)

        result = self.run_cli(["sweep", "--plan", str(plan_path), "--format", "json", "--workers", "2"], workdir)
        assert result.returncode == 0, result.stderr
        lines = [json.loads(line) for line in result.stdout.splitlines()]
        assert sorted(line["cell"] for line in lines) == [0, 1, 2]
        assert all(line["status"] == "ok" for line in lines)

        sweep_dir = workdir / "out" / "md_windows"
        manifest = json.loads((sweep_dir / "manifest.json").read_text())
        assert len(manifest["cells"]) == 3
        assert manifest["plan_sha256"] == hashlib.sha256(plan_path.read_bytes()).hexdigest()

        reports = sweep_dir / "reports"
        result = self.run_cli(
            [
                "trace",
                "--report",
                str(reports / "0000_force_abs_error.json"),
                "--report",
                str(reports / "0000_energy_abs_error.json"),
                "--pair",
                "force_abs_error:energy_abs_error",
                "--out",
                "traced",
            ],
            workdir,
        )
        assert result.returncode == 0, result.stderr
        assert "energy_abs_error vs force_abs_error: r=" in result.stdout
        traced = json.loads((workdir / "traced" / "trace.json").read_text())
        assert traced["correlations"][0]["n"] == 20
        assert (workdir / "traced" / "trace_table.csv").read_text().startswith("id,force_abs_error,energy_abs_error")

        for _ in range(2):
            result = self.run_cli(
                ["render", "--report", str(reports / "0002_force_mae.json"), "--kind", "histogram", "--out", "charts"],
                workdir,
            )
            assert result.returncode == 0, result.stderr
        svg = workdir / "charts" / "force_mae_histogram.svg"
        assert svg.read_text().startswith("<svg")

    def test_invalid_plan_exits_2(self, workdir):
        plan_path = self.write_plan(workdir, {"plan_id": "broken", "workload": "md"})
        result = self.run_cli(["sweep", "--plan", str(plan_path)], workdir)
        assert result.returncode == 2
        assert "Error:" in result.stderr

    def test_failed_predictor_exits_3(self, workdir):
        self.gen_md(workdir, n_frames=40)
        plan = {
            "plan_id": "echo",
            "workload": "md",
            "datasets": {"test": "data/md_toy.jsonl"},
            "axis": {"type": "subset_sizes", "sizes": [5]},
            "predictor": {"external": [sys.executable, str(ECHO_PREDICTOR), "--fail", "38"]},
            "metrics": [{"name": "force_mae"}],
        }
        result = self.run_cli(["sweep", "--plan", str(self.write_plan(workdir, plan))], workdir)
        assert result.returncode == 3
        assert "FAILED" in result.stdout

        predictor = json.dumps({"external": [sys.executable, str(ECHO_PREDICTOR), "--fail", "0"]})
        args = ["eval", "--workload", "md", "--dataset", "data/md_toy.jsonl", "--predictor", predictor]
        result = self.run_cli(args + ["--metric", "force_mae"], workdir)
        assert result.returncode == 3
        assert "Predictor failed" in result.stderr

    def test_eval_jets(self, workdir):
        for seed, name in ((0, "train"), (1, "test")):
            args = ["gen", "jet", "--param", "n_events=400", "--seed", str(seed), "--name", name, "--out", "data"]
            assert self.run_cli(args, workdir).returncode == 0
        result = self.run_cli(
            [
                "eval",
                "--workload",
                "jet",
                "--dataset",
                "data/test.jsonl",
                "--train",
                "data/train.jsonl",
                "--predictor",
                '{"toy": "linear_tagger", "options": {"features": "projected"}}',
                "--metric",
                "auc",
                "--metric",
                "accuracy",
                "--format",
                "json",
            ],
            workdir,
        )
        assert result.returncode == 0, result.stderr
        lines = {line["metric"]: line for line in map(json.loads, result.stdout.splitlines())}
        assert lines["auc"]["values"]["auc"] > 0.8
        assert (workdir / "out" / "predictions.jsonl").exists()
        assert (workdir / "out" / "accuracy.json").exists()

    def test_eval_precip_with_params(self, workdir):
        args = ["gen", "precip", "--param", "n_events=3", "--param", "input_len=3", "--param", "output_len=4"]
        assert self.run_cli(args + ["--out", "data"], workdir).returncode == 0
        base = [
            "eval",
            "--workload",
            "precip",
            "--dataset",
            "data/precip_toy.json",
            "--predictor",
            '{"toy": "advection_extrapolator"}',
        ]
        result = self.run_cli(base + ["--metric", "csi", "--param", "csi.threshold=1.0", "--metric", "cucsi"], workdir)
        assert result.returncode == 0, result.stderr
        report = json.loads((workdir / "out" / "csi.json").read_text())
        assert report["params"]["threshold"] == 1.0
        assert report["schema_version"] == 1

        result = self.run_cli(base + ["--metric", "mae", "--param", "csi.threshold=1.0"], workdir)
        assert result.returncode == 2

        result = self.run_cli(base + ["--metric", "auc"], workdir)
        assert result.returncode == 1
        assert "unknown metric" in result.stderr

    def test_slice(self, workdir):
        self.gen_md(workdir, n_frames=100)
        spec = '{"variant": "time_window", "start_frac": 0.2, "size_frac": 0.3}'
        args = ["slice", "--workload", "md", "--dataset", "data/md_toy.jsonl", "--spec", spec, "--format", "json"]
        result = self.run_cli(args, workdir)
        assert result.returncode == 0, result.stderr
        assert json.loads(result.stdout)["samples"] == 30
        sliced = json.loads((workdir / "out" / "slice.json").read_text())
        assert sliced["sample_ids"] == list(range(20, 50))

        result = self.run_cli(args[:-2] + ["--spec", "{bad"], workdir)
        assert result.returncode == 2

    def test_missing_dataset_exits_1(self, workdir):
        args = ["eval", "--workload", "md", "--dataset", "nope.jsonl", "--predictor", '{"toy": "knn_forces"}']
        result = self.run_cli(args + ["--metric", "force_mae"], workdir)
        assert result.returncode == 1
        assert "file not found" in result.stderr
