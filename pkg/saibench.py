import argparse
import asyncio
import logging
import os
import sys
from collections.abc import Mapping, Sequence
from importlib import metadata

from pydantic import ValidationError

from commands.eval import EvalCommandContext, handle_eval
from commands.gen import GenContext, handle_gen
from commands.render import RenderContext, handle_render
from commands.slice import SliceContext, handle_slice
from commands.sweep import SweepContext, handle_sweep
from commands.trace import TraceContext, handle_trace
from core import PlanValidationError, PredictorError, SaiBenchError, UsageError
from harness import CHART_KINDS
from state import State
from util.parse import parse_json_argument, parse_key_values

EXIT_USAGE = 2
EXIT_PREDICTOR = 3
EXIT_ERROR = 1


def build_parser(version: str) -> argparse.ArgumentParser:
    # Flags shared by every subcommand; None means "not given" so lower layers apply.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with default settings")
    common.add_argument("--seed", type=int, help="Seed for generators and random draws")
    common.add_argument("--out", dest="output_dir", help="Directory that receives every output file")
    common.add_argument("--workers", type=int, help="Number of sweep cells run concurrently")
    common.add_argument("--format", choices=["text", "json"], help="Output format on stdout")
    common.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING or ERROR")
    common.add_argument("--timeout", dest="predictor_timeout_s", type=float, help="External predictor timeout (s)")

    parser = argparse.ArgumentParser(description=f"Structural-interpretation benchmarks for scientific ML (v{version})")
    parser.add_argument("--version", action="version", version=f"saibench {version}")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # saibench gen {md,jet,precip}
    gen_parser = subparsers.add_parser("gen", parents=[common], help="Generate a seeded toy dataset")
    gen_parser.add_argument("workload", choices=["md", "jet", "precip"], help="Dataset family")
    gen_parser.add_argument("--param", action="append", help="Generator parameter (format: key=value)")
    gen_parser.add_argument("--name", help="Output file stem")

    # saibench slice --workload W --dataset PATH --spec JSON
    slice_parser = subparsers.add_parser("slice", parents=[common], help="Select a subset of a dataset")
    slice_parser.add_argument("--workload", required=True, choices=["md", "jet", "precip"])
    slice_parser.add_argument("--dataset", required=True, help="Dataset file (MD/jet JSONL or precip manifest)")
    slice_parser.add_argument("--spec", required=True, help="Slice spec as JSON, e.g. '{\"variant\": \"time_window\"}'")
    slice_parser.add_argument("--predictions", help="Predictions file for threshold_responsive slices")
    slice_parser.add_argument("--total", type=int, help="Equalized draw size across selected feature bins")
    slice_parser.add_argument("--name", default="slice", help="Output file stem")

    # saibench eval --workload W --dataset PATH --predictor JSON --metric NAME
    eval_parser = subparsers.add_parser("eval", parents=[common], help="Run one predictor and compute metrics")
    eval_parser.add_argument("--workload", required=True, choices=["md", "jet", "precip"])
    eval_parser.add_argument("--dataset", required=True, help="Test dataset")
    eval_parser.add_argument("--train", help="Training dataset handed to the predictor")
    eval_parser.add_argument(
        "--predictor", required=True, help='Predictor as JSON: {"toy": KIND}, {"external": CMD} or {"file": PATH}'
    )
    eval_parser.add_argument("--metric", action="append", required=True, help="Metric name (repeatable)")
    eval_parser.add_argument("--param", action="append", help="Metric parameter (format: metric.key=value)")

    # saibench sweep --plan PATH
    sweep_parser = subparsers.add_parser("sweep", parents=[common], help="Run every cell of a sweep plan")
    sweep_parser.add_argument("--plan", required=True, help="Sweep plan JSON file")

    # saibench trace --report [name=]PATH --pair x:y
    trace_parser = subparsers.add_parser("trace", parents=[common], help="Correlate per-sample metric reports")
    trace_parser.add_argument("--report", action="append", required=True, help="Report file (format: [name=]path)")
    trace_parser.add_argument("--pair", action="append", required=True, help="Columns to correlate (format: x:y)")
    trace_parser.add_argument("--name", default="trace", help="Output file stem")

    # saibench render --report PATH --kind KIND
    render_parser = subparsers.add_parser("render", parents=[common], help="Render reports to SVG and CSV")
    render_parser.add_argument("--report", action="append", required=True, help="Report file (repeatable)")
    render_parser.add_argument("--kind", required=True, choices=list(CHART_KINDS))
    render_parser.add_argument("--title", help="Chart title")
    render_parser.add_argument("--name", help="Output file stem")

    return parser


async def async_main(argv: Sequence[str] | None, env: Mapping[str, str]) -> int:
    try:
        version = metadata.version("saibench")
    except metadata.PackageNotFoundError:
        version = "unknown"

    parser = build_parser(version)
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    flags = {
        "output_dir": args.output_dir,
        "workers": args.workers,
        "format": args.format,
        "log_level": args.log_level,
        "predictor_timeout_s": args.predictor_timeout_s,
        "seed": args.seed,
    }
    state = State.resolve(flags, env, args.config)
    state.configure_logging()

    if args.command == "gen":
        context = GenContext(workload=args.workload, params=parse_key_values(args.param), name=args.name)
        return await handle_gen(state, context)

    if args.command == "slice":
        context = SliceContext(
            workload=args.workload,
            dataset=args.dataset,
            spec=parse_json_argument(args.spec, "--spec"),
            predictions=args.predictions,
            total=args.total,
            name=args.name,
        )
        return await handle_slice(state, context)

    if args.command == "eval":
        predictor = parse_json_argument(args.predictor, "--predictor")
        if not isinstance(predictor, dict):
            raise UsageError("--predictor must be a JSON object")
        context = EvalCommandContext(
            workload=args.workload,
            dataset=args.dataset,
            train=args.train,
            predictor=predictor,
            metrics=args.metric,
            params=parse_key_values(args.param),
        )
        return await handle_eval(state, context)

    if args.command == "sweep":
        return await handle_sweep(state, SweepContext(plan=args.plan))

    if args.command == "trace":
        return await handle_trace(state, TraceContext(reports=args.report, pairs=args.pair, name=args.name))

    context = RenderContext(reports=args.report, kind=args.kind, title=args.title, name=args.name)
    return await handle_render(state, context)


def main(argv: Sequence[str] | None = None, env: Mapping[str, str] | None = None) -> int:
    """Entry point for the saibench command; returns the process exit code."""
    env = os.environ if env is None else env
    try:
        return asyncio.run(async_main(argv, env))
    except (UsageError, PlanValidationError, ValidationError) as e:
        logging.error(f"Error: {e}")
        return EXIT_USAGE
    except PredictorError as e:
        logging.error(f"Predictor failed: {e}")
        return EXIT_PREDICTOR
    except SaiBenchError as e:
        logging.error(f"Error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
