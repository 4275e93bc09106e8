import json
import logging

from pydantic import BaseModel, Field

from core import UsageError, atomic_write_text, canonical_dumps, read_report
from harness import trace_errors
from state import State

logger = logging.getLogger(__name__)


class TraceContext(BaseModel):
    reports: list[str] = Field(..., min_length=1, description="[name=]path of each report")
    pairs: list[str] = Field(..., min_length=1, description="x:y column pairs to correlate")
    name: str = "trace"


def _parse_pair(pair: str) -> tuple[str, str]:
    x, sep, y = pair.partition(":")
    if not sep or not x or not y:
        raise UsageError(f"Invalid pair '{pair}'. Use x:y format.")
    return x, y


async def handle_trace(state: State, context: TraceContext) -> int:
    named = {}
    for item in context.reports:
        name, sep, path = item.partition("=")
        report = read_report(path if sep else name)
        key = name if sep else report.metric_name
        if key in named:
            raise UsageError(f"Report name '{key}' given twice; use name=path to disambiguate")
        named[key] = report

    result = trace_errors(named, [_parse_pair(pair) for pair in context.pairs])
    out_dir = state.output_dir
    atomic_write_text(out_dir / f"{context.name}.json", canonical_dumps(result.model_dump(mode="json")))
    atomic_write_text(out_dir / f"{context.name}_table.csv", result.table.to_csv())
    logger.info(f"Joined {len(result.table.ids)} samples across {len(result.table.columns)} reports")

    for corr in result.correlations:
        if state.json_output:
            print(json.dumps(corr.model_dump(mode="json"), sort_keys=True))
        else:
            print(
                f"{corr.y_name} vs {corr.x_name}: r={corr.pearson_r:.4f} "
                f"slope={corr.slope:.6g} intercept={corr.intercept:.6g} (n={corr.n})"
            )
    return 0
