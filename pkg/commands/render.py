import json

from pydantic import BaseModel, Field

from core import read_report
from harness import render_report
from state import State


class RenderContext(BaseModel):
    reports: list[str] = Field(..., min_length=1)
    kind: str
    title: str | None = None
    name: str | None = None


async def handle_render(state: State, context: RenderContext) -> int:
    reports = [read_report(path) for path in context.reports]
    chart = render_report(reports, context.kind, context.title)
    stem = context.name or f"{reports[0].metric_name}_{context.kind}"
    svg_path, csv_path = chart.write(state.output_dir / stem)
    if state.json_output:
        print(json.dumps({"kind": context.kind, "svg": svg_path.as_posix(), "csv": csv_path.as_posix()}))
    else:
        print(f"Wrote {svg_path} and {csv_path}")
    return 0
