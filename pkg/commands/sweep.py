import json
import logging
from pathlib import Path

from pydantic import BaseModel

from harness import CellRecord, load_plan, run_plan
from state import State

logger = logging.getLogger(__name__)

EXIT_PREDICTOR_FAILURE = 3
EXIT_FAILURE = 1


class SweepContext(BaseModel):
    plan: str


async def handle_sweep(state: State, context: SweepContext) -> int:
    plan, sha = load_plan(context.plan)

    def on_cell(record: CellRecord) -> None:
        if state.json_output:
            line = {
                "cell": record.index,
                "coords": record.coords,
                "status": record.status,
                "reports": record.reports,
                "error": record.error,
            }
            print(json.dumps(line, sort_keys=True), flush=True)
        elif record.status == "failed":
            print(f"cell {record.index} {record.coords}: FAILED ({record.error})", flush=True)
        else:
            print(f"cell {record.index} {record.coords}: ok", flush=True)

    result = await run_plan(
        plan,
        sha,
        Path(context.plan).parent,
        state.output_dir,
        workers=state.config.workers,
        timeout_s=state.config.predictor_timeout_s,
        on_cell=on_cell,
    )

    failed = result.failed
    if not state.json_output:
        ok = len(result.cells) - len(failed)
        print(f"Sweep {plan.plan_id}: {ok}/{len(result.cells)} cells ok -> {result.output_dir}")
    if not failed:
        return 0
    logger.error(f"{len(failed)} cell(s) failed; rerun the same plan to retry them")
    if any(record.predictor_failed for record in failed):
        return EXIT_PREDICTOR_FAILURE
    return EXIT_FAILURE
