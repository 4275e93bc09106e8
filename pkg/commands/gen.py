import json
import logging
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from core import UsageError, write_jet_dataset, write_precip_dataset, write_trajectory
from state import State
from synth import JetToyParams, MdToyParams, PrecipToyParams, gen_jet_toy, gen_md_toy, gen_precip_dataset

logger = logging.getLogger(__name__)

DEFAULT_NAMES = {"md": "md_toy", "jet": "jet_toy", "precip": "precip_toy"}
DEFAULT_EVENTS = {"jet": 1000, "precip": 20}


class GenContext(BaseModel):
    workload: Literal["md", "jet", "precip"]
    params: dict[str, Any] = Field(default_factory=dict)
    name: str | None = None

    @property
    def stem(self) -> str:
        return self.name or DEFAULT_NAMES[self.workload]


async def handle_gen(state: State, context: GenContext) -> int:
    params = dict(context.params)
    seed = state.seed if state.seed is not None else params.pop("seed", 0)
    params.pop("seed", None)
    out_dir = state.output_dir

    try:
        if context.workload == "md":
            trajectory = gen_md_toy(MdToyParams(**params, seed=seed))
            path = out_dir / f"{context.stem}.jsonl"
            write_trajectory(trajectory, path)
            count = len(trajectory)
        elif context.workload == "jet":
            n_events = int(params.pop("n_events", DEFAULT_EVENTS["jet"]))
            dataset = gen_jet_toy(n_events, seed, JetToyParams(**params))
            path = out_dir / f"{context.stem}.jsonl"
            write_jet_dataset(dataset, path)
            count = len(dataset)
        else:
            n_events = int(params.pop("n_events", DEFAULT_EVENTS["precip"]))
            events = gen_precip_dataset(n_events, PrecipToyParams(**params, seed=seed))
            path = out_dir / f"{context.stem}.json"
            write_precip_dataset(events, path)
            count = len(events)
    except (ValidationError, TypeError) as e:
        raise UsageError(f"Invalid {context.workload} generator parameters: {e}") from e

    logger.info(f"Generated {count} {context.workload} samples with seed {seed}")
    if state.json_output:
        print(json.dumps({"workload": context.workload, "samples": count, "path": path.as_posix()}))
    else:
        print(f"Wrote {count} samples to {path}")
    return 0
