"""Line-delimited JSON protocol for predictors running in their own process.

    harness → {"type": "hello", "workload", "schema_version", "options", "seed"}
    predictor → {"type": "ack"}
    harness → {"type": "fit", "samples": [{"id", "input", "target"}, ...]}     (optional)
    predictor → {"type": "fitted"}
    harness → {"type": "predict", "id", "input"}                               (one per sample)
    predictor → {"type": "result", "id", "output"} | {"type": "error", "id", "message"}
    harness → {"type": "shutdown"}

Responses may arrive in any order and are matched to requests by id. The
predictor exits after shutdown; ids still unanswered at end of stream are a
protocol error.
"""

import asyncio
import json
import logging
import os
from collections.abc import Sequence
from contextlib import AsyncExitStack, asynccontextmanager
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, ValidationError

from core import (
    DataFormatError,
    Prediction,
    PredictionSet,
    PredictorError,
    PredictorTimeoutError,
    ProtocolError,
    Sample,
    Workload,
    decode_prediction,
    encode_input,
    encode_target,
    sample_id,
)

from .predictor_log import open_predictor_log

logger = logging.getLogger(__name__)

PROTOCOL_SCHEMA_VERSION = 1
DEFAULT_TIMEOUT_S = 30.0
# asyncio's default 64 KiB line limit is too small for precipitation frames
STREAM_LIMIT = 1 << 30


class HelloMessage(BaseModel):
    type: Literal["hello"] = "hello"
    workload: Workload
    schema_version: int = PROTOCOL_SCHEMA_VERSION
    options: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None


class ResultMessage(BaseModel):
    type: Literal["result"]
    id: int
    output: dict[str, Any]


class ErrorMessage(BaseModel):
    type: Literal["error"]
    id: int | None = None
    message: str = ""


def _line(message: dict[str, Any]) -> bytes:
    return (json.dumps(message, separators=(",", ":"), allow_nan=False) + "\n").encode("utf-8")


class PredictorProcess:
    """One running predictor; owns its process and pipes for the duration of a session."""

    def __init__(self, process: asyncio.subprocess.Process, command: Sequence[str], timeout_s: float, run_id: str):
        self.process = process
        self.command = list(command)
        self.timeout_s = timeout_s
        self.run_id = run_id

    async def send(self, message: dict[str, Any]) -> None:
        try:
            self.process.stdin.write(_line(message))
            await self.process.stdin.drain()
        except (BrokenPipeError, ConnectionResetError) as e:
            raise ProtocolError(f"predictor closed its input while sending '{message['type']}'", self.run_id) from e

    async def receive(self) -> dict[str, Any] | None:
        """Next message, or None at end of stream."""
        try:
            raw = await asyncio.wait_for(self.process.stdout.readline(), self.timeout_s)
        except TimeoutError as e:
            raise PredictorTimeoutError(f"no response within {self.timeout_s:g} s", self.run_id) from e
        if not raw:
            return None
        try:
            message = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ProtocolError(f"malformed response line: {raw[:200]!r}", self.run_id) from e
        if not isinstance(message, dict) or "type" not in message:
            raise ProtocolError(f"response without a type: {raw[:200]!r}", self.run_id)
        return message

    async def expect(self, expected: str, stage: str) -> dict[str, Any]:
        message = await self.receive()
        if message is None:
            raise ProtocolError(f"{stage} failed: predictor closed its output", self.run_id)
        if message["type"] == "error":
            raise PredictorError(f"{stage} failed: {message.get('message', '')}", self.run_id)
        if message["type"] != expected:
            raise ProtocolError(f"{stage} failed: expected '{expected}', got '{message['type']}'", self.run_id)
        return message

    async def handshake(self, hello: HelloMessage) -> None:
        await self.send(hello.model_dump())
        await self.expect("ack", "handshake")

    async def fit(self, samples: Sequence[Sample]) -> None:
        payload = [{"id": sample_id(s), "input": encode_input(s), "target": encode_target(s)} for s in samples]
        await self.send({"type": "fit", "samples": payload})
        await self.expect("fitted", "fit")

    async def predict(self, workload: Workload, samples: Sequence[Sample]) -> dict[int, Prediction]:
        pending = {sample_id(s) for s in samples}
        if len(pending) != len(samples):
            raise ProtocolError("duplicate sample ids in request batch", self.run_id)
        results: dict[int, Prediction] = {}

        async def write_requests():
            for sample in samples:
                await self.send({"type": "predict", "id": sample_id(sample), "input": encode_input(sample)})
            await self.send({"type": "shutdown"})
            self.process.stdin.close()

        async def read_results():
            while (message := await self.receive()) is not None:
                try:
                    if message["type"] == "error":
                        error = ErrorMessage.model_validate(message)
                        raise PredictorError(f"predictor failed on id {error.id}: {error.message}", self.run_id)
                    result = ResultMessage.model_validate(message)
                except ValidationError as e:
                    raise ProtocolError(f"malformed response: {e}", self.run_id) from e
                if result.id not in pending:
                    reason = "duplicate" if result.id in results else "unknown"
                    raise ProtocolError(f"{reason} response id {result.id}", self.run_id)
                try:
                    results[result.id] = decode_prediction(workload, result.output)
                except DataFormatError as e:
                    raise ProtocolError(f"response {result.id}: {e}", self.run_id) from e
                pending.discard(result.id)

        try:
            async with asyncio.TaskGroup() as group:
                group.create_task(write_requests())
                group.create_task(read_results())
        except ExceptionGroup as group_error:
            raise group_error.exceptions[0] from None

        if pending:
            raise ProtocolError(f"no response for ids {sorted(pending)}", self.run_id)
        return results

    async def wait(self) -> None:
        try:
            code = await asyncio.wait_for(self.process.wait(), self.timeout_s)
        except TimeoutError as e:
            raise PredictorTimeoutError(f"predictor did not exit within {self.timeout_s:g} s", self.run_id) from e
        if code != 0:
            raise PredictorError(f"predictor exited with code {code}", self.run_id)


@asynccontextmanager
async def spawn_predictor(
    command: Sequence[str],
    log_dir: Path | None = None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    env: dict[str, str] | None = None,
    cwd: str | Path | None = None,
    run_id: str = "",
):
    with open_predictor_log(log_dir) as errlog:
        try:
            process = await asyncio.create_subprocess_exec(
                *command,
                stdin=asyncio.subprocess.PIPE,
                stdout=asyncio.subprocess.PIPE,
                stderr=errlog,
                env={**os.environ, **env} if env else None,
                cwd=cwd,
                limit=STREAM_LIMIT,
            )
        except OSError as e:
            raise PredictorError(f"cannot start predictor {list(command)}: {e}", run_id) from e
        logger.debug(f"Started predictor pid {process.pid}: {list(command)}")
        try:
            yield PredictorProcess(process, command, timeout_s, run_id)
        finally:
            if process.returncode is None:
                process.kill()
                await process.wait()


async def run_external_predictor(
    command: Sequence[str],
    workload: Workload,
    requests: Sequence[Sample],
    train: Sequence[Sample] | None = None,
    options: dict[str, Any] | None = None,
    seed: int | None = None,
    timeout_s: float = DEFAULT_TIMEOUT_S,
    log_dir: Path | None = None,
    env: dict[str, str] | None = None,
    cwd: str | Path | None = None,
    run_id: str = "",
) -> PredictionSet:
    """Spawn the predictor, run one hello/fit/predict/shutdown session and collect its predictions."""
    async with AsyncExitStack() as stack:
        predictor = await stack.enter_async_context(
            spawn_predictor(command, log_dir, timeout_s, env=env, cwd=cwd, run_id=run_id)
        )
        await predictor.handshake(HelloMessage(workload=workload, options=options or {}, seed=seed))
        if train:
            await predictor.fit(train)
        entries = await predictor.predict(workload, requests)
        await predictor.wait()
    return PredictionSet(model_id=f"external:{' '.join(command)}", run_id=run_id, seed=seed, entries=entries)
