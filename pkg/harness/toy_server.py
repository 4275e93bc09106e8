"""Serve a toy predictor over the stdio protocol: ``python -m harness.toy_server <kind>``."""

import argparse
import json
import logging
import sys
from typing import Any, TextIO

from core import SaiBenchError, decode_training_sample, encode_prediction
from synth import TOY_PREDICTORS, ToyPredictor, make_toy_predictor


def _write(stdout: TextIO, message: dict[str, Any]) -> None:
    stdout.write(json.dumps(message, separators=(",", ":"), allow_nan=False) + "\n")
    stdout.flush()


def serve(kind: str, stdin: TextIO, stdout: TextIO) -> int:
    predictor: ToyPredictor | None = None
    workload = None
    seed = None
    for line in stdin:
        if not line.strip():
            continue
        message = json.loads(line)
        message_type = message.get("type")
        if message_type == "hello":
            workload = message["workload"]
            seed = message.get("seed")
            predictor = make_toy_predictor(kind, message.get("options"))
            if predictor.workload != workload:
                _write(stdout, {"type": "error", "message": f"{kind} cannot serve the {workload} workload"})
                return 1
            _write(stdout, {"type": "ack"})
        elif predictor is None:
            _write(stdout, {"type": "error", "message": "hello expected first"})
            return 1
        elif message_type == "fit":
            samples = [decode_training_sample(workload, s["id"], s) for s in message["samples"]]
            try:
                predictor.fit(samples)
            except SaiBenchError as e:
                _write(stdout, {"type": "error", "message": str(e)})
                return 1
            _write(stdout, {"type": "fitted"})
        elif message_type == "predict":
            sample = decode_training_sample(workload, message["id"], {"input": message["input"]})
            try:
                prediction = predictor.predict_one(sample, seed)
            except SaiBenchError as e:
                _write(stdout, {"type": "error", "id": message["id"], "message": str(e)})
                continue
            _write(stdout, {"type": "result", "id": message["id"], "output": encode_prediction(prediction)})
        elif message_type == "shutdown":
            return 0
        else:
            logging.warning(f"Ignoring message of type {message_type!r}")
    return 0


def main() -> int:
    parser = argparse.ArgumentParser(description="Toy predictor speaking the saibench stdio protocol")
    parser.add_argument("kind", choices=sorted(TOY_PREDICTORS))
    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING, format="%(message)s", stream=sys.stderr, force=True)
    return serve(args.kind, sys.stdin, sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
