import json
from collections.abc import Iterable
from typing import Any

from core import UsageError


def parse_input_string(value: str) -> Any:
    """Parse a command-line value that may be JSON (number, bool, null, list, object) or a plain string.

    Args:
        value (str): The input string to parse.

    Returns:
        Any: The decoded JSON value, or the stripped string when it is not valid JSON.
    """
    value = value.strip()
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        return value


def parse_key_values(items: Iterable[str] | None) -> dict[str, Any]:
    """Turn ``key=value`` items into a dict; dotted keys build nested dicts."""
    result: dict[str, Any] = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"Invalid parameter format: {item}. Use key=value format.")
        key, raw = item.split("=", 1)
        path = key.strip().split(".")
        if not all(path):
            raise UsageError(f"Invalid parameter key: {key!r}")
        target = result
        for part in path[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise UsageError(f"Parameter {key!r} conflicts with an earlier value")
        target[path[-1]] = parse_input_string(raw)
    return result


def parse_json_argument(value: str, name: str) -> Any:
    try:
        return json.loads(value)
    except json.JSONDecodeError as e:
        raise UsageError(f"{name} must be JSON: {e.msg}") from e
