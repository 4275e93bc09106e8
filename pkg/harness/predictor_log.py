from collections.abc import Generator
from contextlib import contextmanager
from pathlib import Path
from typing import TextIO

PREDICTOR_LOG_NAME = "predictor.log"


@contextmanager
def open_predictor_log(log_dir: Path | None) -> Generator[TextIO, None, None]:
    """
    Context manager that provides an append-mode log file for predictor stderr output.

    Args:
        log_dir: Directory that receives predictor.log. If None, falls back to the current directory.

    Yields:
        TextIO: File handle passed to the predictor process as its stderr
    """
    log_dir = log_dir or Path.cwd()
    log_dir.mkdir(parents=True, exist_ok=True)
    with open(log_dir / PREDICTOR_LOG_NAME, "a", encoding="utf-8") as errlog:
        yield errlog
