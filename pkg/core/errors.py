class SaiBenchError(Exception):
    """Root of every error raised by the toolkit."""


class DataFormatError(SaiBenchError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class InvariantError(SaiBenchError):
    pass


class SliceError(SaiBenchError):
    pass


class OutOfRangeError(SliceError):
    def __init__(self, message: str, ids: list[int]):
        super().__init__(f"{message}: ids {ids}")
        self.ids = ids


class InsufficientPopulationError(SliceError):
    pass


class MetricInputError(SaiBenchError):
    pass


class UsageError(SaiBenchError):
    """Bad command-line arguments or configuration values."""


class PlanValidationError(SaiBenchError):
    pass


class PredictorError(SaiBenchError):
    def __init__(self, message: str, run_id: str | None = None):
        super().__init__(f"[{run_id}] {message}" if run_id else message)
        self.run_id = run_id


class ProtocolError(PredictorError):
    pass


class PredictorTimeoutError(PredictorError):
    pass


class RenderError(SaiBenchError):
    pass
