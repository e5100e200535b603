"""Exception hierarchy shared across the toolkit.

Exit-code mapping used by the CLI: ParameterError -> 2, StageError -> 3.
"""


class ObskeyError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(ObskeyError, ValueError):
    """A precondition on user-supplied parameters was violated."""


class StageError(ObskeyError, RuntimeError):
    """A pipeline stage failed at runtime."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")


class ReconciliationInfeasibleError(StageError):
    """Measured mismatch rate exceeds what the supported code set can correct."""

    def __init__(self, bmr, message=None):
        self.bmr = bmr
        super().__init__(
            "reconciliation", message or f"mismatch rate {bmr:.4f} beyond code capability"
        )


class KeyTooShortError(StageError):
    """Reconciled key shorter than the leakage-compensated minimum length."""

    def __init__(self, length, required):
        self.length = length
        self.required = required
        super().__init__(
            "privacy_amplification",
            f"key length {length} below required minimum {required}",
        )


class TraceFormatError(ObskeyError, ValueError):
    """A persisted trace or artifact file failed to parse."""

    def __init__(self, path, line_no, message):
        self.path = path
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")
