"""
Exception hierarchy for the LVR toolkit.

Input errors (bad parameters, malformed files, unusable clouds) map to CLI
exit code 2; anything else is treated as an internal failure.
"""


class LVRError(Exception):
    """Base class for every error raised by this package."""

    input_error = False


class ValidationError(LVRError, ValueError):
    """A parameter is out of range. The message names the field."""

    input_error = True

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ParseError(LVRError, ValueError):
    """A data file could not be parsed. The message names the line."""

    input_error = True

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class SingleClassError(LVRError, ValueError):
    """The operation needs points from both classes."""

    input_error = True


class OracleScaleExceeded(LVRError):
    """The exact Čech oracle was asked for more than desk-scale input."""

    input_error = True


class FiltrationOrderError(LVRError):
    """A simplex appears before one of its faces (or a face is missing)."""

    def __init__(self, face: tuple, coface: tuple):
        self.face = face
        self.coface = coface
        super().__init__(f"face {face} does not precede coface {coface}")


class MissingAccuracyError(LVRError, KeyError):
    """The accuracy matrix lacks (model, dataset) entries the report needs."""

    input_error = True

    def __init__(self, missing: list[tuple[str, str]]):
        self.missing = missing
        listed = ", ".join(f"({m}, {d})" for m, d in missing[:20])
        more = f" and {len(missing) - 20} more" if len(missing) > 20 else ""
        super().__init__(f"missing accuracy entries: {listed}{more}")

    def __str__(self) -> str:
        return self.args[0]
