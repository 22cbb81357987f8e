"""Exception hierarchy.

Every error carries a stable machine-readable ``code`` and an ``exit_code``
used by the command-line front end (2 validation, 3 uncovered point, 4 I/O).
"""

from __future__ import annotations


class HBError(Exception):
    code = "error"
    exit_code = 1


class ValidationError(HBError, ValueError):
    code = "validation"
    exit_code = 2


class InvalidPointError(ValidationError):
    code = "invalid-point"


class OutOfChartError(ValidationError):
    code = "out-of-chart"


class InvalidNodeSetError(ValidationError):
    code = "invalid-node-set"


class ConfigurationError(ValidationError):
    code = "configuration"


class InconsistentDataError(ValidationError):
    code = "inconsistent-data"


class InvalidIndexError(ValidationError):
    code = "invalid-index"


class OrderExceededError(ValidationError):
    code = "order-exceeded"


class UnknownFunctionError(ValidationError):
    code = "unknown-function"


class StepTooLargeError(ValidationError):
    code = "step-too-large"


class ParseError(ValidationError):
    code = "parse"

    def __init__(self, message, field=None, line=None):
        where = []
        if field is not None:
            where.append(f"field {field!r}")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.field = field
        self.line = line


class UncoveredPointError(HBError):
    """No node lies within the localization radius of an evaluation point.

    ``indices`` is filled in by batch evaluation with the positions of all
    offending points in the input list.
    """

    code = "uncovered-point"
    exit_code = 3

    def __init__(self, point=None, delta=None, indices=None, message=None):
        self.point = point
        self.delta = delta
        self.indices = list(indices) if indices is not None else []
        if message is None:
            message = f"no node within delta={delta!r} of point {point!r}"
            if self.indices:
                message += f"; offending point indices: {self.indices}"
        super().__init__(message)


class FileIOError(HBError, OSError):
    code = "io"
    exit_code = 4
