"""
Exceptions raised by the jet geometry engine

Copyright (c) 2024.
"""


class JetGeoError(Exception):
    """Base class of all engine errors."""


class InputError(JetGeoError, ValueError):
    """Invalid user input (expressions, configs, coordinate changes)."""


class EvaluationError(JetGeoError, ArithmeticError):
    """Numeric evaluation failed."""


class MalformedExpression(InputError):
    pass


class UnknownVariable(InputError):
    pass


class UnboundVariable(InputError):
    pass


class SingularMetric(InputError):
    pass


class DimensionTooLarge(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class SignatureMismatch(InputError):
    pass


class NotProductChange(InputError):
    pass


class JacobianSingular(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class MissingSection(InputError):
    pass


class ConfigSyntax(InputError):
    """Syntax error in a config or change file."""

    def __init__(self, msg: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)


class EvaluationSingularity(EvaluationError):
    pass


class SampleExhausted(EvaluationError):
    pass


class InternalInconsistency(JetGeoError, RuntimeError):
    """Two independent constructions of the same object disagree."""
