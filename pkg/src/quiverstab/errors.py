"""Exception hierarchy.  Every error carries the CLI exit code it maps to."""

from __future__ import annotations


class QuiverStabError(Exception):
    """Base class; ``code`` is a short machine-readable tag."""

    exit_code = 1
    code = "domain_error"


class ParseError(QuiverStabError):
    code = "syntax_error"

    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class SemanticError(ParseError):
    code = "semantic_error"


class ShapeError(QuiverStabError):
    code = "shape_mismatch"


class RelationError(QuiverStabError):
    """A relation does not evaluate to zero.  ``residual`` is the offending matrix."""

    code = "relation_violated"

    def __init__(self, message: str, relation_index: int, residual):
        self.relation_index = relation_index
        self.residual = residual
        super().__init__(message)


class DimensionMismatch(QuiverStabError):
    code = "dimension_mismatch"


class IncompatibleError(QuiverStabError):
    """Objects built over different presentations or primes."""

    code = "incompatible"


class UnsupportedError(QuiverStabError):
    code = "unsupported"


class ClassMismatch(QuiverStabError):
    code = "class_mismatch"


class NotSemistableError(QuiverStabError):
    code = "not_semistable"


class DegreeError(QuiverStabError):
    code = "degree_pattern"


class InfeasibleError(QuiverStabError):
    code = "infeasible"


class CapExceeded(QuiverStabError):
    exit_code = 2
    code = "cap_exceeded"

    def __init__(self, message: str, partial: int | None = None):
        self.partial = partial
        super().__init__(message)


class InvariantViolation(QuiverStabError):
    exit_code = 3
    code = "invariant_violation"

    def __init__(self, message: str, witnesses=None):
        self.witnesses = witnesses
        super().__init__(message)


class ParamsError(QuiverStabError):
    """Stability parameters outside Lambda or Theta_v."""

    code = "invalid_params"
