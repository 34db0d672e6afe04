"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: validation-type errors exit with 1,
``CapExceeded`` with 2 and ``TheoremFalsified`` with 3.
"""

from __future__ import annotations


class IndepForgeError(Exception):
    """Base class for every error raised by indepforge."""


class ValidationError(IndepForgeError):
    """An input document or object failed validation.

    ``pointer`` is a JSON pointer into the instance document when known.
    """

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer}: {message}" if pointer else message)
        self.pointer = pointer
        self.detail = message


class ParseError(ValidationError):
    """A polynomial string could not be parsed."""

    def __init__(self, message: str, text: str = "", position: int = -1, pointer: str = ""):
        self.text = text
        self.position = position
        self.token = None
        if 0 <= position < len(text):
            self.token = text[position:].split()[0] if text[position:].strip() else None
        where = f" at column {position}" if position >= 0 else ""
        super().__init__(f"{message}{where}", pointer)


class CapExceeded(IndepForgeError):
    """A configured size cap (dimension, sequence length, subsets) was hit."""


class TheoremFalsified(IndepForgeError):
    """An identity that the theory guarantees did not hold on an instance."""


class Disagreement(TheoremFalsified):
    """Two routes that must agree produced different answers."""


class NotZeroDimensional(ValidationError):
    pass


class NotLocal(ValidationError):
    pass


class RelationViolated(ValidationError):
    def __init__(self, message: str, relation=None):
        super().__init__(message)
        self.relation = relation


class AlgebraMismatch(ValidationError):
    pass


class OwnerMismatch(ValidationError):
    pass


class NotSubmodule(ValidationError):
    pass


class NotContained(ValidationError):
    pass


class NotMinimalGenerators(ValidationError):
    pass


class NotSquareZero(ValidationError):
    pass


class NotInMaximalIdeal(ValidationError):
    pass


class PreconditionFailed(IndepForgeError):
    """A hypothesis of a verification routine does not hold on the input."""


class HypothesisFailed(IndepForgeError):
    """A freeness certificate could not be issued.

    The partially filled certificate is attached as ``certificate``.
    """

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class NoSolution(IndepForgeError):
    """An inductive homotopy step had no solution (independence violated)."""

    def __init__(self, message: str, degree: int):
        super().__init__(message)
        self.degree = degree
