"""Custom exceptions with helpful error messages for the kmweyl package."""

from typing import List, Optional, Sequence


class KmWeylError(Exception):
    """Base exception for all kmweyl errors."""

    pass


class InputError(KmWeylError):
    """Base for errors caused by invalid user input (CLI exit code 2)."""

    pass


class ComputationError(KmWeylError):
    """Base for errors raised while computing a result (CLI exit code 3)."""

    pass


class InvalidAlgebraSpec(InputError):
    """Raised when an algebra string such as 'a2m2' cannot be parsed."""

    def __init__(self, spec: str, expected_format: str = "aNmM"):
        self.spec = spec
        self.expected_format = expected_format
        super().__init__(
            f"Algebra '{spec}' has invalid format. "
            f"Expected: '{expected_format}' (e.g. a2m2, a3m2, a2m0), got: '{spec}'"
        )


class InvalidWordFormat(InputError):
    """Raised when a Weyl word or integer vector string cannot be parsed."""

    def __init__(self, text: str, expected_format: str = "comma-separated integers"):
        self.text = text
        self.expected_format = expected_format
        super().__init__(
            f"Could not parse '{text}'. Expected: {expected_format}, "
            f"for example '0,1,2' or '-2,-1,0'"
        )


class UnknownNodeLabel(InputError):
    """Raised when a node label is not part of the diagram."""

    def __init__(self, label: int, available_labels: Optional[Sequence[int]] = None):
        self.label = label
        self.available_labels = list(available_labels or [])

        message = f"Node label {label} is not part of the diagram."
        if self.available_labels:
            labels = ", ".join(str(lab) for lab in self.available_labels)
            message += f" Available labels: {labels}."

        super().__init__(message)


class DimensionMismatch(InputError):
    """Raised when a vector or matrix has the wrong size for the algebra."""

    def __init__(self, what: str, expected: int, got: int):
        self.what = what
        self.expected = expected
        self.got = got
        super().__init__(
            f"{what} has dimension {got}, expected {expected}. "
            f"Check the algebra the vector belongs to."
        )


class InvalidBounds(InputError):
    """Raised when enumeration bounds are malformed."""

    def __init__(self, bounds: str, reason: str):
        self.bounds = bounds
        self.reason = reason
        super().__init__(f"Invalid bounds '{bounds}': {reason}.")


class UnsupportedDiagram(InputError):
    """Raised when a diagram is outside the A-series or a command's domain."""

    def __init__(self, n: int, m: int, reason: str):
        self.n = n
        self.m = m
        self.reason = reason
        super().__init__(f"Cannot build (A_{n})_-{m}: {reason}.")


class InvalidFactorization(InputError):
    """Raised when a bicoloured factor contains two adjacent (non-commuting) nodes."""

    def __init__(self, word: Sequence[int], first: int, second: int):
        self.word = list(word)
        self.first = first
        self.second = second
        super().__init__(
            f"Factor {self.word} contains adjacent nodes {first} and {second}. "
            f"Each factor must consist of pairwise commuting reflections."
        )


class ConfigurationError(InputError):
    """Raised when a configuration file cannot be read or validated."""

    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"Invalid configuration in '{path}': {detail}")


class NoRecurrenceFound(ComputationError):
    """Raised when no linear recurrence of admissible order fits a sequence."""

    def __init__(self, length: int, max_order: int):
        self.length = length
        self.max_order = max_order
        super().__init__(
            f"No linear recurrence of order <= {max_order} fits the {length} "
            f"supplied terms. Supply a longer sequence."
        )


class IllConditioned(ComputationError):
    """Raised when a closed form fails to reproduce its own sequence."""

    def __init__(self, residual: float, tolerance: float):
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"Closed form residual {residual:.3e} exceeds tolerance "
            f"{tolerance:.1e}. The characteristic roots may be too close together."
        )


class PoleEncountered(ComputationError):
    """Raised when a potential term or special function is evaluated at a pole."""

    def __init__(self, term: str, value: float):
        self.term = term
        self.value = value
        super().__init__(
            f"Pole encountered in term '{term}' (denominator argument {value!r}). "
            f"Move the point off the reflection hyperplanes."
        )


class BasisTooLarge(ComputationError):
    """Raised when a monomial basis would exceed the configured size limit."""

    def __init__(self, size: int, limit: int):
        self.size = size
        self.limit = limit
        super().__init__(
            f"Monomial basis of size {size} exceeds the limit of {limit}. "
            f"Lower the degree."
        )


class DegenerateEigenbasis(ComputationError):
    """Raised when the Coxeter eigenvector basis is numerically singular."""

    def __init__(self, condition: float, limit: float):
        self.condition = condition
        self.limit = limit
        super().__init__(
            f"Eigenvector basis condition number {condition:.3e} exceeds {limit:.1e}."
        )


class NotBicolourable(ComputationError):
    """Raised when an operation needs a bicolouration the diagram does not admit."""

    def __init__(self, labels: List[int]):
        self.labels = labels
        super().__init__(
            f"Diagram with labels {labels} contains an odd cycle and cannot be "
            f"bicoloured."
        )
