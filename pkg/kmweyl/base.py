"""Base classes for the kmweyl value types."""

from typing import Any, Self, Sequence, Tuple

import numpy as np
import sympy as sp
from pydantic import BaseModel, ConfigDict, model_validator

from kmweyl.exceptions import DimensionMismatch, UnknownNodeLabel


class FrozenModel(BaseModel):
    """Immutable, hashable pydantic model shared by all value types."""

    model_config = ConfigDict(frozen=True)


class LabelledMatrix(FrozenModel):
    """Square integer matrix whose rows and columns are indexed by node labels.

    Labels are stored in the fixed order -m, ..., -1, 0, 1, ..., n and every
    matrix or vector in the package uses that order.
    """

    labels: Tuple[int, ...]
    entries: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_shape(self) -> "LabelledMatrix":
        size = len(self.labels)
        if len(set(self.labels)) != size:
            raise ValueError(f"labels must be distinct, got {self.labels}")
        if len(self.entries) != size:
            raise ValueError(f"expected {size} rows, got {len(self.entries)}")
        for row in self.entries:
            if len(row) != size:
                raise ValueError(f"expected rows of length {size}, got {len(row)}")
        return self

    @property
    def rank(self) -> int:
        """Number of nodes (rows)."""
        return len(self.labels)

    def index(self, label: int) -> int:
        """Position of a node label in the fixed label order.

        Raises:
            UnknownNodeLabel: If the label is not part of the matrix
        """
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownNodeLabel(label, self.labels) from None

    def entry(self, row_label: int, column_label: int) -> int:
        """Entry addressed by node labels."""
        return self.entries[self.index(row_label)][self.index(column_label)]

    @classmethod
    def from_array(
        cls, labels: Sequence[int], array: np.ndarray[Any, Any], **fields: Any
    ) -> Self:
        """Build from a square array of integers (object or integer dtype)."""
        entries = tuple(tuple(int(x) for x in row) for row in array)
        return cls(labels=tuple(labels), entries=entries, **fields)

    def as_array(self) -> np.ndarray[Any, Any]:
        """Exact integer array (object dtype keeps arbitrary precision)."""
        return np.array(self.entries, dtype=object)

    def as_sympy(self) -> sp.ImmutableMatrix:
        """Exact sympy matrix."""
        return sp.ImmutableMatrix(self.entries)

    def check_vector(self, coeffs: Tuple[int, ...], what: str = "Root vector") -> None:
        """Raise DimensionMismatch unless the vector has one entry per label."""
        if len(coeffs) != self.rank:
            raise DimensionMismatch(what, self.rank, len(coeffs))
