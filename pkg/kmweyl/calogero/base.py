"""Abstract base class for Calogero potentials."""

from abc import ABC, abstractmethod
from typing import Dict, Mapping, Optional, Sequence

from kmweyl.logger import get_logger
from kmweyl.roots import LatticeEmbedding, build_embedding


class BasePotential(ABC):
    """Abstract base class for potentials on the ambient space.

    A potential is a function of an ambient point q for one fixed lattice
    embedding. Concrete implementations either sum explicit inverse-square
    terms or evaluate a closed form of an infinite orbit sum.
    """

    def __init__(
        self,
        embedding: LatticeEmbedding,
        coupling: float = 1.0,
        couplings: Optional[Mapping[str, float]] = None,
    ) -> None:
        """Initialize the potential.

        Args:
            embedding: Lattice embedding fixing the ambient dimension and metric
            coupling: Global coupling constant g
            couplings: Per-term overrides of g, keyed by term name
        """
        self.logger = get_logger(self.__class__.__name__)
        self.embedding = embedding
        self.coupling = coupling
        self.couplings: Dict[str, float] = dict(couplings or {})

    @abstractmethod
    def evaluate(self, q: Sequence[float]) -> float:
        """Value of the potential at an ambient point.

        Args:
            q: Ambient coordinates, already checked for dimension

        Raises:
            PoleEncountered: If q lies on a reflection hyperplane of a term
        """
        pass

    def term_values(self, q: Sequence[float]) -> Dict[str, float]:
        """Named contributions whose sum is the value (empty when not itemized)."""
        return {}

    def is_decoupled(self) -> bool:
        """True when the global coupling and every override vanish."""
        return self.coupling == 0 and not any(self.couplings.values())

    def __call__(self, q: Sequence[float]) -> float:
        """Check the dimension of q and evaluate.

        Raises:
            DimensionMismatch: If q does not have the ambient dimension
        """
        self.embedding.check_ambient(q, "Point q")
        if self.is_decoupled():
            return 0.0
        return self.evaluate(tuple(float(x) for x in q))


def a2m2_embedding() -> LatticeEmbedding:
    """Embedding of (A_2)_-2, the ambient space of all closed-form potentials."""
    return build_embedding(2, 2)
