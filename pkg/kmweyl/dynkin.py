"""Extended A-series Dynkin diagrams, Cartan matrices and bicolourations."""

from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import model_validator

from kmweyl.base import FrozenModel, LabelledMatrix
from kmweyl.exceptions import UnsupportedDiagram
from kmweyl.logger import get_logger

logger = get_logger("dynkin")

EIGEN_TOLERANCE = 1e-9


class CartanMatrix(LabelledMatrix):
    """Symmetric Cartan matrix of a simply-laced diagram.

    K_ii = 2, K_ij = K_ji in {0, -1}. The matrix doubles as the inner-product
    form on root coefficient vectors.
    """

    @model_validator(mode="after")
    def _check_cartan(self) -> "CartanMatrix":
        for i, row in enumerate(self.entries):
            if row[i] != 2:
                raise ValueError(f"diagonal entry {i} is {row[i]}, expected 2")
            for j, value in enumerate(row):
                if i == j:
                    continue
                if value not in (0, -1):
                    raise ValueError(
                        f"off-diagonal entry ({i},{j}) is {value}, expected 0 or -1"
                    )
                if value != self.entries[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i},{j})")
        return self

    def neighbours(self, label: int) -> Tuple[int, ...]:
        """Labels joined to `label` by an edge."""
        row = self.entries[self.index(label)]
        return tuple(lab for lab, value in zip(self.labels, row) if value == -1)

    def diagram(self) -> "DynkinDiagram":
        """Diagram whose Cartan matrix this is."""
        return diagram_from_cartan(self)


class DynkinDiagram(FrozenModel):
    """Simply-laced Dynkin diagram with integer node labels.

    For (A_n)_-m the nodes 0..n form the affine cycle and the over-extension
    chain -1, ..., -m hangs off node 0. `n` and `m` are None for diagrams that
    were not produced by the A-series builders.
    """

    n: Optional[int] = None
    m: Optional[int] = None
    labels: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]

    @model_validator(mode="after")
    def _check_edges(self) -> "DynkinDiagram":
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"labels must be distinct, got {self.labels}")
        seen = set()
        for a, b in self.edges:
            if a not in self.labels or b not in self.labels:
                raise ValueError(f"edge ({a},{b}) has an endpoint outside the labels")
            if a == b:
                raise ValueError(f"self-loop at node {a}")
            key = frozenset((a, b))
            if key in seen:
                raise ValueError(f"duplicate edge ({a},{b}); only single bonds")
            seen.add(key)
        if self.labels and not nx.is_connected(self.graph()):
            components = sorted(
                sorted(component) for component in nx.connected_components(self.graph())
            )
            raise ValueError(f"diagram must be connected, got components {components}")
        return self

    def graph(self) -> nx.Graph:
        """The diagram as an undirected networkx graph."""
        graph = nx.Graph()
        graph.add_nodes_from(self.labels)
        graph.add_edges_from(self.edges)
        return graph

    def is_adjacent(self, a: int, b: int) -> bool:
        """True if nodes a and b are joined by an edge."""
        return (a, b) in self.edges or (b, a) in self.edges

    def cartan_matrix(self) -> CartanMatrix:
        """Cartan matrix in label order: 2 on the diagonal, -1 on edges."""
        position = {label: i for i, label in enumerate(self.labels)}
        size = len(self.labels)
        rows = [[2 if i == j else 0 for j in range(size)] for i in range(size)]
        for a, b in self.edges:
            rows[position[a]][position[b]] = -1
            rows[position[b]][position[a]] = -1
        return CartanMatrix(
            labels=self.labels, entries=tuple(tuple(row) for row in rows)
        )

    def to_json(self) -> str:
        """Serialize as {"n":..,"m":..,"labels":[..],"edges":[[a,b],..]}."""
        return self.model_dump_json()

    @classmethod
    def from_json(cls, text: str) -> "DynkinDiagram":
        """Inverse of to_json."""
        return cls.model_validate_json(text)


class Colour(str, Enum):
    """Node colour of a bicolouration."""

    PLUS = "plus"
    MINUS = "minus"


class Bicolouration(FrozenModel):
    """Proper two-colouring of a diagram: adjacent nodes differ in colour."""

    colour: Dict[int, Colour]

    def nodes(self, colour: Colour) -> Tuple[int, ...]:
        """Sorted labels carrying the given colour."""
        return tuple(sorted(lab for lab, col in self.colour.items() if col == colour))

    def swapped(self) -> "Bicolouration":
        """The same partition with plus and minus exchanged."""
        flip = {Colour.PLUS: Colour.MINUS, Colour.MINUS: Colour.PLUS}
        return Bicolouration(colour={lab: flip[c] for lab, c in self.colour.items()})

    def is_proper(self, diagram: DynkinDiagram) -> bool:
        """True if every edge joins nodes of different colours."""
        return all(self.colour[a] != self.colour[b] for a, b in diagram.edges)


class EigenPair(FrozenModel):
    """Cartan eigenvalue with a unit eigenvector and its residual."""

    value: float
    vector: Tuple[float, ...]
    residual: float


def diagram_from_edges(
    labels: Sequence[int], edges: Iterable[Tuple[int, int]]
) -> DynkinDiagram:
    """Build a general simply-laced diagram from labels and edges."""
    normalized = tuple((min(a, b), max(a, b)) for a, b in edges)
    return DynkinDiagram(labels=tuple(labels), edges=normalized)


def diagram_from_cartan(cartan: CartanMatrix) -> DynkinDiagram:
    """Recover the diagram from a Cartan matrix."""
    edges: List[Tuple[int, int]] = []
    for i, a in enumerate(cartan.labels):
        for j in range(i + 1, cartan.rank):
            if cartan.entries[i][j] == -1:
                edges.append((a, cartan.labels[j]))
    return DynkinDiagram(labels=cartan.labels, edges=tuple(edges))


def build_extended_A(n: int, m: int) -> DynkinDiagram:
    """Build the diagram of (A_n)_-m.

    Args:
        n: Rank of the finite A_n part, at least 2
        m: Number of extension nodes beyond the affine node 0

    Returns:
        Diagram with labels -m..n, the affine cycle 0-1-...-n-0 and the chain
        -m - ... - -1 - 0

    Raises:
        UnsupportedDiagram: If n < 2 (A_1 affine has a double bond) or m < 0
    """
    if n < 2:
        raise UnsupportedDiagram(n, m, "n must be at least 2")
    if m < 0:
        raise UnsupportedDiagram(n, m, "m must be non-negative")

    chain = [(-k, -k + 1) for k in range(m, 0, -1)]
    cycle = [(i, i + 1) for i in range(n)] + [(0, n)]
    diagram = DynkinDiagram(
        n=n, m=m, labels=tuple(range(-m, n + 1)), edges=tuple(chain + cycle)
    )
    logger.debug(
        f"Built (A_{n})_-{m} with {len(diagram.labels)} nodes",
        extra={"n": n, "m": m},
    )
    return diagram


def build_finite_A(n: int) -> DynkinDiagram:
    """Path diagram of the finite algebra A_n on labels 1..n."""
    if n < 1:
        raise UnsupportedDiagram(n, 0, "finite A_n needs n >= 1")
    return DynkinDiagram(
        labels=tuple(range(1, n + 1)),
        edges=tuple((i, i + 1) for i in range(1, n)),
    )


def bicolour(diagram: DynkinDiagram) -> Optional[Bicolouration]:
    """Two-colour the diagram, or return None if it has an odd cycle.

    The node with the smallest label is coloured minus, so (A_3)_-2 gets minus
    on -2, 0, 2 and plus on -1, 1, 3.
    """
    graph = diagram.graph()
    if not nx.is_bipartite(graph):
        return None

    start = min(diagram.labels)
    colour: Dict[int, Colour] = {start: Colour.MINUS}
    for parent, child in nx.bfs_edges(graph, start):
        colour[child] = Colour.PLUS if colour[parent] == Colour.MINUS else Colour.MINUS

    ordered = {label: colour[label] for label in diagram.labels}
    return Bicolouration(colour=ordered)


def cartan_eigen(
    cartan: CartanMatrix, tolerance: float = EIGEN_TOLERANCE
) -> List[EigenPair]:
    """All eigenpairs of the symmetric Cartan matrix, ascending by eigenvalue.

    Each eigenvector is normalized to unit length with its largest-magnitude
    component positive. Residuals above `tolerance` are logged as warnings.
    """
    matrix = np.array(cartan.entries, dtype=float)
    values, vectors = np.linalg.eigh(matrix)

    pairs: List[EigenPair] = []
    for index, value in enumerate(values):
        vector = vectors[:, index]
        pivot = int(np.argmax(np.abs(vector) > np.abs(vector).max() - 1e-12))
        if vector[pivot] < 0:
            vector = -vector
        residual = float(np.linalg.norm(matrix @ vector - value * vector))
        if residual > tolerance:
            logger.warning(
                f"Eigenpair {index} residual {residual:.3e} above tolerance",
                extra={"eigenvalue": float(value)},
            )
        pairs.append(
            EigenPair(
                value=float(value),
                vector=tuple(float(x) for x in vector),
                residual=residual,
            )
        )
    return pairs


def signature(cartan: CartanMatrix) -> Tuple[int, int, int]:
    """Counts of (negative, zero, positive) Cartan eigenvalues."""
    values = np.linalg.eigvalsh(np.array(cartan.entries, dtype=float))
    negative = int(np.sum(values < -EIGEN_TOLERANCE))
    zero = int(np.sum(np.abs(values) <= EIGEN_TOLERANCE))
    return negative, zero, len(values) - negative - zero
