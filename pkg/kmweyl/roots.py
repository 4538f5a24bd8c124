"""Root vectors, the Cartan-form inner product and the Lorentzian lattice embedding."""

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from pydantic import model_validator

from kmweyl.base import FrozenModel
from kmweyl.dynkin import CartanMatrix
from kmweyl.exceptions import DimensionMismatch, InvalidBounds, UnknownNodeLabel
from kmweyl.logger import get_logger
from kmweyl.utils import worker_count

logger = get_logger("roots")

Scalar = Union[int, Fraction, float]
S = TypeVar("S", int, Fraction, float)


class RootVector(FrozenModel):
    """Integer coefficients of a root in the simple-root basis, in label order."""

    coeffs: Tuple[int, ...]

    @classmethod
    def simple(cls, cartan: CartanMatrix, label: int) -> "RootVector":
        """The simple root alpha_label."""
        position = cartan.index(label)
        return cls(coeffs=tuple(int(i == position) for i in range(cartan.rank)))

    @classmethod
    def zero(cls, rank: int) -> "RootVector":
        return cls(coeffs=(0,) * rank)

    def __add__(self, other: "RootVector") -> "RootVector":
        self._check_same_length(other)
        pairs = zip(self.coeffs, other.coeffs)
        return RootVector(coeffs=tuple(a + b for a, b in pairs))

    def __sub__(self, other: "RootVector") -> "RootVector":
        self._check_same_length(other)
        pairs = zip(self.coeffs, other.coeffs)
        return RootVector(coeffs=tuple(a - b for a, b in pairs))

    def __neg__(self) -> "RootVector":
        return RootVector(coeffs=tuple(-a for a in self.coeffs))

    def scaled(self, factor: int) -> "RootVector":
        return RootVector(coeffs=tuple(factor * a for a in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def canonical(self) -> "RootVector":
        """Representative of {v, -v} whose first nonzero coefficient is positive."""
        for value in self.coeffs:
            if value != 0:
                return self if value > 0 else -self
        return self

    def sign(self) -> int:
        """+1 if already canonical, -1 otherwise (0 for the zero vector)."""
        for value in self.coeffs:
            if value != 0:
                return 1 if value > 0 else -1
        return 0

    def norm(self, cartan: CartanMatrix) -> int:
        return inner(self, self, cartan)

    def _check_same_length(self, other: "RootVector") -> None:
        if len(other.coeffs) != len(self.coeffs):
            raise DimensionMismatch("Root vector", len(self.coeffs), len(other.coeffs))


def inner(a: RootVector, b: RootVector, cartan: CartanMatrix) -> int:
    """Cartan-form inner product a^T K b.

    Raises:
        DimensionMismatch: If either vector has the wrong length
    """
    cartan.check_vector(a.coeffs)
    cartan.check_vector(b.coeffs)
    left = np.array(a.coeffs, dtype=object)
    right = np.array(b.coeffs, dtype=object)
    return int(left @ cartan.as_array() @ right)


def diophantine_check(a: RootVector, cartan: CartanMatrix) -> bool:
    """True iff a is a real root, i.e. has norm 2."""
    return inner(a, a, cartan) == 2


def _label_ranges(
    cartan: CartanMatrix,
    lo: int,
    hi: int,
    bounds: Optional[Sequence[Tuple[int, int]]],
) -> List[range]:
    if bounds is None:
        if lo > hi:
            raise InvalidBounds(f"{lo}:{hi}", f"lower end {lo} exceeds upper end {hi}")
        return [range(lo, hi + 1)] * cartan.rank

    if len(bounds) != cartan.rank:
        raise DimensionMismatch("Bounds list", cartan.rank, len(bounds))
    ranges = []
    for low, high in bounds:
        if low > high:
            raise InvalidBounds(
                f"{low}:{high}", f"lower end {low} exceeds upper end {high}"
            )
        ranges.append(range(low, high + 1))
    return ranges


def enumerate_real_roots(
    cartan: CartanMatrix,
    lo: int = 0,
    hi: int = 0,
    bounds: Optional[Sequence[Tuple[int, int]]] = None,
    threads: Optional[int] = None,
) -> List[RootVector]:
    """Enumerate all norm-2 coefficient vectors inside a box.

    Args:
        cartan: Cartan matrix supplying the quadratic form
        lo: Lower bound applied to every label when `bounds` is None
        hi: Upper bound applied to every label when `bounds` is None
        bounds: Optional per-label (lo, hi) pairs in label order; these make
            slices such as p = q = 0 expressible
        threads: Worker threads (defaults to utils.worker_count())

    Returns:
        Roots in graded-lexicographic order: by coefficient sum, then
        lexicographically by coefficients

    Raises:
        InvalidBounds: If any range is empty
    """
    ranges = _label_ranges(cartan, lo, hi, bounds)
    outer, inner_ranges = ranges[0], ranges[1:]

    form = np.array(cartan.entries, dtype=np.int64)

    def scan(first: int) -> List[RootVector]:
        # Rows of the slice with the outermost coefficient fixed, in lex order.
        grid = np.stack(
            np.meshgrid([first], *inner_ranges, indexing="ij"), axis=-1
        ).reshape(-1, cartan.rank)
        norms = np.einsum("ij,jk,ik->i", grid, form, grid)
        return [
            RootVector(coeffs=tuple(int(c) for c in row)) for row in grid[norms == 2]
        ]

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as executor:
        chunks = list(executor.map(scan, outer))

    roots = [root for chunk in chunks for root in chunk]
    roots.sort(key=lambda root: (sum(root.coeffs), root.coeffs))
    logger.debug(
        f"Enumerated {len(roots)} real roots",
        extra={"rank": cartan.rank, "count": len(roots)},
    )
    return roots


class LatticeEmbedding(FrozenModel):
    """Integral embedding of the simple roots into R^{k} + (Pi^{1,1})^b.

    The ambient coordinates are the Euclidean block first, then the
    hyperbolic blocks as (u_1, v_1, u_2, v_2, ...) with u_j.v_j = -1 and
    u_j.u_j = v_j.v_j = 0, so x.y = sum x_i y_i - sum (x_u y_v + x_v y_u).
    """

    labels: Tuple[int, ...]
    euclidean_dim: int
    hyperbolic_blocks: int
    vectors: Tuple[Tuple[int, ...], ...]

    @model_validator(mode="after")
    def _check_vectors(self) -> "LatticeEmbedding":
        if len(self.vectors) != len(self.labels):
            raise ValueError(
                f"expected {len(self.labels)} simple-root images, "
                f"got {len(self.vectors)}"
            )
        for vector in self.vectors:
            if len(vector) != self.dim:
                raise ValueError(f"ambient vectors must have dimension {self.dim}")
        return self

    @property
    def dim(self) -> int:
        return self.euclidean_dim + 2 * self.hyperbolic_blocks

    def vector(self, label: int) -> Tuple[int, ...]:
        """Ambient image of the simple root alpha_label."""
        try:
            return self.vectors[self.labels.index(label)]
        except ValueError:
            raise UnknownNodeLabel(label, self.labels) from None

    def metric(self) -> np.ndarray[Any, Any]:
        """Ambient Gram matrix, with [[0, -1], [-1, 0]] on each hyperbolic pair."""
        metric = np.identity(self.dim, dtype=object)
        for offset in range(self.euclidean_dim, self.dim, 2):
            metric[offset, offset] = metric[offset + 1, offset + 1] = 0
            metric[offset, offset + 1] = metric[offset + 1, offset] = -1
        return metric

    def gram(self) -> List[List[int]]:
        """Ambient inner products of the simple-root images (equals K)."""
        images = np.array(self.vectors, dtype=object)
        return [[int(x) for x in row] for row in images @ self.metric() @ images.T]

    def check_ambient(self, q: Sequence[object], what: str = "Ambient vector") -> None:
        if len(q) != self.dim:
            raise DimensionMismatch(what, self.dim, len(q))


def build_embedding(n: int, m: int) -> LatticeEmbedding:
    """Embed the simple roots of (A_n)_-m.

    alpha_i = e_i - e_{i+1} for i = 1..n, alpha_0 = -e_1 + e_{n+1} + u_1,
    alpha_-1 = v_1 - u_1 and alpha_-k = u_{k-1} - u_k + v_k for k >= 2. For
    m = 0 a single hyperbolic block still carries the u_1 part of alpha_0.
    """
    euclid = n + 1
    blocks = max(m, 1)
    dim = euclid + 2 * blocks

    def u(k: int) -> int:
        return euclid + 2 * (k - 1)

    def v(k: int) -> int:
        return euclid + 2 * (k - 1) + 1

    images = {}
    for i in range(1, n + 1):
        vec = [0] * dim
        vec[i - 1], vec[i] = 1, -1
        images[i] = vec

    alpha0 = [0] * dim
    alpha0[0], alpha0[n] = -1, 1
    alpha0[u(1)] += 1
    images[0] = alpha0

    for k in range(1, m + 1):
        vec = [0] * dim
        vec[v(k)] += 1
        vec[u(k)] -= 1
        if k >= 2:
            vec[u(k - 1)] += 1
        images[-k] = vec

    labels = tuple(range(-m, n + 1))
    return LatticeEmbedding(
        labels=labels,
        euclidean_dim=euclid,
        hyperbolic_blocks=blocks,
        vectors=tuple(tuple(images[label]) for label in labels),
    )


def embed(a: RootVector, embedding: LatticeEmbedding) -> Tuple[int, ...]:
    """Linear extension of the simple-root embedding."""
    if len(a.coeffs) != len(embedding.labels):
        raise DimensionMismatch("Root vector", len(embedding.labels), len(a.coeffs))
    coeffs = np.array(a.coeffs, dtype=object)
    images = np.array(embedding.vectors, dtype=object)
    return tuple(int(x) for x in coeffs @ images)


def ambient_inner(x: Sequence[S], y: Sequence[S], embedding: LatticeEmbedding) -> S:
    """Ambient product: Euclidean on the first block, -(x_u y_v + x_v y_u) after."""
    embedding.check_ambient(x)
    embedding.check_ambient(y)
    left = np.array(x, dtype=object)
    right = np.array(y, dtype=object)
    product: S = left @ embedding.metric() @ right
    return product


def ambient_form(x: Sequence[S], embedding: LatticeEmbedding) -> Tuple[S, ...]:
    """Metric contraction f of x, so that the plain dot product f.q equals x.q."""
    embedding.check_ambient(x)
    return tuple(embedding.metric() @ np.array(x, dtype=object))


def dot(form: Sequence[Scalar], q: Sequence[Scalar]) -> Scalar:
    """Plain Euclidean dot product of a linear form with a point."""
    total: Scalar = np.dot(np.array(form, dtype=object), np.array(q, dtype=object))
    return total


def roots_tsv(roots: Sequence[RootVector], cartan: CartanMatrix) -> str:
    """TSV export: a "#" header of label columns plus norm, one row per root."""
    header = "#" + "\t".join([f"c{label}" for label in cartan.labels] + ["norm"])
    lines = [header]
    for root in roots:
        cells = [str(c) for c in root.coeffs] + [str(inner(root, root, cartan))]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"
