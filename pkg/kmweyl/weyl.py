"""Weyl reflections, Coxeter words as integer matrices, powers and orbits."""

import math
import threading
from collections import OrderedDict
from typing import Any, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
import sympy as sp

from kmweyl.base import FrozenModel, LabelledMatrix
from kmweyl.dynkin import CartanMatrix
from kmweyl.exceptions import UnknownNodeLabel
from kmweyl.logger import get_logger
from kmweyl.roots import LatticeEmbedding, RootVector, ambient_inner
from kmweyl.utils import parse_int_list

logger = get_logger("weyl")

T = TypeVar("T")

Entries = Tuple[Tuple[int, ...], ...]

# Orbit elements kept by one OrbitCache before the least recently used go.
ORBIT_CACHE_SIZE = 200_000


class WeylWord(FrozenModel):
    """Product of simple reflections; the rightmost letter acts first."""

    letters: Tuple[int, ...]

    @classmethod
    def parse(cls, text: str) -> "WeylWord":
        """Build from a comma-separated label list such as "0,1,2"."""
        return cls(letters=parse_int_list(text))

    def reversed(self) -> "WeylWord":
        """The inverse element (reflections are involutions)."""
        return WeylWord(letters=tuple(reversed(self.letters)))

    def __add__(self, other: "WeylWord") -> "WeylWord":
        return WeylWord(letters=self.letters + other.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def check_labels(self, labels: Sequence[int]) -> None:
        """Raise UnknownNodeLabel for the first letter outside `labels`."""
        for letter in self.letters:
            if letter not in labels:
                raise UnknownNodeLabel(letter, labels)

    def __str__(self) -> str:
        return ",".join(str(letter) for letter in self.letters)


def _column(coeffs: Sequence[int]) -> np.ndarray[Any, Any]:
    return np.array(coeffs, dtype=object)


def _root(column: np.ndarray[Any, Any]) -> RootVector:
    return RootVector(coeffs=tuple(int(c) for c in column))


class CoxeterMatrix(LabelledMatrix):
    """Integer matrix of a Weyl group element acting on coefficient columns.

    Unimodular and orthogonal for the Cartan form: C^T K C = K. `word` records
    the Weyl word the matrix was built from, when known.
    """

    word: Optional[WeylWord] = None

    def __matmul__(self, other: "CoxeterMatrix") -> "CoxeterMatrix":
        word = None
        if self.word is not None and other.word is not None:
            word = self.word + other.word
        return CoxeterMatrix.from_array(
            self.labels, self.as_array() @ other.as_array(), word=word
        )

    def apply(self, a: RootVector) -> RootVector:
        self.check_vector(a.coeffs)
        return _root(self.as_array() @ _column(a.coeffs))

    def inverse(self) -> "CoxeterMatrix":
        """Exact inverse; integral because the determinant is +-1."""
        word = self.word.reversed() if self.word is not None else None
        return CoxeterMatrix.from_array(
            self.labels, np.array(self.as_sympy().inv()), word=word
        )

    def power(self, k: int) -> "CoxeterMatrix":
        """C^k by repeated squaring; negative k uses the inverse."""
        base = self.inverse() if k < 0 else self
        return CoxeterMatrix.from_array(
            self.labels, np.linalg.matrix_power(base.as_array(), abs(k))
        )

    def det(self) -> int:
        return int(self.as_sympy().det())

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.as_array(), np.identity(self.rank, dtype=int)))

    def is_orthogonal(self, cartan: CartanMatrix) -> bool:
        """Exact check of C^T K C = K."""
        c = self.as_array()
        k = cartan.as_array()
        return bool(np.array_equal(c.T @ k @ c, k))

    def char_poly(self) -> sp.Poly:
        """Characteristic polynomial det(x I - C) with integer coefficients."""
        x = sp.Symbol("x")
        return sp.Poly(self.as_sympy().charpoly(x).as_expr(), x)


def _reflection_array(position: int, cartan: CartanMatrix) -> np.ndarray[Any, Any]:
    array = np.identity(cartan.rank, dtype=object)
    array[position] -= cartan.as_array()[position]
    return array


def reflection_matrix(label: int, cartan: CartanMatrix) -> CoxeterMatrix:
    """Matrix of sigma_label: row `label` becomes e_i - K_i, other rows identity."""
    return CoxeterMatrix.from_array(
        cartan.labels,
        _reflection_array(cartan.index(label), cartan),
        word=WeylWord(letters=(label,)),
    )


def reflect(label: int, a: RootVector, cartan: CartanMatrix) -> RootVector:
    """sigma_label(a): c_label -> c_label - sum_j K_label,j c_j, others unchanged.

    Raises:
        UnknownNodeLabel: If `label` is not a node of the diagram
    """
    cartan.check_vector(a.coeffs)
    position = cartan.index(label)
    coeffs = _column(a.coeffs)
    coeffs[position] -= cartan.as_array()[position] @ coeffs
    return _root(coeffs)


def word_matrix(word: WeylWord, cartan: CartanMatrix) -> CoxeterMatrix:
    """Matrix R_{w1} ... R_{wk} of a word acting on coefficient columns."""
    word.check_labels(cartan.labels)
    product = np.identity(cartan.rank, dtype=object)
    for letter in word.letters:
        product = product @ _reflection_array(cartan.index(letter), cartan)
    return CoxeterMatrix.from_array(cartan.labels, product, word=word)


def apply_power(matrix: CoxeterMatrix, k: int, a: RootVector) -> RootVector:
    """C^k a, exact for any integer k."""
    return matrix.power(k).apply(a)


def orbit(
    matrix: CoxeterMatrix, seed: RootVector, k_min: int, k_max: int
) -> List[Tuple[int, RootVector]]:
    """[(k, C^k seed)] for k_min <= k <= k_max."""
    if k_min > k_max:
        return []
    step = matrix.as_array()
    current = _column(apply_power(matrix, k_min, seed).coeffs)
    result = [(k_min, _root(current))]
    for k in range(k_min + 1, k_max + 1):
        current = step @ current
        result.append((k, _root(current)))
    return result


OrbitKey = Tuple[Entries, Tuple[int, ...], int]


class OrbitCache:
    """Thread-safe LRU memo of orbit elements keyed on (matrix, seed, k).

    At most `maxsize` elements are kept; the least recently used are evicted.
    """

    def __init__(self, maxsize: int = ORBIT_CACHE_SIZE) -> None:
        self.logger = get_logger(self.__class__.__name__)
        self.maxsize = maxsize
        self._store: OrderedDict[OrbitKey, RootVector] = OrderedDict()
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._store)

    def orbit(
        self, matrix: CoxeterMatrix, seed: RootVector, k_min: int, k_max: int
    ) -> List[Tuple[int, RootVector]]:
        """Cached variant of weyl.orbit."""
        keys = [(matrix.entries, seed.coeffs, k) for k in range(k_min, k_max + 1)]
        with self._lock:
            cached = [self._store.get(key) for key in keys]
            if all(item is not None for item in cached):
                self.hits += len(keys)
                for key in keys:
                    self._store.move_to_end(key)
                return [
                    (k, item)
                    for k, item in zip(range(k_min, k_max + 1), cached)
                    if item is not None
                ]

        computed = orbit(matrix, seed, k_min, k_max)
        with self._lock:
            self.misses += len(keys)
            for key, (_, element) in zip(keys, computed):
                self._store[key] = element
                self._store.move_to_end(key)
            while len(self._store) > self.maxsize:
                self._store.popitem(last=False)
        self.logger.debug(
            f"Orbit window {k_min}:{k_max} computed",
            extra={"seed": list(seed.coeffs), "size": len(keys)},
        )
        return computed

    def clear(self) -> None:
        with self._lock:
            self._store.clear()
            self.hits = self.misses = 0


def cyclotomic_index(factor: sp.Poly) -> Optional[int]:
    """n if the monic irreducible `factor` is the n-th cyclotomic polynomial."""
    degree = factor.degree()
    x = factor.gen
    for n in range(1, 2 * degree * degree + 3):
        if sp.totient(n) == degree and sp.Poly(sp.cyclotomic_poly(n, x), x) == factor:
            return n
    return None


def coxeter_order(matrix: CoxeterMatrix, h_max: int) -> Optional[int]:
    """Least h <= h_max with C^h = 1, or None.

    A finite-order matrix has a characteristic polynomial made of cyclotomic
    factors, so h must divide the lcm of their indices; any other factor
    means infinite order.
    """
    _, factors = matrix.char_poly().factor_list()
    indices = []
    for factor, _ in factors:
        index = cyclotomic_index(factor)
        if index is None:
            logger.debug(
                "Non-cyclotomic characteristic factor, infinite order",
                extra={"factor": str(factor.as_expr())},
            )
            return None
        indices.append(index)

    period = math.lcm(*indices) if indices else 1
    for h in sorted(d for d in sp.divisors(period) if d <= h_max):
        if matrix.power(h).is_identity():
            return h
    return None


def ambient_reflect(
    label: int, q: Sequence[T], embedding: LatticeEmbedding
) -> Tuple[T, ...]:
    """q - (alpha_label . q) alpha_label in ambient coordinates."""
    root = embedding.vector(label)
    embedding.check_ambient(q)
    projection = ambient_inner(root, q, embedding)
    return tuple(x - projection * r for x, r in zip(q, root))


def ambient_word(
    word: WeylWord, q: Sequence[T], embedding: LatticeEmbedding
) -> Tuple[T, ...]:
    """Ambient action of a word, rightmost letter first."""
    word.check_labels(embedding.labels)
    result = tuple(q)
    for letter in reversed(word.letters):
        result = ambient_reflect(letter, result, embedding)
    return result


def coxeter_word(n: int, m: int) -> WeylWord:
    """sigma_-m ... sigma_0 sigma_1 ... sigma_n."""
    return WeylWord(letters=tuple(range(-m, n + 1)))


# Words of (A_2)_-2 generating finite subgroups, with their orders.
FINITE_ORDER_WORDS: Dict[str, Tuple[WeylWord, int]] = {
    "A2": (WeylWord(letters=(1, 2)), 3),
    "A3": (WeylWord(letters=(-2, 0, -1)), 4),
    "A4": (WeylWord(letters=(-2, 0, -1, 1)), 5),
    "A1xA2": (WeylWord(letters=(1, -2, -1)), 6),
}
