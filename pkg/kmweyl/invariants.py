"""Bicoloured Coxeter elements, exponent angles and Weyl-invariant polynomials."""

import cmath
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple

import numpy as np
import sympy as sp
from pydantic import ConfigDict
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.rings import PolyElement, PolyRing, ring

from kmweyl.base import FrozenModel
from kmweyl.dynkin import (
    EIGEN_TOLERANCE,
    CartanMatrix,
    Colour,
    DynkinDiagram,
    bicolour,
    cartan_eigen,
    diagram_from_cartan,
)
from kmweyl.exceptions import (
    BasisTooLarge,
    DegenerateEigenbasis,
    InvalidFactorization,
    NotBicolourable,
)
from kmweyl.logger import get_logger
from kmweyl.utils import worker_count
from kmweyl.weyl import WeylWord, word_matrix

logger = get_logger("invariants")

BASIS_LIMIT = 10**6

Exponents = Tuple[int, ...]


class BicolourFactorization(FrozenModel):
    """Coxeter element sigma_- sigma_+ split into two commuting products."""

    sigma_plus: WeylWord
    sigma_minus: WeylWord

    def coxeter_word(self) -> WeylWord:
        """sigma_- sigma_+ (the plus reflections act first)."""
        return self.sigma_minus + self.sigma_plus

    def swapped(self) -> "BicolourFactorization":
        return BicolourFactorization(
            sigma_plus=self.sigma_minus, sigma_minus=self.sigma_plus
        )

    def validate_for(self, diagram: DynkinDiagram) -> None:
        """Raise InvalidFactorization if a factor holds two adjacent nodes."""
        for word in (self.sigma_plus, self.sigma_minus):
            word.check_labels(diagram.labels)
            for a, b in itertools.combinations(word.letters, 2):
                if a == b or diagram.is_adjacent(a, b):
                    raise InvalidFactorization(word.letters, a, b)


def bicolour_factorization(diagram: DynkinDiagram) -> BicolourFactorization:
    """sigma_+ from the plus nodes, sigma_- from the minus nodes.

    Raises:
        NotBicolourable: If the diagram has an odd cycle
    """
    colouring = bicolour(diagram)
    if colouring is None:
        raise NotBicolourable(list(diagram.labels))
    return BicolourFactorization(
        sigma_plus=WeylWord(letters=colouring.nodes(Colour.PLUS)),
        sigma_minus=WeylWord(letters=colouring.nodes(Colour.MINUS)),
    )


def kostant_check(diagram: DynkinDiagram, factors: BicolourFactorization) -> bool:
    """Exact test of (sigma_- + sigma_+) alpha_i = sum_j (2 delta_ij - K_ij) alpha_j."""
    factors.validate_for(diagram)
    cartan = diagram.cartan_matrix()
    plus = word_matrix(factors.sigma_plus, cartan).entries
    minus = word_matrix(factors.sigma_minus, cartan).entries
    size = cartan.rank
    for i in range(size):
        for j in range(size):
            expected = 2 * int(i == j) - cartan.entries[j][i]
            if plus[j][i] + minus[j][i] != expected:
                logger.info(
                    "Kostant identity fails",
                    extra={"label": cartan.labels[i], "row": cartan.labels[j]},
                )
                return False
    return True


def eigen_angle(value: float, tolerance: float = EIGEN_TOLERANCE) -> complex:
    """theta with value = 2 - 2 cos(theta).

    Real in [0, pi] for 0 <= value <= 4, i*arccosh(1 - value/2) below 0 and
    pi - i*arccosh(value/2 - 1) above 4, so theta(4 - v) = pi - theta(v).
    Values within `tolerance` of 0 or 4 are taken as the boundary itself.
    """
    if abs(value) <= tolerance:
        value = 0.0
    elif abs(value - 4) <= tolerance:
        value = 4.0
    if value < 0:
        return complex(0.0, math.acosh(1 - value / 2))
    if value > 4:
        return complex(math.pi, -math.acosh(value / 2 - 1))
    return complex(math.acos(max(-1.0, min(1.0, 1 - value / 2))), 0.0)


class CoxeterAngles(FrozenModel):
    """Exponent angles theta_j of the Cartan eigenvalues, ascending."""

    eigenvalues: Tuple[float, ...]
    thetas: Tuple[complex, ...]

    @property
    def admissible(self) -> Tuple[bool, ...]:
        """True where theta_j is real (eigenvalue in [0, 4])."""
        return tuple(theta.imag == 0 for theta in self.thetas)

    def real_thetas(self) -> Tuple[Optional[float], ...]:
        return tuple(
            theta.real if ok else None
            for theta, ok in zip(self.thetas, self.admissible)
        )

    def relation_residual(self) -> float:
        """max_j |lambda_j - (2 - 2 cos theta_j)|."""
        return max(
            abs(value - (2 - 2 * cmath.cos(theta)))
            for value, theta in zip(self.eigenvalues, self.thetas)
        )

    def pairing_defect(self) -> float:
        """max_j |theta_j + theta_{r+1-j} - pi|."""
        count = len(self.thetas)
        return max(
            abs(self.thetas[j] + self.thetas[count - 1 - j] - math.pi)
            for j in range(count)
        )


def coxeter_angles(
    cartan: CartanMatrix, tolerance: float = EIGEN_TOLERANCE
) -> CoxeterAngles:
    """Angles with lambda_j = 2 - 2 cos theta_j; complex outside [0, 4].

    Eigenvalues within `tolerance` of 0 or 4 count as admissible.
    """
    values = tuple(pair.value for pair in cartan_eigen(cartan, tolerance))
    thetas = tuple(eigen_angle(value, tolerance) for value in values)
    inadmissible = sum(1 for theta in thetas if theta.imag != 0)
    if inadmissible:
        logger.debug(
            f"{inadmissible} eigenvalues outside [0, 4] give complex angles",
            extra={"rank": cartan.rank},
        )
    return CoxeterAngles(eigenvalues=values, thetas=thetas)


def no_finite_order(angles: CoxeterAngles, h_max: int, tolerance: float = 1e-9) -> bool:
    """True iff no h <= h_max puts every h theta_j / pi on an integer."""
    for h in range(1, h_max + 1):
        if all(_is_integer(h * theta / math.pi, tolerance) for theta in angles.thetas):
            return False
    return True


def _is_integer(value: complex, tolerance: float) -> bool:
    if abs(value.imag) > tolerance:
        return False
    return abs(value.real - round(value.real)) <= tolerance


def coxeter_eigenvectors(
    diagram: DynkinDiagram,
    conditioning: float = 1e8,
    tolerance: float = EIGEN_TOLERANCE,
) -> Tuple[np.ndarray, CoxeterAngles, BicolourFactorization]:
    """Eigenvectors of sigma_- sigma_+ built from the Cartan eigenvectors.

    q_j = e^{i theta_j/2} v_j^- + e^{-i theta_j/2} v_j^+.

    v_j^-/v_j^+ are the Cartan eigenvectors restricted to the minus/plus
    nodes; sigma_- sigma_+ q_j = e^{2 i theta_j} q_j. Columns follow the
    ascending eigenvalue order.

    Raises:
        NotBicolourable: If the diagram has an odd cycle
        DegenerateEigenbasis: If the columns are numerically dependent
    """
    factors = bicolour_factorization(diagram)
    cartan = diagram.cartan_matrix()
    minus = {cartan.index(label) for label in factors.sigma_minus.letters}
    pairs = cartan_eigen(cartan, tolerance)
    angles = coxeter_angles(cartan, tolerance)

    basis = np.zeros((cartan.rank, cartan.rank), dtype=complex)
    for column, (pair, theta) in enumerate(zip(pairs, angles.thetas)):
        phase = cmath.exp(0.5j * theta)
        for row, component in enumerate(pair.vector):
            basis[row, column] = component * (phase if row in minus else 1 / phase)

    condition = float(np.linalg.cond(basis))
    if not np.isfinite(condition) or condition > conditioning:
        raise DegenerateEigenbasis(condition, conditioning)
    return basis, angles, factors




def _monomial_basis(rank: int, degree: int) -> List[Exponents]:
    """Exponent vectors of all degree-`degree` monomials, descending lex."""
    basis: List[Exponents] = []
    for combo in itertools.combinations_with_replacement(range(rank), degree):
        exps = [0] * rank
        for index in combo:
            exps[index] += 1
        basis.append(tuple(exps))
    basis.sort(reverse=True)
    return basis


def variable(label: int) -> sp.Symbol:
    """x_<label>, with negative labels spelled x_m<|label|>."""
    return sp.Symbol(f"x_m{-label}" if label < 0 else f"x_{label}")


def polynomial_ring(labels: Sequence[int]) -> PolyRing:
    """QQ[x_label, ...] in label order with lex monomial order."""
    poly_ring, *_ = ring([variable(label) for label in labels], QQ)
    return poly_ring


def reflection_images(cartan: CartanMatrix, poly_ring: PolyRing) -> List[PolyElement]:
    """sigma_i x_i = x_i - sum_j K_ij x_j as linear forms, one per generator."""
    gens = poly_ring.gens
    return [
        gens[i] - sum((k * x for k, x in zip(row, gens)), poly_ring.zero)
        for i, row in enumerate(cartan.entries)
    ]


def _to_fraction(value: Any) -> Fraction:
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def _to_qq(value: Fraction | int) -> Any:
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _primitive(poly: PolyElement) -> PolyElement:
    """Integer coefficients with content 1 and a positive leading coefficient."""
    _, primitive = poly.primitive()
    return -primitive if primitive.LC < 0 else primitive


class PolynomialInvariant(FrozenModel):
    """Homogeneous polynomial with rational coefficients, one variable per label.

    Terms are (exponents, coefficient) pairs in descending lex order of the
    exponent vectors, zero coefficients dropped. Arithmetic goes through the
    sympy ring returned by `to_ring`.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    labels: Tuple[int, ...]
    degree: int
    terms: Tuple[Tuple[Exponents, Fraction], ...]

    @classmethod
    def from_ring(
        cls, labels: Sequence[int], degree: int, poly: PolyElement
    ) -> "PolynomialInvariant":
        terms = tuple((tuple(exps), _to_fraction(c)) for exps, c in poly.terms())
        return cls(labels=tuple(labels), degree=degree, terms=terms)

    @classmethod
    def from_map(
        cls,
        labels: Sequence[int],
        degree: int,
        coefficients: Mapping[Exponents, Fraction | int],
    ) -> "PolynomialInvariant":
        poly_ring = polynomial_ring(labels)
        poly = poly_ring.from_dict(
            {exps: _to_qq(c) for exps, c in coefficients.items()}
        )
        return cls.from_ring(labels, degree, poly)

    def to_ring(self) -> PolyElement:
        """The polynomial as an element of polynomial_ring(labels)."""
        return polynomial_ring(self.labels).from_dict(
            {exps: _to_qq(c) for exps, c in self.terms}
        )

    def support(self) -> Set[Exponents]:
        return {exps for exps, _ in self.terms}

    def is_zero(self) -> bool:
        return not self.terms

    def product(self, other: "PolynomialInvariant") -> "PolynomialInvariant":
        return PolynomialInvariant.from_ring(
            self.labels, self.degree + other.degree, self.to_ring() * other.to_ring()
        )

    def is_proportional_to(self, other: "PolynomialInvariant") -> bool:
        """Exact check that self = c * other for some nonzero rational c."""
        mine, theirs = self.to_ring(), other.to_ring()
        if not mine or not theirs:
            return False
        return bool(mine * theirs.LC == theirs * mine.LC)

    def is_invariant(self, cartan: CartanMatrix) -> bool:
        """Exact check of P(sigma_i x) = P(x) for every generator."""
        poly = self.to_ring()
        images = reflection_images(cartan, poly.ring)
        return all(
            poly.compose(gen, image) == poly
            for gen, image in zip(poly.ring.gens, images)
        )

    def symbols(self) -> Tuple[sp.Symbol, ...]:
        return tuple(variable(label) for label in self.labels)

    def to_sympy(self) -> sp.Expr:
        return self.to_ring().as_expr()

    def monomials(self) -> List[Dict[str, Any]]:
        """[{"exponents": [...], "coeff": "p/q"}] in term order."""
        return [
            {"exponents": list(exps), "coeff": str(coeff)}
            for exps, coeff in self.terms
        ]


def cartan_form_invariant(cartan: CartanMatrix) -> PolynomialInvariant:
    """I_2 = (1/2) x^T K x = sum x_i^2 + sum_{i<j} K_ij x_i x_j."""
    poly_ring = polynomial_ring(cartan.labels)
    x = poly_ring.gens
    form = sum(
        (
            k * x[i] * x[j]
            for i, row in enumerate(cartan.entries)
            for j, k in enumerate(row)
        ),
        poly_ring.zero,
    )
    return PolynomialInvariant.from_ring(cartan.labels, 2, form * QQ(1, 2))


def _constraint_rows(
    images: Sequence[PolyElement], basis: List[Exponents], position: int
) -> List[List[Any]]:
    """Rows of (rho(sigma_i) - I) acting on coefficient vectors over `basis`."""
    poly_ring = images[position].ring
    gen = poly_ring.gens[position]
    index = {exps: k for k, exps in enumerate(basis)}
    size = len(basis)
    matrix = [[QQ.zero] * size for _ in range(size)]
    for column, exps in enumerate(basis):
        image = poly_ring.from_dict({exps: QQ.one}).compose(gen, images[position])
        for key, value in image.items():
            matrix[index[key]][column] += value
        matrix[column][column] -= QQ.one
    return [row for row in matrix if any(row)]


def invariant_space(
    cartan: CartanMatrix, degree: int, threads: Optional[int] = None
) -> List[PolynomialInvariant]:
    """Exact basis of the degree-`degree` polynomials invariant under every sigma_i.

    The basis is the rational nullspace of the stacked constraints
    (rho(sigma_i) - I), each vector scaled to integers with content 1 and a
    positive leading coefficient.

    Raises:
        BasisTooLarge: If the monomial basis exceeds 10^6 elements
    """
    size = math.comb(degree + cartan.rank - 1, degree)
    if size > BASIS_LIMIT:
        raise BasisTooLarge(size, BASIS_LIMIT)

    basis = _monomial_basis(cartan.rank, degree)
    poly_ring = polynomial_ring(cartan.labels)
    images = reflection_images(cartan, poly_ring)
    with ThreadPoolExecutor(max_workers=worker_count(threads)) as executor:
        blocks = list(
            executor.map(
                lambda position: _constraint_rows(images, basis, position),
                range(cartan.rank),
            )
        )
    rows = [row for block in blocks for row in block]

    if rows:
        reduced, pivots = DomainMatrix(rows, (len(rows), size), QQ).rref()
        reduced_rows = reduced.to_Matrix()
    else:
        pivots, reduced_rows = (), sp.zeros(0, size)

    invariants: List[PolynomialInvariant] = []
    free_columns = [c for c in range(size) if c not in set(pivots)]
    for free in free_columns:
        coefficients = {basis[free]: QQ.one}
        for row, pivot in enumerate(pivots):
            coefficients[basis[pivot]] = -QQ.from_sympy(reduced_rows[row, free])
        poly = _primitive(poly_ring.from_dict(coefficients))
        invariants.append(PolynomialInvariant.from_ring(cartan.labels, degree, poly))

    logger.info(
        f"Degree {degree} invariant space has dimension {len(invariants)}",
        extra={"degree": degree, "monomials": size, "constraints": len(rows)},
    )
    return invariants


def w_polynomial(
    poly: PolynomialInvariant, basis: np.ndarray
) -> Dict[Exponents, complex]:
    """P(Q w): the polynomial in eigen-coordinates w with x = Q w.

    The eigenvector basis is floating point, so the substitution is expanded
    over sympy's complex field rather than in the exact ring.
    """
    rank = basis.shape[0]
    ws = sp.symbols(f"w_1:{rank + 1}")
    substitution = {
        x: sum(complex(basis[i, j]) * ws[j] for j in range(rank))
        for i, x in enumerate(poly.symbols())
    }
    expanded = sp.expand(poly.to_sympy().xreplace(substitution))
    return {
        tuple(exps): complex(coeff) for exps, coeff in sp.Poly(expanded, *ws).terms()
    }


def w_monomial_pattern(
    cartan: CartanMatrix,
    poly: PolynomialInvariant,
    support_tolerance: float = 1e-8,
    conditioning: float = 1e8,
) -> Set[Exponents]:
    """Support of P in the Coxeter eigen-coordinates w (x = sum_j w_j q_j).

    Coefficients below `support_tolerance` times the largest one are dropped.

    Raises:
        DegenerateEigenbasis: If the eigenvector basis is ill-conditioned
    """
    if poly.is_zero():
        return set()
    basis, _, _ = coxeter_eigenvectors(diagram_from_cartan(cartan), conditioning)
    transformed = w_polynomial(poly, basis)
    largest = max(abs(value) for value in transformed.values())
    return {
        exps
        for exps, value in transformed.items()
        if abs(value) > support_tolerance * largest
    }


def monomial_phase_ok(
    exps: Exponents, angles: CoxeterAngles, tolerance: float = 1e-6
) -> bool:
    """True iff sum_i a_i theta_i is an integer multiple of pi."""
    total = sum((a * theta for a, theta in zip(exps, angles.thetas)), start=0j)
    return _is_integer(total / math.pi, tolerance)
