"""Closed forms of infinite orbit sums on (A_2)_-2 and their raw-sum oracles.

Ambient coordinates are q = (q1, q2, q3, q4, q5, q6, q7): the Euclidean block
q1..q3 followed by the hyperbolic pairs (q4, q5) and (q6, q7).
"""

import math
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from kmweyl.base import FrozenModel
from kmweyl.calogero.base import BasePotential, a2m2_embedding
from kmweyl.calogero.special import (
    POLE_TOLERANCE,
    inverse_square_lattice_sum,
    one_sided_lattice_sum,
    richardson,
)
from kmweyl.calogero.terms import OrbitGenerator
from kmweyl.dynkin import CartanMatrix, build_extended_A
from kmweyl.exceptions import ComputationError, PoleEncountered, UnknownNodeLabel
from kmweyl.logger import get_logger
from kmweyl.roots import LatticeEmbedding, RootVector, ambient_form, dot, embed
from kmweyl.weyl import ambient_reflect, orbit, word_matrix

logger = get_logger("calogero.closed_forms")

SINE_TOLERANCE = 1e-12

# q5 is fixed by sigma_0, sigma_1 and sigma_2, so 3 q5 is a common period.
PERIOD_INDEX = 4


class SineTerm(FrozenModel):
    """1 / sin^2(pi L(q) / (3 q5)) for an integral linear form L."""

    name: str
    numerator: Tuple[int, ...]

    def argument(self, q: Sequence[float]) -> float:
        return float(dot(self.numerator, q))

    def value(self, q: Sequence[float], tolerance: float = SINE_TOLERANCE) -> float:
        """Raises PoleEncountered when |sin| is within `tolerance` of 0."""
        numerator = self.argument(q)
        s = math.sin(math.pi * numerator / (3 * q[PERIOD_INDEX]))
        if abs(s) <= tolerance:
            raise PoleEncountered(self.name, numerator)
        return 1.0 / s**2


def _linear(*pairs: Tuple[int, int]) -> Tuple[int, ...]:
    coeffs = [0] * 7
    for index, coeff in pairs:
        coeffs[index - 1] += coeff
    return tuple(coeffs)


def _affine_sine_terms() -> Tuple[SineTerm, ...]:
    terms = []
    for i, j in ((1, 2), (1, 3), (2, 3)):
        terms.append(SineTerm(name=f"V{i}{j}", numerator=_linear((i, 1), (j, -1))))
    for i, j in ((1, 2), (1, 3), (2, 3)):
        for sign, tag in ((1, "+"), (-1, "-")):
            terms.append(
                SineTerm(
                    name=f"V{i}{j}5{tag}",
                    numerator=_linear((i, 1), (j, -1), (5, sign)),
                )
            )
    return tuple(terms)


AFFINE_SINE_TERMS: Tuple[SineTerm, ...] = _affine_sine_terms()


def _check_point(q: Sequence[float]) -> Tuple[float, ...]:
    point = tuple(float(x) for x in q)
    a2m2_embedding().check_ambient(point, "Point q")
    if point[PERIOD_INDEX] == 0:
        raise PoleEncountered("q5", 0.0)
    return point


def affine_sine_values(
    q: Sequence[float],
    g: float = 1.0,
    couplings: Optional[Mapping[str, float]] = None,
    tolerance: float = SINE_TOLERANCE,
) -> Dict[str, float]:
    """The nine scaled contributions (2 pi^2 g_t / 9 q5^2) V_t of the affine potential.

    g_t is `couplings[name]` when given, else the global g.
    """
    point = _check_point(q)
    overrides = couplings or {}
    prefactor = 2 * math.pi**2 / (9 * point[PERIOD_INDEX] ** 2)
    values = {}
    for term in AFFINE_SINE_TERMS:
        coupling = overrides.get(term.name, g)
        values[term.name] = prefactor * coupling * term.value(point, tolerance)
    return values


def affine_invariant_potential(
    q: Sequence[float],
    g: float = 1.0,
    couplings: Optional[Mapping[str, float]] = None,
    tolerance: float = SINE_TOLERANCE,
) -> float:
    """Weyl-invariant affine potential in closed form.

    V(q) = (2 pi^2 g / 9 q5^2) (V12 + V13 + V23 + V125+ + V125- + ... + V235-)
    with V_ij = 1/sin^2(pi (q_i - q_j) / 3 q5) and
    V_ij5+- = 1/sin^2(pi (q_i - q_j +- q5) / 3 q5).

    Raises:
        PoleEncountered: Naming the sine term (or q5) that vanishes
    """
    return sum(affine_sine_values(q, g, couplings, tolerance).values(), 0.0)


def coxeter_orbit_potential(q: Sequence[float], g: float = 1.0) -> float:
    """Closed form of the single sigma_a-orbit sum of alpha_2 over all powers."""
    point = _check_point(q)
    prefactor = math.pi**2 * g / (9 * point[PERIOD_INDEX] ** 2)
    first = SineTerm(name="V23", numerator=_linear((2, 1), (3, -1)))
    second = SineTerm(name="V135-", numerator=_linear((1, 1), (3, -1), (5, -1)))
    return prefactor * (first.value(point) + second.value(point))


def _reflected_form(
    numerator: Sequence[int], label: int, embedding: LatticeEmbedding
) -> Tuple[int, ...]:
    """Coefficients of q -> L(sigma_label q) as a linear form."""
    columns = []
    for j in range(embedding.dim):
        basis = tuple(Fraction(int(i == j)) for i in range(embedding.dim))
        image = ambient_reflect(label, basis, embedding)
        columns.append(sum((c * x for c, x in zip(numerator, image)), Fraction(0)))
    return tuple(int(c) for c in columns)


def sine_term_permutation(label: int) -> Dict[str, str]:
    """Permutation of the nine affine sine terms under an ambient reflection.

    V_t(sigma q) = V_s(q) when the reflected numerator equals +-L_s up to a
    multiple of 3 q5 (the period of sin^2 in these arguments).

    Raises:
        UnknownNodeLabel: For labels other than 0, 1, 2
        ComputationError: If a reflected term is not one of the nine
    """
    if label not in (0, 1, 2):
        raise UnknownNodeLabel(label, (0, 1, 2))
    embedding = a2m2_embedding()
    mapping: Dict[str, str] = {}
    for term in AFFINE_SINE_TERMS:
        reflected = _reflected_form(term.numerator, label, embedding)
        mapping[term.name] = _identify(reflected, term.name, label)
    return mapping


def _identify(reflected: Sequence[int], name: str, label: int) -> str:
    for candidate in AFFINE_SINE_TERMS:
        for sign in (1, -1):
            diff = [r - sign * c for r, c in zip(reflected, candidate.numerator)]
            shift = diff[PERIOD_INDEX]
            others = diff[:PERIOD_INDEX] + diff[PERIOD_INDEX + 1 :]
            if not any(others) and shift % 3 == 0:
                return candidate.name
    raise ComputationError(
        f"Reflection sigma_{label} maps sine term {name} to {tuple(reflected)}, "
        f"which is not one of the nine affine terms"
    )


class AffineInvariantPotential(BasePotential):
    """The nine-term closed form as a potential object.

    `couplings` overrides the global coupling per sine term name (V12, V125+, ...).
    """

    def __init__(
        self,
        coupling: float = 1.0,
        couplings: Optional[Mapping[str, float]] = None,
        pole_tolerance: float = SINE_TOLERANCE,
    ) -> None:
        super().__init__(a2m2_embedding(), coupling, couplings)
        self.pole_tolerance = pole_tolerance

    def evaluate(self, q: Sequence[float]) -> float:
        return sum(self.term_values(q).values(), 0.0)

    def term_values(self, q: Sequence[float]) -> Dict[str, float]:
        return affine_sine_values(q, self.coupling, self.couplings, self.pole_tolerance)


class PartialSumFamily(FrozenModel):
    """Root chain base + k step of (A_2)_-2 (step null, base real, base . step = 0)."""

    name: str
    base: Tuple[int, ...]
    step: Tuple[int, ...]
    two_sided: bool = False
    description: str = ""

    def chain(self, k: int) -> RootVector:
        return RootVector(
            coeffs=tuple(b + k * s for b, s in zip(self.base, self.step))
        )

    def forms(self, embedding: LatticeEmbedding) -> Tuple[Tuple[int, ...], ...]:
        """Linear forms a, b with (base + k step) . q = a . q + k b . q."""
        base = ambient_form(embed(RootVector(coeffs=self.base), embedding), embedding)
        step = ambient_form(embed(RootVector(coeffs=self.step), embedding), embedding)
        return base, step


_U = (1, 1, 1, 1, 1)
_V = (1, 2, 2, 1, 1)

PARTIAL_SUM_FAMILIES: Dict[str, PartialSumFamily] = {
    family.name: family
    for family in (
        PartialSumFamily(
            name="partial-1",
            base=(0, 1, 0, 0, 0),
            step=_U,
            description="alpha_-1 + k u",
        ),
        PartialSumFamily(
            name="partial-2",
            base=(0, 0, 0, 1, 1),
            step=_U,
            description="alpha_1 + alpha_2 + k u",
        ),
        PartialSumFamily(
            name="partial-v1",
            base=(0, 0, 1, 0, 0),
            step=_V,
            description="alpha_0 + k v",
        ),
        PartialSumFamily(
            name="partial-v2",
            base=tuple(a - v for a, v in zip((0, 0, 1, 0, 0), _V)),
            step=tuple(-v for v in _V),
            description="alpha_0 - v - k v",
        ),
        PartialSumFamily(
            name="partial-v1v2",
            base=(0, 0, 1, 0, 0),
            step=_V,
            two_sided=True,
            description="alpha_0 + k v for all integers k",
        ),
    )
}


def _family(family: str | PartialSumFamily) -> PartialSumFamily:
    if isinstance(family, PartialSumFamily):
        return family
    try:
        return PARTIAL_SUM_FAMILIES[family]
    except KeyError:
        raise ComputationError(
            f"Unknown partial-sum family '{family}'. "
            f"Available: {', '.join(PARTIAL_SUM_FAMILIES)}"
        ) from None


def partial_sum_coefficients(
    q: Sequence[float], family: str | PartialSumFamily
) -> Tuple[float, float]:
    """(a, b) = (base . q, step . q) of a family at q."""
    embedding = a2m2_embedding()
    point = tuple(float(x) for x in q)
    embedding.check_ambient(point, "Point q")
    base, step = _family(family).forms(embedding)
    return float(dot(base, point)), float(dot(step, point))


def partial_sum_potential(
    q: Sequence[float],
    family: str | PartialSumFamily,
    g: float = 1.0,
    tolerance: float = POLE_TOLERANCE,
) -> float:
    """Closed form of a chain sum of g / ((base + k step) . q)^2.

    One-sided chains (k >= 0) give g Psi(a/b) / b^2; the two-sided chain gives
    g pi^2 / (b^2 sin^2(pi a / b)).

    Raises:
        PoleEncountered: If b = 0 or the trigamma argument is a pole
    """
    if g == 0:
        return 0.0
    preset = _family(family)
    a, b = partial_sum_coefficients(q, preset)
    if preset.two_sided:
        return g * inverse_square_lattice_sum(a, b, tolerance)
    return g * one_sided_lattice_sum(a, b, tolerance)


def partial_sum_truncated(
    q: Sequence[float], family: str | PartialSumFamily, cutoff: int, g: float = 1.0
) -> float:
    """Direct chain sum over 0 <= k <= cutoff (|k| <= cutoff when two-sided)."""
    preset = _family(family)
    a, b = partial_sum_coefficients(q, preset)
    k = np.arange(-cutoff if preset.two_sided else 0, cutoff + 1, dtype=float)
    projections = a + b * k
    if np.any(np.abs(projections) <= SINE_TOLERANCE):
        raise PoleEncountered(preset.name, a)
    return float(g * np.sum(1.0 / projections**2))


class PartialSumPotential(BasePotential):
    """A preset chain sum as a potential object."""

    def __init__(
        self,
        family: str | PartialSumFamily,
        coupling: float = 1.0,
        pole_tolerance: float = POLE_TOLERANCE,
    ) -> None:
        super().__init__(a2m2_embedding(), coupling)
        self.family = _family(family)
        self.pole_tolerance = pole_tolerance

    def evaluate(self, q: Sequence[float]) -> float:
        return partial_sum_potential(
            q, self.family, self.coupling, self.pole_tolerance
        )

    def term_values(self, q: Sequence[float]) -> Dict[str, float]:
        a, b = partial_sum_coefficients(q, self.family)
        return {"a": a, "b": b}


def _orbit_projections(
    gens: Sequence[OrbitGenerator],
    q: Sequence[float],
    cutoff: int,
    cartan: Optional[CartanMatrix],
    embedding: Optional[LatticeEmbedding],
) -> List[Tuple[float, np.ndarray, np.ndarray]]:
    cartan = cartan or build_extended_A(2, 2).cartan_matrix()
    embedding = embedding or a2m2_embedding()
    point = np.array([float(x) for x in q])
    embedding.check_ambient(tuple(point), "Point q")

    result = []
    for gen in gens:
        matrix = word_matrix(gen.word, cartan)
        elements = orbit(matrix, gen.rep, -cutoff, cutoff)
        forms = np.array(
            [
                [float(f) for f in ambient_form(embed(root, embedding), embedding)]
                for _, root in elements
            ]
        )
        powers = np.array([k for k, _ in elements])
        projections = forms @ point
        if np.any(np.abs(projections) <= SINE_TOLERANCE):
            raise PoleEncountered(gen.label or str(gen.rep.coeffs), 0.0)
        result.append((gen.coupling, powers, projections))
    return result


def orbit_sum(
    gens: Sequence[OrbitGenerator],
    q: Sequence[float],
    cutoff: int,
    cartan: Optional[CartanMatrix] = None,
    embedding: Optional[LatticeEmbedding] = None,
) -> float:
    """Truncated raw orbit sum over generators and powers |n| <= cutoff.

    `cartan` and `embedding` default to (A_2)_-2.
    """
    total = 0.0
    for coupling, _, projections in _orbit_projections(
        gens, q, cutoff, cartan, embedding
    ):
        total += coupling * float(np.sum(1.0 / projections**2))
    return total


def richardson_orbit_sum(
    gens: Sequence[OrbitGenerator],
    q: Sequence[float],
    cutoff: int,
    cartan: Optional[CartanMatrix] = None,
    embedding: Optional[LatticeEmbedding] = None,
) -> float:
    """Richardson limit of the raw orbit sums at cutoffs N, 2N and 4N."""
    data = _orbit_projections(gens, q, 4 * cutoff, cartan, embedding)

    def partial(limit: int) -> float:
        total = 0.0
        for coupling, powers, projections in data:
            window = np.abs(powers) <= limit
            total += coupling * float(np.sum(1.0 / projections[window] ** 2))
        return total

    value = richardson(partial(cutoff), partial(2 * cutoff), partial(4 * cutoff))
    logger.debug(
        "Richardson orbit sum",
        extra={"generators": len(gens), "cutoff": cutoff, "value": value},
    )
    return value
