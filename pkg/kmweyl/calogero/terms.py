"""Inverse-square potential terms from enumerated roots and Coxeter orbits."""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from pydantic import model_validator

from kmweyl.base import FrozenModel
from kmweyl.calogero.base import BasePotential
from kmweyl.dynkin import CartanMatrix, build_extended_A
from kmweyl.exceptions import PoleEncountered
from kmweyl.logger import get_logger
from kmweyl.roots import (
    LatticeEmbedding,
    RootVector,
    ambient_form,
    ambient_inner,
    dot,
    embed,
    enumerate_real_roots,
    inner,
)
from kmweyl.utils import worker_count
from kmweyl.weyl import OrbitCache, WeylWord, word_matrix

logger = get_logger("calogero.terms")

POLE_TOLERANCE = 1e-12


def index_label(coeffs: Sequence[int]) -> str:
    """V_D index label: "v00334" for single digits, "v(0,0,12,3,4)" otherwise."""
    if all(0 <= c <= 9 for c in coeffs):
        return "v" + "".join(str(c) for c in coeffs)
    return "v(" + ",".join(str(c) for c in coeffs) + ")"


class PotentialTerm(FrozenModel):
    """One term coupling / (form . q)^2 of a Calogero potential.

    `form` is the metric contraction of an embedded root, so its plain dot
    product with q equals the ambient inner product alpha . q.
    """

    form: Tuple[int, ...]
    coupling: float = 1.0
    label: str = ""
    root: Optional[RootVector] = None

    @model_validator(mode="after")
    def _check_form(self) -> "PotentialTerm":
        if not any(self.form):
            raise ValueError("potential term form must be nonzero")
        return self

    def key(self) -> Tuple[int, ...]:
        """Sign-insensitive identity of the term."""
        for value in self.form:
            if value != 0:
                return self.form if value > 0 else tuple(-f for f in self.form)
        return self.form

    def negated(self) -> "PotentialTerm":
        return self.model_copy(update={"form": tuple(-f for f in self.form)})

    def value(self, q: Sequence[float], tolerance: float = POLE_TOLERANCE) -> float:
        """coupling / (form . q)^2.

        Raises:
            PoleEncountered: If |form . q| is below `tolerance`
        """
        projection = float(dot(self.form, q))
        if abs(projection) <= tolerance:
            raise PoleEncountered(self.label or str(self.form), projection)
        return self.coupling / projection**2


class OrbitGenerator(FrozenModel):
    """Representative root gamma together with the word whose powers sweep it."""

    rep: RootVector
    word: WeylWord
    coupling: float = 1.0
    label: str = ""

    def is_valid(self, cartan: CartanMatrix) -> bool:
        """True iff the representative is a real root of `cartan`."""
        return inner(self.rep, self.rep, cartan) == 2


def kinetic(p: Sequence[float], embedding: LatticeEmbedding) -> float:
    """Kinetic energy 1/2 p.p in the ambient metric."""
    point = tuple(float(x) for x in p)
    return 0.5 * ambient_inner(point, point, embedding)


def root_term(
    root: RootVector,
    embedding: LatticeEmbedding,
    coupling: float = 1.0,
    label: Optional[str] = None,
) -> PotentialTerm:
    """Term of a root: form = ambient_form(embed(root))."""
    return PotentialTerm(
        form=ambient_form(embed(root, embedding), embedding),
        coupling=coupling,
        label=label if label is not None else index_label(root.coeffs),
        root=root,
    )


def vd_terms(
    cartan: CartanMatrix,
    embedding: LatticeEmbedding,
    bounds: Sequence[Tuple[int, int]],
    coupling: float = 1.0,
    couplings: Optional[Mapping[str, float]] = None,
    threads: Optional[int] = None,
) -> List[PotentialTerm]:
    """One term per enumerated real root inside `bounds`, sign-deduplicated.

    Args:
        cartan: Cartan matrix of the algebra
        embedding: Lattice embedding of the same algebra
        bounds: Per-label (lo, hi) pairs in label order
        coupling: Global coupling g
        couplings: Per-term overrides keyed by index label
        threads: Worker threads for the enumeration

    Returns:
        Terms in the graded-lexicographic order of their roots
    """
    overrides = couplings or {}
    terms: List[PotentialTerm] = []
    seen: Set[Tuple[int, ...]] = set()
    for root in enumerate_real_roots(cartan, bounds=bounds, threads=threads):
        canonical = root.canonical()
        if canonical.coeffs in seen:
            continue
        seen.add(canonical.coeffs)
        label = index_label(root.coeffs)
        terms.append(
            root_term(root, embedding, overrides.get(label, coupling), label)
        )
    logger.info(
        f"Built {len(terms)} enumerated terms",
        extra={"bounds": [list(b) for b in bounds], "count": len(terms)},
    )
    return terms


def vc_terms(
    gens: Sequence[OrbitGenerator],
    cartan: CartanMatrix,
    embedding: LatticeEmbedding,
    k_min: int,
    k_max: int,
    cache: Optional[OrbitCache] = None,
    threads: Optional[int] = None,
) -> List[PotentialTerm]:
    """Orbit sweep C^k gamma_i for k in [k_min, k_max], sign-deduplicated.

    Terms are labelled "g<i>(<k>)"; a form already produced by an earlier
    generator or power is skipped.
    """
    cache = cache or OrbitCache()

    def sweep(item: Tuple[int, OrbitGenerator]) -> List[PotentialTerm]:
        position, gen = item
        matrix = word_matrix(gen.word, cartan)
        return [
            root_term(element, embedding, gen.coupling, f"g{position}({k})")
            for k, element in cache.orbit(matrix, gen.rep, k_min, k_max)
        ]

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as executor:
        sweeps = list(executor.map(sweep, enumerate(gens)))

    terms: List[PotentialTerm] = []
    seen: Set[Tuple[int, ...]] = set()
    for sweep_terms in sweeps:
        for term in sweep_terms:
            if term.key() not in seen:
                seen.add(term.key())
                terms.append(term)
    return terms


class TermSumPotential(BasePotential):
    """Finite sum of explicit inverse-square terms."""

    def __init__(
        self,
        terms: Sequence[PotentialTerm],
        embedding: LatticeEmbedding,
        pole_tolerance: float = POLE_TOLERANCE,
    ) -> None:
        super().__init__(embedding)
        self.terms = list(terms)
        self.pole_tolerance = pole_tolerance
        for term in self.terms:
            embedding.check_ambient(term.form, "Term form")

    def evaluate(self, q: Sequence[float]) -> float:
        return sum(self.term_values(q).values(), 0.0)

    def term_values(self, q: Sequence[float]) -> Dict[str, float]:
        values: Dict[str, float] = {}
        for position, term in enumerate(self.terms):
            name = term.label or f"t{position}"
            values[name] = values.get(name, 0.0) + term.value(q, self.pole_tolerance)
        return values


AFFINE_CONJUGATORS: Tuple[Tuple[int, ...], ...] = (
    (),
    (0,),
    (1,),
    (1, 0),
    (0, 1),
    (0, 1, 0),
    (2, 0),
    (2, 1),
    (2, 0, 2),
)


def affine_generators(
    cartan: Optional[CartanMatrix] = None, coupling: float = 1.0
) -> List[OrbitGenerator]:
    """The nine generators of the Weyl-invariant affine orbit potential.

    For each conjugator W the representative is W(alpha_2) and the word is
    W sigma_a W^-1 with sigma_a = sigma_0 sigma_1 sigma_2, so the n-th orbit
    element is W sigma_a^n (alpha_2). `cartan` defaults to (A_2)_-2; any
    diagram containing the labels 0, 1, 2 of the affine A_2 sub-diagram works.
    """
    cartan = cartan or build_extended_A(2, 2).cartan_matrix()
    sigma_a = WeylWord(letters=(0, 1, 2))
    alpha2 = RootVector.simple(cartan, 2)
    gens: List[OrbitGenerator] = []
    for position, letters in enumerate(AFFINE_CONJUGATORS):
        conjugator = WeylWord(letters=letters)
        gens.append(
            OrbitGenerator(
                rep=word_matrix(conjugator, cartan).apply(alpha2),
                word=conjugator + sigma_a + conjugator.reversed(),
                coupling=coupling,
                label=f"W{position}",
            )
        )
    return gens


def coxeter_orbit_generator(
    cartan: Optional[CartanMatrix] = None, coupling: float = 1.0
) -> OrbitGenerator:
    """Single generator: alpha_2 swept by sigma_a."""
    cartan = cartan or build_extended_A(2, 2).cartan_matrix()
    return OrbitGenerator(
        rep=RootVector.simple(cartan, 2),
        word=WeylWord(letters=(0, 1, 2)),
        coupling=coupling,
        label="sigma_a",
    )
