"""Match enumerated potential terms against Coxeter orbits of representatives."""

from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from pydantic import Field

from kmweyl.base import FrozenModel
from kmweyl.calogero.terms import (
    OrbitGenerator,
    PotentialTerm,
    affine_generators,
    vd_terms,
)
from kmweyl.dynkin import CartanMatrix, build_extended_A
from kmweyl.exceptions import InvalidBounds, InvalidWordFormat
from kmweyl.logger import get_logger
from kmweyl.roots import RootVector, build_embedding
from kmweyl.utils import worker_count
from kmweyl.weyl import CoxeterMatrix, OrbitCache, WeylWord, word_matrix

logger = get_logger("calogero.matching")

MATCH_MODES = ("affine", "hyperbolic", "lorentzian")


class MatchRow(FrozenModel):
    """C_i^power gamma_i = sign * root of the enumerated term."""

    label: str
    root: RootVector
    form: Tuple[int, ...]
    orbit_id: int
    power: int
    sign: int
    coupling: float = 1.0


class MatchTable(FrozenModel):
    """Matched rows in input order plus the terms no orbit window reached."""

    rows: List[MatchRow] = Field(default_factory=list)
    unmatched: List[PotentialTerm] = Field(default_factory=list)
    orbits: int = 0

    def to_tsv(self) -> str:
        """Rows as TSV followed by the "# terms=... orbits=... unmatched=..." line."""
        lines = ["#vD-index\tambient-form\torbit-id\tpower\tsign"]
        for row in self.rows:
            form = ",".join(str(f) for f in row.form)
            lines.append(
                f"{row.label}\t{form}\t{row.orbit_id}\t{row.power}\t{row.sign:+d}"
            )
        for term in self.unmatched:
            form = ",".join(str(f) for f in term.form)
            lines.append(f"{term.label}\t{form}\t-\t-\t-")
        terms = len(self.rows) + len(self.unmatched)
        lines.append(
            f"# terms={terms} orbits={self.orbits} unmatched={len(self.unmatched)}"
        )
        return "\n".join(lines) + "\n"


Candidate = Tuple[int, int, int]


def _orbit_index(
    gens: Sequence[OrbitGenerator],
    cartan: CartanMatrix,
    k_window: int,
    cache: OrbitCache,
) -> Dict[Tuple[int, ...], List[Tuple[Candidate, RootVector]]]:
    """Canonical root -> [((|k|, i, k), element)] over all generator windows."""
    index: Dict[Tuple[int, ...], List[Tuple[Candidate, RootVector]]] = {}
    for position, gen in enumerate(gens):
        matrix = word_matrix(gen.word, cartan)
        for k, element in cache.orbit(matrix, gen.rep, -k_window, k_window):
            key = element.canonical().coeffs
            index.setdefault(key, []).append(((abs(k), position, k), element))
    return index


def match_terms(
    vd: Sequence[PotentialTerm],
    gens: Sequence[OrbitGenerator],
    cartan: CartanMatrix,
    k_window: int,
    cache: Optional[OrbitCache] = None,
    threads: Optional[int] = None,
) -> MatchTable:
    """Assign each enumerated term to (orbit, power, sign) by exact root equality.

    Among several matches the smallest |k| wins, then the smallest generator
    index, then the smaller k. Terms without a root, or outside every orbit
    window, are reported as unmatched.
    """
    cache = cache or OrbitCache()
    index = _orbit_index(gens, cartan, k_window, cache)

    def lookup(term: PotentialTerm) -> Optional[MatchRow]:
        if term.root is None:
            return None
        candidates = index.get(term.root.canonical().coeffs)
        if not candidates:
            return None
        (_, position, k), element = min(candidates, key=lambda item: item[0])
        return MatchRow(
            label=term.label,
            root=term.root,
            form=term.form,
            orbit_id=position,
            power=k,
            sign=1 if element == term.root else -1,
            coupling=term.coupling,
        )

    with ThreadPoolExecutor(max_workers=worker_count(threads)) as executor:
        found = list(executor.map(lookup, vd))

    rows = [row for row in found if row is not None]
    unmatched = [term for term, row in zip(vd, found) if row is None]
    logger.info(
        f"Matched {len(rows)} of {len(vd)} terms",
        extra={"orbits": len(gens), "unmatched": len(unmatched), "window": k_window},
    )
    return MatchTable(rows=rows, unmatched=unmatched, orbits=len(gens))


def find_orbit_representatives(
    vd: Sequence[PotentialTerm],
    matrix: CoxeterMatrix,
    cartan: CartanMatrix,
    k_window: int,
    coupling: float = 1.0,
    cache: Optional[OrbitCache] = None,
) -> List[OrbitGenerator]:
    """Greedy orbit cover of the enumerated terms.

    Terms are scanned in order; a term outside the (+-, k_window) orbit of
    every representative so far promotes its canonical root to a new one.

    Raises:
        InvalidWordFormat: If `matrix` does not record the word it came from
    """
    if matrix.word is None:
        raise InvalidWordFormat(
            "<matrix without word>", "a CoxeterMatrix built by word_matrix"
        )
    cache = cache or OrbitCache()
    covered: Set[Tuple[int, ...]] = set()
    gens: List[OrbitGenerator] = []
    for term in vd:
        if term.root is None:
            continue
        rep = term.root.canonical()
        if rep.coeffs in covered:
            continue
        for _, element in cache.orbit(matrix, rep, -k_window, k_window):
            covered.add(element.canonical().coeffs)
        gens.append(
            OrbitGenerator(
                rep=rep,
                word=matrix.word,
                coupling=coupling,
                label=f"gamma{len(gens) + 1}",
            )
        )
    logger.info(
        f"Found {len(gens)} orbit representatives",
        extra={"terms": len(vd), "window": k_window, "word": str(matrix.word)},
    )
    return gens


class MatchSetup(FrozenModel):
    """Terms and generators of one matching mode on (A_2)_-2."""

    mode: str
    cartan: CartanMatrix
    terms: List[PotentialTerm]
    generators: List[OrbitGenerator]


def _check_mode(mode: str) -> None:
    if mode not in MATCH_MODES:
        raise InvalidBounds(mode, f"mode must be one of {', '.join(MATCH_MODES)}")


def mode_bounds(mode: str, level: int) -> List[Tuple[int, int]]:
    """Per-label bounds (p, q, l, m, n) of a matching mode.

    affine fixes p = q = 0, hyperbolic fixes p = 0, lorentzian bounds nothing
    but the level.
    """
    _check_mode(mode)
    fixed = {"affine": 2, "hyperbolic": 1, "lorentzian": 0}[mode]
    return [(0, 0)] * fixed + [(0, level)] * (5 - fixed)


def mode_word(mode: str) -> WeylWord:
    """sigma_a, sigma_h or sigma_L as words of (A_2)_-2."""
    _check_mode(mode)
    first = {"affine": 0, "hyperbolic": -1, "lorentzian": -2}[mode]
    return WeylWord(letters=tuple(range(first, 3)))


def prepare_match(
    mode: str,
    level: int,
    k_window: int,
    coupling: float = 1.0,
    couplings: Optional[Mapping[str, float]] = None,
    bounds: Optional[Sequence[Tuple[int, int]]] = None,
    cache: Optional[OrbitCache] = None,
    threads: Optional[int] = None,
) -> MatchSetup:
    """Enumerated terms and orbit generators for a matching mode.

    The affine mode uses the fixed nine-generator family; the other modes
    build representatives greedily for sigma_h or sigma_L. Explicit `bounds`
    replace the box of `mode_bounds`; `couplings` override g per index label.
    """
    cartan = build_extended_A(2, 2).cartan_matrix()
    embedding = build_embedding(2, 2)
    box = mode_bounds(mode, level) if bounds is None else list(bounds)
    terms = vd_terms(cartan, embedding, box, coupling, couplings, threads=threads)
    if mode == "affine":
        gens = affine_generators(cartan, coupling)
    else:
        matrix = word_matrix(mode_word(mode), cartan)
        gens = find_orbit_representatives(
            terms, matrix, cartan, k_window, coupling, cache
        )
    return MatchSetup(mode=mode, cartan=cartan, terms=terms, generators=gens)
