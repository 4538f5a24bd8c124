"""Minimal linear recurrences, characteristic roots and closed forms of orbits."""

import math
from concurrent.futures import ThreadPoolExecutor
from enum import Enum
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import sympy as sp
from pydantic import ConfigDict

from kmweyl.base import FrozenModel
from kmweyl.exceptions import IllConditioned, NoRecurrenceFound
from kmweyl.logger import get_logger
from kmweyl.roots import RootVector
from kmweyl.utils import worker_count
from kmweyl.weyl import CoxeterMatrix, cyclotomic_index, orbit

logger = get_logger("recur")

X = sp.Symbol("x")

SOLVE_DPS = 50
ROOT_RESIDUAL = 1e-10


class LinearRecurrence(FrozenModel):
    """a(k) = c_1 a(k-1) + ... + c_N a(k-N) with rational c_i."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: Tuple[Fraction, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def next_term(self, history: Sequence[Fraction | int]) -> Fraction:
        """Value following `history`, whose last N entries are used."""
        window = history[len(history) - self.order :]
        return sum(
            (c * Fraction(a) for c, a in zip(self.coeffs, reversed(window))),
            start=Fraction(0),
        )

    def extend(self, seq: Sequence[int | Fraction], length: int) -> List[Fraction]:
        """Continue a sequence with the recurrence up to `length` terms."""
        terms = [Fraction(a) for a in seq]
        while len(terms) < length:
            terms.append(self.next_term(terms))
        return terms

    def is_satisfied_by(self, seq: Sequence[int | Fraction]) -> bool:
        return all(
            Fraction(seq[k]) == self.next_term(seq[:k])
            for k in range(self.order, len(seq))
        )

    def as_ints(self) -> Tuple[int, ...]:
        """Coefficients as ints; raises ValueError if any is not integral."""
        if any(c.denominator != 1 for c in self.coeffs):
            raise ValueError(f"recurrence {self.coeffs} is not integral")
        return tuple(int(c) for c in self.coeffs)


def fit_min_recurrence(seq: Sequence[int | Fraction]) -> LinearRecurrence:
    """Minimal-order exact recurrence of a sequence (Berlekamp-Massey over Q).

    Args:
        seq: Terms a(0), a(1), ...; at least 2N + 2 terms for order N

    Returns:
        The minimal recurrence, verified on every supplied term

    Raises:
        NoRecurrenceFound: If no order <= len(seq)/2 - 1 fits
    """
    terms = [Fraction(a) for a in seq]
    connection = [Fraction(1)]
    previous = [Fraction(1)]
    length = 0
    shift = 1
    last_discrepancy = Fraction(1)

    for n, term in enumerate(terms):
        discrepancy = term + sum(
            (connection[i] * terms[n - i] for i in range(1, length + 1)),
            start=Fraction(0),
        )
        if discrepancy == 0:
            shift += 1
            continue

        factor = discrepancy / last_discrepancy
        update = list(connection)
        needed = len(previous) + shift
        if len(update) < needed:
            update.extend([Fraction(0)] * (needed - len(update)))
        for i, value in enumerate(previous):
            update[i + shift] -= factor * value

        if 2 * length <= n:
            previous = connection
            length = n + 1 - length
            last_discrepancy = discrepancy
            shift = 1
        else:
            shift += 1
        connection = update

    max_order = len(terms) // 2 - 1
    if length > max_order:
        raise NoRecurrenceFound(len(terms), max_order)

    connection.extend([Fraction(0)] * (length + 1 - len(connection)))
    recurrence = LinearRecurrence(coeffs=tuple(-c for c in connection[1 : length + 1]))
    if not recurrence.is_satisfied_by(terms):
        raise NoRecurrenceFound(len(terms), max_order)
    return recurrence


def char_poly(recurrence: LinearRecurrence) -> sp.Poly:
    """x^N - c_1 x^(N-1) - ... - c_N, scaled to primitive integer coefficients."""
    denominator = math.lcm(*(c.denominator for c in recurrence.coeffs), 1)
    coeffs = [denominator] + [
        -c.numerator * (denominator // c.denominator) for c in recurrence.coeffs
    ]
    return sp.Poly(coeffs, X, domain="ZZ").primitive()[1]


def recurrence_from_poly(poly: sp.Poly) -> LinearRecurrence:
    """Inverse of char_poly for a polynomial with nonzero leading coefficient."""
    all_coeffs = poly.all_coeffs()
    lead = sp.Rational(all_coeffs[0])
    coeffs = tuple(
        Fraction(int(sp.numer(-c / lead)), int(sp.denom(-c / lead)))
        for c in all_coeffs[1:]
    )
    return LinearRecurrence(coeffs=coeffs)


def fit_coxeter_recurrence(
    matrix: CoxeterMatrix, length: Optional[int] = None
) -> LinearRecurrence:
    """Recurrence shared by every entry sequence (C^k)_{nu,mu}, k >= 0.

    This is the lcm of the per-entry minimal polynomials, i.e. the minimal
    polynomial of C, and is verified exactly as C^N = sum c_i C^(N-i).
    """
    size = matrix.rank
    length = length or 2 * size + 4
    powers = [matrix.power(0)]
    for _ in range(1, length):
        powers.append(powers[-1] @ matrix)

    cells = [(i, j) for i in range(size) for j in range(size)]

    def entry_poly(cell: Tuple[int, int]) -> sp.Poly:
        i, j = cell
        return char_poly(fit_min_recurrence([p.entries[i][j] for p in powers]))

    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        polys = list(executor.map(entry_poly, cells))

    minimal = sp.Poly(1, X, domain="ZZ")
    for poly in polys:
        minimal = minimal.lcm(poly)
    minimal = sp.Poly(minimal, X, domain="QQ").monic()
    recurrence = recurrence_from_poly(minimal)

    if not check_matrix_recurrence(recurrence, matrix):
        raise NoRecurrenceFound(length, size)
    logger.info(
        f"Coxeter recurrence of order {recurrence.order}",
        extra={"coeffs": [str(c) for c in recurrence.coeffs]},
    )
    return recurrence


def check_matrix_recurrence(
    recurrence: LinearRecurrence, matrix: CoxeterMatrix
) -> bool:
    """Exact check of C^N = sum_i c_i C^(N-i)."""
    order = recurrence.order
    powers = [matrix.power(k).as_sympy() for k in range(order + 1)]
    combination = sp.zeros(matrix.rank, matrix.rank)
    for i, c in enumerate(recurrence.coeffs, start=1):
        combination += sp.Rational(c.numerator, c.denominator) * powers[order - i]
    return bool(powers[order] == combination)


class RootKind(str, Enum):
    INTEGER = "integer"
    QUADRATIC_SURD = "quadratic-surd"
    ROOT_OF_UNITY = "root-of-unity"
    NUMERIC = "numeric-complex"


class CharRoot(FrozenModel):
    """Root of a characteristic polynomial with its classification.

    `surd` holds (a, b, D, c) for (a + b sqrt(D))/c, `unity` holds (p, q) for
    exp(2 pi i p/q). `factor` is the irreducible integer factor the root came
    from, highest degree first.
    """

    kind: RootKind
    real: float
    imag: float
    multiplicity: int
    factor: Tuple[int, ...]
    integer: Optional[int] = None
    surd: Optional[Tuple[int, int, int, int]] = None
    unity: Optional[Tuple[int, int]] = None

    @property
    def value(self) -> complex:
        return complex(self.real, self.imag)

    def exact(self) -> str:
        """Human-readable exact value, or the float for numeric roots."""
        if self.kind == RootKind.INTEGER:
            return str(self.integer)
        if self.kind == RootKind.QUADRATIC_SURD and self.surd is not None:
            a, b, d, c = self.surd
            sign = "+" if b >= 0 else "-"
            return f"({a}{sign}{abs(b)}*sqrt({d}))/{c}"
        if self.kind == RootKind.ROOT_OF_UNITY and self.unity is not None:
            p, q = self.unity
            return f"exp(2*pi*i*{p}/{q})"
        return repr(self.value)

    def high_precision(self) -> mpmath.mpc | mpmath.mpf:
        """The root at the current mpmath working precision."""
        if self.kind == RootKind.INTEGER and self.integer is not None:
            return mpmath.mpf(self.integer)
        if self.kind == RootKind.QUADRATIC_SURD and self.surd is not None:
            a, b, d, c = self.surd
            return (a + b * mpmath.sqrt(d)) / mpmath.mpf(c)
        if self.kind == RootKind.ROOT_OF_UNITY and self.unity is not None:
            p, q = self.unity
            return mpmath.expjpi(mpmath.mpf(2 * p) / q)
        candidates = mpmath.polyroots(list(self.factor), maxsteps=200, extraprec=100)
        return min(candidates, key=lambda z: abs(z - self.value))


def _square_part(n: int) -> Tuple[int, int]:
    """(s, D) with n = s^2 D and D squarefree."""
    sign = -1 if n < 0 else 1
    square = 1
    rest = abs(n)
    for prime, exponent in sp.factorint(rest).items():
        square *= prime ** (exponent // 2)
    return square, sign * (rest // (square * square))


def _classify_factor(factor: sp.Poly, multiplicity: int) -> List[CharRoot]:
    coeffs = tuple(int(c) for c in factor.all_coeffs())
    degree = factor.degree()

    if degree == 1:
        lead, const = coeffs
        if const % lead == 0:
            value = -const // lead
            return [
                CharRoot(
                    kind=RootKind.INTEGER,
                    real=float(value),
                    imag=0.0,
                    multiplicity=multiplicity,
                    factor=coeffs,
                    integer=value,
                )
            ]

    index = cyclotomic_index(factor) if degree >= 2 else None
    if index is not None:
        roots = []
        for p in range(1, index):
            if math.gcd(p, index) != 1:
                continue
            angle = 2 * math.pi * p / index
            roots.append(
                CharRoot(
                    kind=RootKind.ROOT_OF_UNITY,
                    real=math.cos(angle),
                    imag=math.sin(angle),
                    multiplicity=multiplicity,
                    factor=coeffs,
                    unity=(p, index),
                )
            )
        return roots

    if degree == 2:
        a2, a1, a0 = coeffs
        s, d = _square_part(a1 * a1 - 4 * a2 * a0)
        roots = []
        for sign in (1, -1):
            num, rad, den = -a1, sign * s, 2 * a2
            common = math.gcd(math.gcd(num, rad), den)
            if den < 0:
                common = -common
            num, rad, den = num // common, rad // common, den // common
            value = complex(num + rad * complex(d) ** 0.5) / den
            roots.append(
                CharRoot(
                    kind=RootKind.QUADRATIC_SURD,
                    real=value.real,
                    imag=value.imag,
                    multiplicity=multiplicity,
                    factor=coeffs,
                    surd=(num, rad, d, den),
                )
            )
        return roots

    with mpmath.workdps(SOLVE_DPS):
        numeric = mpmath.polyroots(list(coeffs), maxsteps=200, extraprec=100)
    return [
        CharRoot(
            kind=RootKind.NUMERIC,
            real=float(mpmath.re(z)),
            imag=float(mpmath.im(z)),
            multiplicity=multiplicity,
            factor=coeffs,
        )
        for z in numeric
    ]


def char_roots(poly: sp.Poly) -> List[CharRoot]:
    """Classify all roots of an integer polynomial.

    Factors over the integers, then labels each irreducible factor's roots as
    integer, root of unity (cyclotomic factor), quadratic surd, or numeric.
    Roots are sorted by (real, imag).
    """
    _, factors = sp.Poly(poly, X).factor_list()
    roots: List[CharRoot] = []
    for factor, multiplicity in factors:
        if factor.LC() < 0:
            factor = -factor
        roots.extend(_classify_factor(factor, multiplicity))

    float_coeffs = [float(c) for c in sp.Poly(poly, X).all_coeffs()]
    scale = max(abs(c) for c in float_coeffs)
    for root in roots:
        z = root.value
        residual = abs(sum(c * z**p for p, c in enumerate(reversed(float_coeffs))))
        bound = ROOT_RESIDUAL * scale * max(1.0, abs(z)) ** len(float_coeffs)
        if residual > bound:
            logger.warning(
                f"Root {root.exact()} has residual {residual:.3e}",
                extra={"kind": root.kind.value},
            )

    roots.sort(key=lambda r: (round(r.real, 12), round(r.imag, 12)))
    return roots


class ClosedForm(FrozenModel):
    """a_nu(k) = sum_j poly_{nu,j}(k) lambda_j^k over the distinct roots.

    `coefficients[component][root][power]` multiplies k^power lambda^k.
    """

    roots: Tuple[CharRoot, ...]
    coefficients: Tuple[Tuple[Tuple[complex, ...], ...], ...]

    @property
    def components(self) -> int:
        return len(self.coefficients)

    def evaluate(self, k: int) -> Tuple[complex, ...]:
        powers = [root.value**k for root in self.roots]
        return tuple(
            sum(
                (
                    sum(c * k**p for p, c in enumerate(poly)) * lam
                    for poly, lam in zip(component, powers)
                ),
                start=0j,
            )
            for component in self.coefficients
        )

    def evaluate_real(self, k: int) -> Tuple[float, ...]:
        return tuple(value.real for value in self.evaluate(k))

    def polynomial_degree(self) -> int:
        """Largest power of k carrying a nonzero coefficient."""
        degree = 0
        for component in self.coefficients:
            for poly in component:
                for p, c in enumerate(poly):
                    if abs(c) > 1e-12:
                        degree = max(degree, p)
        return degree


def _solve(
    roots: Sequence[CharRoot], sequences: Sequence[Sequence[int | Fraction]], k0: int
) -> Tuple[Tuple[Tuple[complex, ...], ...], ...]:
    """Confluent Vandermonde solve at high precision for every component."""
    with mpmath.workdps(SOLVE_DPS):
        lambdas = [root.high_precision() for root in roots]
        columns = [
            (lam, p)
            for lam, root in zip(lambdas, roots)
            for p in range(root.multiplicity)
        ]
        size = len(columns)
        system = mpmath.matrix(size, size)
        for row in range(size):
            k = k0 + row
            for col, (lam, p) in enumerate(columns):
                system[row, col] = (mpmath.mpf(k) ** p if p else 1) * lam**k

        solved = []
        for seq in sequences:
            rhs = mpmath.matrix(
                [
                    mpmath.mpf(Fraction(a).numerator) / Fraction(a).denominator
                    for a in seq[:size]
                ]
            )
            x = mpmath.lu_solve(system, rhs)
            flat = [complex(x[i]) for i in range(size)]
            per_root = []
            offset = 0
            for root in roots:
                per_root.append(tuple(flat[offset : offset + root.multiplicity]))
                offset += root.multiplicity
            solved.append(tuple(per_root))
    return tuple(solved)


def solve_closed_form(
    recurrence: LinearRecurrence,
    init: Sequence[int | Fraction],
    tolerance: float = 1e-8,
) -> ClosedForm:
    """Closed form of the sequence generated by `recurrence` from `init`.

    Raises:
        IllConditioned: If the closed form misses any of the first 2N terms by
            more than `tolerance` relative
    """
    order = recurrence.order
    if order == 0:
        return ClosedForm(roots=(), coefficients=((),))
    roots = tuple(char_roots(char_poly(recurrence)))
    coefficients = _solve(roots, [list(init[:order])], 0)
    closed = ClosedForm(roots=roots, coefficients=coefficients)

    reference = recurrence.extend(init[:order], 2 * order)
    worst = max(
        abs(closed.evaluate(k)[0] - float(reference[k]))
        / (1 + abs(float(reference[k])))
        for k in range(2 * order)
    )
    if worst > tolerance:
        raise IllConditioned(worst, tolerance)
    return closed


def orbit_closed_form(
    matrix: CoxeterMatrix,
    seed: RootVector,
    tolerance: float = 1e-8,
    recurrence: Optional[LinearRecurrence] = None,
) -> ClosedForm:
    """Closed form of C^k seed with one component per label."""
    recurrence = recurrence or fit_coxeter_recurrence(matrix)
    order = recurrence.order
    roots = tuple(char_roots(char_poly(recurrence)))
    window = orbit(matrix, seed, 0, 2 * order - 1)
    sequences = [
        [element.coeffs[nu] for _, element in window] for nu in range(matrix.rank)
    ]
    closed = ClosedForm(roots=roots, coefficients=_solve(roots, sequences, 0))

    worst = verify_closed_form(closed, matrix, seed, (0, 2 * order - 1))
    if worst > tolerance:
        raise IllConditioned(worst, tolerance)
    return closed


def verify_closed_form(
    closed: ClosedForm,
    matrix: CoxeterMatrix,
    seed: RootVector,
    k_range: Tuple[int, int],
) -> float:
    """Max over k and components of |cf(k) - exact| / (1 + |exact|)."""
    worst = 0.0
    for k, element in orbit(matrix, seed, k_range[0], k_range[1]):
        for approx, exact in zip(closed.evaluate(k), element.coeffs):
            worst = max(worst, abs(approx - exact) / (1 + abs(exact)))
    return worst


def affine_power_closed_form(seed: Sequence[int], k: int) -> Tuple[Fraction, ...]:
    """Exact coefficients of sigma_a^k(alpha) for (A_2)_-2, sigma_a = s0 s1 s2.

    `seed` is (p, q, l, m, n) in label order -2..2. The alpha_-2 and alpha_-1
    coefficients are fixed; the affine ones are quadratic in k with a
    (-1)^k part.
    """
    p, q, l, m, n = (Fraction(c) for c in seed)
    sign = 1 if k % 2 == 0 else -1
    alternating = sign * (2 * l - 4 * m + 2 * n - q) / 8
    a0 = (6 * k**2 + 1) * q / 8 + (6 * k + 3) * l / 4 - (6 * k + 1) * n / 4 + m / 2
    a1 = (6 * k**2 - 4 * k - 1) * q / 8 + (6 * k + 1) * l / 4 - (6 * k - 1) * n / 4
    a1 += m / 2
    a2 = (6 * k**2 - 8 * k + 1) * q / 8 + (6 * k - 1) * l / 4 - (6 * k - 3) * n / 4
    a2 += m / 2
    return (p, q, a0 + alternating, a1 - alternating, a2 + alternating)


class LucasFibonacciRow(FrozenModel):
    """Both Lucas/Fibonacci identities evaluated at one k."""

    k: int
    lucas_2k: int
    fibonacci_k: int
    scaled_identity: bool
    standard_identity: bool


def lucas_fibonacci_report(k_max: int) -> List[LucasFibonacciRow]:
    """Evaluate 4(L_2k - 2) = F_k^2 and L_2k - 2(-1)^k = 5 F_k^2 for k = 0..k_max."""
    rows = []
    for k in range(k_max + 1):
        lucas = int(sp.lucas(2 * k))
        fib = int(sp.fibonacci(k))
        rows.append(
            LucasFibonacciRow(
                k=k,
                lucas_2k=lucas,
                fibonacci_k=fib,
                scaled_identity=4 * (lucas - 2) == fib * fib,
                standard_identity=lucas - 2 * (-1) ** k == 5 * fib * fib,
            )
        )
    return rows
