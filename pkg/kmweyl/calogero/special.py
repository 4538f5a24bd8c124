"""Trigamma, inverse-square lattice sums and their truncation oracles."""

import math

import mpmath
import numpy as np

from kmweyl.exceptions import PoleEncountered

POLE_TOLERANCE = 1e-12


def trigamma(x: float, tolerance: float = POLE_TOLERANCE) -> float:
    """Psi(x) = (ln Gamma(x))'' via mpmath's polygamma.

    Raises:
        PoleEncountered: At nonpositive integers
    """
    if x <= 0 and abs(x - round(x)) <= tolerance:
        raise PoleEncountered("trigamma", x)
    return float(mpmath.psi(1, x))


def _check_ratio(a: float, b: float, term: str, tolerance: float) -> float:
    if b == 0:
        raise PoleEncountered(term, b)
    ratio = a / b
    if abs(ratio - round(ratio)) <= tolerance:
        raise PoleEncountered(term, a)
    return ratio


def inverse_square_lattice_sum(
    a: float, b: float, tolerance: float = POLE_TOLERANCE
) -> float:
    """sum over all integers n of (a + b n)^-2 = pi^2 / (b^2 sin^2(pi a / b)).

    Raises:
        PoleEncountered: If b = 0 or a/b is an integer
    """
    ratio = _check_ratio(a, b, "lattice-sum", tolerance)
    return math.pi**2 / (b**2 * math.sin(math.pi * ratio) ** 2)


def hurwitz_lattice_sum(
    a: float, b: float, tolerance: float = POLE_TOLERANCE
) -> float:
    """The same two-sided sum as [zeta(2, x) + zeta(2, 1 - x)] / b^2, x = frac(a/b)."""
    ratio = _check_ratio(a, b, "lattice-sum", tolerance)
    x = ratio - math.floor(ratio)
    return float((mpmath.zeta(2, x) + mpmath.zeta(2, 1 - x)) / b**2)


def one_sided_lattice_sum(
    a: float, b: float, tolerance: float = POLE_TOLERANCE
) -> float:
    """sum over n >= 0 of (a + b n)^-2 = Psi(a/b) / b^2."""
    if b == 0:
        raise PoleEncountered("one-sided-sum", b)
    return trigamma(a / b, tolerance) / b**2


def infinite_quadratic_sum(a: float, b: float, g: float = 1.0) -> float:
    """sum over l >= 0 of g / (A + B l + (B^2 / 4A) l^2) = g (4A/B^2) Psi(2A/B).

    The denominator is the perfect square (2A + B l)^2 / 4A.
    """
    if a == 0 or b == 0:
        raise PoleEncountered("quadratic-sum", b if a else a)
    return g * (4 * a / b**2) * trigamma(2 * a / b)


def truncated_lattice_sum(a: float, b: float, cutoff: int) -> float:
    """Direct sum of (a + b n)^-2 over |n| <= cutoff."""
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    denominators = a + b * n
    if np.any(np.abs(denominators) <= POLE_TOLERANCE):
        raise PoleEncountered("lattice-sum", a)
    return float(np.sum(1.0 / denominators**2))


def truncated_one_sided_sum(a: float, b: float, cutoff: int) -> float:
    """Direct sum of (a + b n)^-2 over 0 <= n <= cutoff."""
    n = np.arange(0, cutoff + 1, dtype=float)
    denominators = a + b * n
    if np.any(np.abs(denominators) <= POLE_TOLERANCE):
        raise PoleEncountered("one-sided-sum", a)
    return float(np.sum(1.0 / denominators**2))


def richardson(s_n: float, s_2n: float, s_4n: float) -> float:
    """Three-point extrapolation removing the 1/N and 1/N^2 tails."""
    return (s_n - 6.0 * s_2n + 8.0 * s_4n) / 3.0
