"""Utility functions for the kmweyl package."""

import os
import re
from fractions import Fraction
from typing import List, Optional, Tuple

from kmweyl.exceptions import InvalidAlgebraSpec, InvalidBounds, InvalidWordFormat

THREADS_ENV_VAR = "KMWEYL_THREADS"

_ALGEBRA_PATTERN = re.compile(r"^a(\d+)m(\d+)$")


def parse_algebra(spec: str) -> Tuple[int, int]:
    """Parse an algebra string into its (n, m) pair.

    Args:
        spec: Algebra in format "aNmM", e.g. "a2m2" for (A_2)_-2

    Returns:
        Tuple (n, m)

    Raises:
        InvalidAlgebraSpec: If the string doesn't match the expected format
    """
    match = _ALGEBRA_PATTERN.match(spec.strip().lower())
    if match is None:
        raise InvalidAlgebraSpec(spec)

    return int(match.group(1)), int(match.group(2))


def parse_int_list(text: str) -> Tuple[int, ...]:
    """Parse a comma-separated list of integers such as a word or a seed.

    Raises:
        InvalidWordFormat: If any entry is not an integer
    """
    stripped = text.strip()
    if not stripped:
        return ()

    try:
        return tuple(int(part) for part in stripped.split(","))
    except ValueError:
        raise InvalidWordFormat(text) from None


def parse_float_list(text: str) -> Tuple[float, ...]:
    """Parse a comma-separated list of floats (ambient coordinates)."""
    try:
        return tuple(float(part) for part in text.strip().split(","))
    except ValueError:
        raise InvalidWordFormat(text, "comma-separated numbers") from None


def parse_range(text: str) -> Tuple[int, int]:
    """Parse an inclusive integer range "lo:hi" (either end may be negative).

    Raises:
        InvalidBounds: If the range is malformed or lo > hi
    """
    parts = text.strip().split(":")
    if len(parts) != 2:
        raise InvalidBounds(text, "expected 'lo:hi'")

    try:
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise InvalidBounds(text, "both ends must be integers") from None

    if lo > hi:
        raise InvalidBounds(text, f"lower end {lo} exceeds upper end {hi}")

    return lo, hi


def parse_bounds(text: str) -> List[Tuple[int, int]]:
    """Parse per-label bounds "lo:hi,lo:hi,..." in label order."""
    return [parse_range(part) for part in text.strip().split(",")]


def worker_count(requested: Optional[int] = None) -> int:
    """Number of worker threads to use.

    An explicit request wins, then the KMWEYL_THREADS environment variable,
    then the CPU count.
    """
    if requested is not None and requested > 0:
        return requested

    env_value = os.environ.get(THREADS_ENV_VAR, "").strip()
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            pass

    return max(1, os.cpu_count() or 1)


def format_float(value: float) -> str:
    """Format a float with 12 significant digits."""
    return f"{value:.12g}"


def format_complex(value: complex) -> str:
    """Format a complex number, dropping a vanishing imaginary part."""
    if abs(value.imag) <= 1e-15 * max(1.0, abs(value.real)):
        return format_float(value.real)
    sign = "+" if value.imag >= 0 else "-"
    return f"{format_float(value.real)}{sign}{format_float(abs(value.imag))}j"


def format_fraction(value: Fraction) -> str:
    """Format a rational as "p" or "p/q"."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
