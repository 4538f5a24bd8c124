"""Tests for parsing and formatting helpers."""

from fractions import Fraction

import pytest

from kmweyl.exceptions import InvalidAlgebraSpec, InvalidBounds, InvalidWordFormat
from kmweyl.utils import (
    THREADS_ENV_VAR,
    format_complex,
    format_float,
    format_fraction,
    parse_algebra,
    parse_bounds,
    parse_float_list,
    parse_int_list,
    parse_range,
    worker_count,
)


class TestParsing:
    """Test the string parsers shared by the CLI and the config layer."""

    def test_parse_algebra(self) -> None:
        """Test that aNmM strings map to (n, m)."""
        assert parse_algebra("a2m2") == (2, 2)
        assert parse_algebra(" A3M2 ") == (3, 2)
        assert parse_algebra("a2m0") == (2, 0)

    def test_parse_algebra_rejects_other_series(self) -> None:
        """Test that malformed algebra strings raise InvalidAlgebraSpec."""
        with pytest.raises(InvalidAlgebraSpec) as exc_info:
            parse_algebra("e10")
        assert exc_info.value.spec == "e10"

    def test_parse_int_list(self) -> None:
        """Test comma-separated words and seeds, including negative labels."""
        assert parse_int_list("-2,-1,0,1,2") == (-2, -1, 0, 1, 2)
        assert parse_int_list("") == ()

    def test_parse_int_list_rejects_garbage(self) -> None:
        """Test that non-integer entries raise InvalidWordFormat."""
        with pytest.raises(InvalidWordFormat):
            parse_int_list("0,one,2")

    def test_parse_float_list(self) -> None:
        """Test ambient coordinates parse as floats."""
        assert parse_float_list("0.3,-0.7,1e-3") == (0.3, -0.7, 0.001)
        with pytest.raises(InvalidWordFormat):
            parse_float_list("0.3,,1")

    def test_parse_range(self) -> None:
        """Test inclusive ranges with negative ends."""
        assert parse_range("-10:10") == (-10, 10)
        assert parse_range("3:3") == (3, 3)

    @pytest.mark.parametrize("text", ["10:-10", "1", "a:b", "1:2:3"])
    def test_parse_range_rejects_malformed(self, text: str) -> None:
        """Test that empty or malformed ranges raise InvalidBounds."""
        with pytest.raises(InvalidBounds):
            parse_range(text)

    def test_parse_bounds(self) -> None:
        """Test per-label bounds in label order."""
        assert parse_bounds("0:0,0:0,0:5,0:5,0:5") == [(0, 0)] * 2 + [(0, 5)] * 3


class TestWorkerCount:
    """Test worker-thread resolution."""

    def test_explicit_request_wins(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that an explicit thread count overrides the environment."""
        monkeypatch.setenv(THREADS_ENV_VAR, "7")
        assert worker_count(3) == 3

    def test_environment_variable(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that KMWEYL_THREADS is honoured when nothing is requested."""
        monkeypatch.setenv(THREADS_ENV_VAR, "5")
        assert worker_count() == 5

    def test_bad_environment_falls_back(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """Test that an unparsable variable falls back to the CPU count."""
        monkeypatch.setenv(THREADS_ENV_VAR, "many")
        assert worker_count() >= 1


class TestFormatting:
    """Test report number formatting."""

    def test_format_float_uses_twelve_digits(self) -> None:
        """Test 12 significant digits."""
        assert format_float(1 / 3) == "0.333333333333"

    def test_format_complex_drops_zero_imaginary_part(self) -> None:
        """Test real values print without a j suffix."""
        assert format_complex(complex(2.5, 0.0)) == "2.5"
        assert format_complex(complex(0.5, -0.25)) == "0.5-0.25j"

    def test_format_fraction(self) -> None:
        """Test integral and proper fractions."""
        assert format_fraction(Fraction(-2, 1)) == "-2"
        assert format_fraction(Fraction(3, 8)) == "3/8"
