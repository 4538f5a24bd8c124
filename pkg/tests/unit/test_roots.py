"""Tests for root vectors, the lattice embedding and root enumeration."""

import random

import pytest

from kmweyl.dynkin import build_extended_A
from kmweyl.exceptions import DimensionMismatch, InvalidBounds
from kmweyl.roots import (
    RootVector,
    ambient_form,
    ambient_inner,
    build_embedding,
    diophantine_check,
    dot,
    embed,
    enumerate_real_roots,
    inner,
    roots_tsv,
)

AFFINE_SLICE = [(0, 0), (0, 0), (0, 5), (0, 5), (0, 5)]


def _root(*coeffs: int) -> RootVector:
    return RootVector(coeffs=coeffs)


class TestInner:
    """Test the Cartan-form inner product and the norm condition."""

    def test_simple_root_norm(self) -> None:
        """Test that every simple root has norm 2."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        for label in cartan.labels:
            alpha = RootVector.simple(cartan, label)
            assert inner(alpha, alpha, cartan) == 2
            assert diophantine_check(alpha, cartan)

    def test_adjacent_simple_roots(self) -> None:
        """Test alpha_0 . alpha_-1 = -1."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        a0 = RootVector.simple(cartan, 0)
        am1 = RootVector.simple(cartan, -1)

        assert inner(a0, am1, cartan) == -1

    def test_generic_norm_matches_quadratic_form(self) -> None:
        """Test the norm of (p, q, l, m, n) against the explicit quadratic form."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        rng = random.Random(11)
        for _ in range(200):
            p, q, x, y, z = (rng.randint(-6, 6) for _ in range(5))
            form = x * x + y * y + z * z - x * y - x * z - y * z - x * q
            form += p * p - p * q + q * q
            root = _root(p, q, x, y, z)
            assert inner(root, root, cartan) == 2 * form

    @pytest.mark.parametrize(
        "coeffs, expected",
        [
            ((0, 0, 1, 1, 1), False),
            ((0, 1, 1, 1, 1), False),
            ((0, 0, 2, 1, 1), True),
            ((0, 1, 1, 1, 2), True),
        ],
    )
    def test_diophantine_check(self, coeffs: tuple[int, ...], expected: bool) -> None:
        """Test the real-root condition on the null root and its neighbours."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        assert diophantine_check(RootVector(coeffs=coeffs), cartan) is expected

    def test_dimension_mismatch(self) -> None:
        """Test that vectors of the wrong length are rejected."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        with pytest.raises(DimensionMismatch) as exc_info:
            inner(_root(1, 0, 0), _root(1, 0, 0), cartan)
        assert exc_info.value.expected == 5

    def test_norms_are_even(self) -> None:
        """Test that the root lattice is even."""
        cartan = build_extended_A(3, 2).cartan_matrix()
        rng = random.Random(5)
        for _ in range(500):
            a = RootVector(coeffs=tuple(rng.randint(-10, 10) for _ in range(6)))
            assert inner(a, a, cartan) % 2 == 0


class TestRootVector:
    """Test RootVector arithmetic helpers."""

    def test_canonical_sign(self) -> None:
        """Test that the first nonzero coefficient becomes positive."""
        a = _root(0, -1, 2, 0, 0)

        assert a.canonical() == _root(0, 1, -2, 0, 0)
        assert a.sign() == -1
        assert (-a).canonical() == a.canonical()
        assert RootVector.zero(3).sign() == 0

    def test_arithmetic(self) -> None:
        """Test addition, subtraction and scaling."""
        a, b = _root(1, 0, 2), _root(0, 1, -1)

        assert a + b == _root(1, 1, 1)
        assert a - b == _root(1, -1, 3)
        assert b.scaled(3) == _root(0, 3, -3)
        assert (a - a).is_zero()


class TestEnumerate:
    """Test bounded enumeration of real roots."""

    def test_affine_slice_has_thirty_roots(self) -> None:
        """Test p = q = 0 with (l, m, n) in [0, 5] gives 30 roots."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        roots = enumerate_real_roots(cartan, bounds=AFFINE_SLICE, threads=2)

        assert len(roots) == 30
        assert all(diophantine_check(root, cartan) for root in roots)
        assert roots[0] == _root(0, 0, 0, 0, 1)
        assert _root(0, 0, 3, 3, 4) in roots
        assert _root(0, 0, 5, 5, 4) in roots

    def test_unit_box_slice(self) -> None:
        """Test the six real roots with p = q = 0 and (l, m, n) in [0, 1]."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        bounds = [(0, 0), (0, 0)] + [(0, 1)] * 3
        roots = enumerate_real_roots(cartan, bounds=bounds)

        assert [root.coeffs[2:] for root in roots] == [
            (0, 0, 1),
            (0, 1, 0),
            (1, 0, 0),
            (0, 1, 1),
            (1, 0, 1),
            (1, 1, 0),
        ]

    def test_graded_lex_order_is_deterministic(self) -> None:
        """Test ordering by coefficient sum, then lexicographically."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        first = enumerate_real_roots(cartan, 0, 2, threads=1)
        second = enumerate_real_roots(cartan, 0, 2, threads=4)
        keys = [(sum(r.coeffs), r.coeffs) for r in first]

        assert first == second
        assert keys == sorted(keys)

    def test_zero_box_is_empty(self) -> None:
        """Test that the box [0, 0] contains no real root."""
        cartan = build_extended_A(3, 2).cartan_matrix()
        assert enumerate_real_roots(cartan, 0, 0) == []

    def test_empty_range_rejected(self) -> None:
        """Test lo > hi raises InvalidBounds."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        with pytest.raises(InvalidBounds):
            enumerate_real_roots(cartan, bounds=[(0, 0)] * 4 + [(2, 1)])
        with pytest.raises(DimensionMismatch):
            enumerate_real_roots(cartan, bounds=[(0, 1)] * 3)

    def test_roots_tsv(self) -> None:
        """Test the TSV header and one row per root with its norm."""
        cartan = build_extended_A(2, 2).cartan_matrix()
        text = roots_tsv([_root(0, 0, 1, 0, 0), _root(0, 0, 1, 1, 0)], cartan)

        assert text.splitlines() == [
            "#c-2\tc-1\tc0\tc1\tc2\tnorm",
            "0\t0\t1\t0\t0\t2",
            "0\t0\t1\t1\t0\t2",
        ]


class TestEmbedding:
    """Test the explicit Lorentzian lattice embedding."""

    def test_a2m2_simple_root_images(self) -> None:
        """Test the listed ambient images of the (A_2)_-2 simple roots."""
        embedding = build_embedding(2, 2)

        assert embedding.dim == 7
        assert embedding.vector(1) == (1, -1, 0, 0, 0, 0, 0)
        assert embedding.vector(2) == (0, 1, -1, 0, 0, 0, 0)
        assert embedding.vector(0) == (-1, 0, 1, 1, 0, 0, 0)
        assert embedding.vector(-1) == (0, 0, 0, -1, 1, 0, 0)

    @pytest.mark.parametrize("n, m", [(2, 0), (2, 1), (2, 2), (3, 2), (4, 3)])
    def test_gram_matrix_is_cartan(self, n: int, m: int) -> None:
        """Test ambient products of the simple roots reproduce K."""
        cartan = build_extended_A(n, m).cartan_matrix()
        gram = build_embedding(n, m).gram()

        assert [tuple(row) for row in gram] == list(cartan.entries)

    def test_a3m2_dimension(self) -> None:
        """Test the 4 + 2 + 2 dimensional ambient space of (A_3)_-2."""
        assert build_embedding(3, 2).dim == 8

    def test_ambient_products(self) -> None:
        """Test alpha_0 . alpha_0 = 2 and alpha_0 . alpha_-1 = -1 after embedding."""
        embedding = build_embedding(2, 2)
        a0, am1 = embedding.vector(0), embedding.vector(-1)

        assert ambient_inner(a0, a0, embedding) == 2
        assert ambient_inner(a0, am1, embedding) == -1
        assert embed(RootVector.zero(5), embedding) == (0,) * 7

    def test_embedding_agrees_with_cartan_form(self) -> None:
        """Test ambient and Cartan products agree on random pairs in a +-10 box."""
        for n, m in ((2, 2), (3, 2)):
            cartan = build_extended_A(n, m).cartan_matrix()
            embedding = build_embedding(n, m)
            rng = random.Random(100 * n + m)
            for _ in range(1000):
                a = RootVector(
                    coeffs=tuple(rng.randint(-10, 10) for _ in range(cartan.rank))
                )
                b = RootVector(
                    coeffs=tuple(rng.randint(-10, 10) for _ in range(cartan.rank))
                )
                x, y = embed(a, embedding), embed(b, embedding)
                assert ambient_inner(x, y, embedding) == inner(a, b, cartan)

    def test_ambient_form_contracts_the_metric(self) -> None:
        """Test that the plain dot product with the form equals the ambient product."""
        embedding = build_embedding(2, 2)
        rng = random.Random(3)
        for _ in range(100):
            x = tuple(rng.randint(-5, 5) for _ in range(7))
            q = tuple(rng.randint(-5, 5) for _ in range(7))
            assert dot(ambient_form(x, embedding), q) == ambient_inner(x, q, embedding)

    def test_ambient_dimension_checked(self) -> None:
        """Test that ambient vectors of the wrong size raise DimensionMismatch."""
        embedding = build_embedding(2, 2)
        with pytest.raises(DimensionMismatch):
            ambient_inner((1, 0, 0), (1, 0, 0), embedding)
