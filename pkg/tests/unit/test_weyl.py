"""Tests for Weyl reflections, Coxeter matrices, orbits and the ambient action."""

import random
from fractions import Fraction

import pytest
import sympy as sp

from kmweyl.dynkin import CartanMatrix, build_extended_A
from kmweyl.exceptions import UnknownNodeLabel
from kmweyl.roots import RootVector, ambient_inner, build_embedding, embed, inner
from kmweyl.weyl import (
    FINITE_ORDER_WORDS,
    OrbitCache,
    WeylWord,
    ambient_reflect,
    ambient_word,
    apply_power,
    coxeter_order,
    coxeter_word,
    cyclotomic_index,
    orbit,
    reflect,
    reflection_matrix,
    word_matrix,
)

AFFINE = (
    (1, 0, 0, 0, 0),
    (0, 1, 0, 0, 0),
    (0, 1, 2, 1, -2),
    (0, 0, 2, 0, -1),
    (0, 0, 1, 1, -1),
)

HYPERBOLIC = (
    (1, 0, 0, 0, 0),
    (1, 0, 2, 1, -2),
    (0, 1, 2, 1, -2),
    (0, 0, 2, 0, -1),
    (0, 0, 1, 1, -1),
)

LORENTZIAN = (
    (0, 0, 2, 1, -2),
    (1, 0, 2, 1, -2),
    (0, 1, 2, 1, -2),
    (0, 0, 2, 0, -1),
    (0, 0, 1, 1, -1),
)


def _cartan() -> CartanMatrix:
    return build_extended_A(2, 2).cartan_matrix()


def _word(*letters: int) -> WeylWord:
    return WeylWord(letters=letters)


def _random_root(rng: random.Random, rank: int = 5, size: int = 10) -> RootVector:
    return RootVector(coeffs=tuple(rng.randint(-size, size) for _ in range(rank)))


class TestReflect:
    """Test simple reflections on coefficient vectors."""

    def test_sigma0_rule(self) -> None:
        """Test sigma_0 sends l to q + m + n - l and fixes the rest."""
        rng = random.Random(1)
        for _ in range(100):
            p, q, x, y, z = (rng.randint(-9, 9) for _ in range(5))
            image = reflect(0, RootVector(coeffs=(p, q, x, y, z)), _cartan())
            assert image.coeffs == (p, q, q + y + z - x, y, z)

    def test_sigma0_on_a3m2(self) -> None:
        """Test sigma_0 sends l to q + m + r - l on (A_3)_-2."""
        cartan = build_extended_A(3, 2).cartan_matrix()
        image = reflect(0, RootVector(coeffs=(1, 2, 3, 4, 5, 6)), cartan)

        assert image.coeffs == (1, 2, 2 + 4 + 6 - 3, 4, 5, 6)

    def test_simple_root_is_negated(self) -> None:
        """Test sigma_i(alpha_i) = -alpha_i for every label."""
        cartan = _cartan()
        for label in cartan.labels:
            alpha = RootVector.simple(cartan, label)
            assert reflect(label, alpha, cartan) == -alpha

    def test_reflection_is_an_involution(self) -> None:
        """Test sigma_i sigma_i = 1 on random vectors."""
        cartan = _cartan()
        rng = random.Random(2)
        for _ in range(1000):
            label = rng.choice(cartan.labels)
            a = _random_root(rng)
            assert reflect(label, reflect(label, a, cartan), cartan) == a

    def test_reflection_preserves_norm(self) -> None:
        """Test that reflections preserve the Cartan form."""
        cartan = _cartan()
        rng = random.Random(3)
        for _ in range(1000):
            label = rng.choice(cartan.labels)
            a, b = _random_root(rng), _random_root(rng)
            ra, rb = reflect(label, a, cartan), reflect(label, b, cartan)
            assert inner(ra, rb, cartan) == inner(a, b, cartan)

    def test_matrix_matches_reflect(self) -> None:
        """Test that the reflection matrix acts like reflect."""
        cartan = _cartan()
        rng = random.Random(4)
        for label in cartan.labels:
            matrix = reflection_matrix(label, cartan)
            for _ in range(20):
                a = _random_root(rng)
                assert matrix.apply(a) == reflect(label, a, cartan)

    def test_unknown_label(self) -> None:
        """Test that labels outside the diagram raise UnknownNodeLabel."""
        with pytest.raises(UnknownNodeLabel) as exc_info:
            reflect(3, RootVector.zero(5), _cartan())
        assert exc_info.value.label == 3


class TestWordMatrix:
    """Test Coxeter matrices of Weyl words."""

    @pytest.mark.parametrize(
        "letters, expected",
        [
            ((0, 1, 2), AFFINE),
            ((-1, 0, 1, 2), HYPERBOLIC),
            ((-2, -1, 0, 1, 2), LORENTZIAN),
        ],
    )
    def test_mode_matrices(
        self, letters: tuple[int, ...], expected: tuple[tuple[int, ...], ...]
    ) -> None:
        """Test the affine, hyperbolic and Lorentzian Coxeter matrices."""
        assert word_matrix(_word(*letters), _cartan()).entries == expected

    def test_coxeter_word(self) -> None:
        """Test sigma_-m ... sigma_n letter order."""
        assert coxeter_word(2, 2).letters == (-2, -1, 0, 1, 2)
        assert coxeter_word(3, 0).letters == (0, 1, 2, 3)

    def test_empty_word_is_identity(self) -> None:
        """Test that the empty word gives the identity matrix."""
        matrix = word_matrix(_word(), _cartan())

        assert matrix.is_identity()
        assert matrix.det() == 1

    def test_rightmost_letter_acts_first(self) -> None:
        """Test the word matrix against successive reflections."""
        cartan = _cartan()
        rng = random.Random(5)
        word = _word(-2, 0, 1, -1, 2, 0)
        matrix = word_matrix(word, cartan)
        for _ in range(50):
            a = _random_root(rng)
            expected = a
            for letter in reversed(word.letters):
                expected = reflect(letter, expected, cartan)
            assert matrix.apply(a) == expected

    def test_unknown_letter(self) -> None:
        """Test that words with foreign letters raise UnknownNodeLabel."""
        with pytest.raises(UnknownNodeLabel):
            word_matrix(_word(0, 5), _cartan())

    def test_random_words_are_orthogonal(self) -> None:
        """Test C^T K C = K and det = +-1 on random words."""
        cartan = _cartan()
        rng = random.Random(6)
        for _ in range(200):
            length = rng.randint(0, 7)
            letters = tuple(rng.choice(cartan.labels) for _ in range(length))
            matrix = word_matrix(_word(*letters), cartan)
            assert matrix.is_orthogonal(cartan)
            assert matrix.det() == (-1) ** len(letters)

    def test_inverse(self) -> None:
        """Test that the inverse undoes the word and reverses it."""
        cartan = _cartan()
        matrix = word_matrix(_word(0, 1, 2), cartan)
        inverse = matrix.inverse()

        assert (inverse @ matrix).is_identity()
        assert inverse.word == _word(2, 1, 0)
        assert inverse.entries == word_matrix(_word(2, 1, 0), cartan).entries

    def test_product_concatenates_words(self) -> None:
        """Test that matrix products carry the concatenated word."""
        cartan = _cartan()
        left = word_matrix(_word(-2, -1), cartan)
        right = word_matrix(_word(0, 1, 2), cartan)

        product = left @ right
        assert product.word == _word(-2, -1, 0, 1, 2)
        assert product.entries == LORENTZIAN


class TestPowers:
    """Test exact powers and orbits of Coxeter matrices."""

    def test_affine_square(self) -> None:
        """Test the label-0 row of sigma_a^2 reads 3q + 4l - 3n."""
        square = word_matrix(_word(0, 1, 2), _cartan()).power(2)

        assert square.entries[2] == (0, 3, 4, 0, -3)

    def test_lorentzian_square(self) -> None:
        """Test the label-0 row of sigma_L^2 reads p + 2q + 6l + m - 5n."""
        square = word_matrix(_word(-2, -1, 0, 1, 2), _cartan()).power(2)

        assert square.entries[2] == (1, 2, 6, 1, -5)

    def test_apply_power_examples(self) -> None:
        """Test small powers applied to alpha_0."""
        cartan = _cartan()
        matrix = word_matrix(_word(0, 1, 2), cartan)
        alpha0 = RootVector.simple(cartan, 0)

        assert apply_power(matrix, 0, alpha0) == alpha0
        assert apply_power(matrix, 1, alpha0).coeffs == (0, 0, 2, 2, 1)
        assert apply_power(matrix, -1, apply_power(matrix, 1, alpha0)) == alpha0

    def test_power_step_relation(self) -> None:
        """Test C^(k+1) a = C (C^k a) for random k and a."""
        cartan = _cartan()
        rng = random.Random(7)
        matrices = [
            word_matrix(_word(*letters), cartan)
            for letters in ((0, 1, 2), (-1, 0, 1, 2), (-2, -1, 0, 1, 2))
        ]
        for _ in range(1000):
            matrix = rng.choice(matrices)
            k = rng.randint(-6, 6)
            a = _random_root(rng, size=3)
            assert apply_power(matrix, k + 1, a) == matrix.apply(
                apply_power(matrix, k, a)
            )

    def test_powers_preserve_real_roots(self) -> None:
        """Test that orbit elements of a real root are real roots."""
        cartan = _cartan()
        matrix = word_matrix(_word(-2, -1, 0, 1, 2), cartan)
        seed = RootVector(coeffs=(0, 0, 1, 0, 0))
        for _, element in orbit(matrix, seed, -8, 8):
            assert inner(element, element, cartan) == 2

    def test_orbit_window(self) -> None:
        """Test orbit windows, including negative and empty ranges."""
        matrix = word_matrix(_word(0, 1, 2), _cartan())
        seed = RootVector(coeffs=(0, 0, 1, 0, 0))
        window = orbit(matrix, seed, -2, 2)

        assert [k for k, _ in window] == [-2, -1, 0, 1, 2]
        assert window[2][1] == seed
        assert window[0][1] == apply_power(matrix, -2, seed)
        assert orbit(matrix, seed, 3, 2) == []


class TestCoxeterOrder:
    """Test orders of Weyl group elements."""

    @pytest.mark.parametrize("name", sorted(FINITE_ORDER_WORDS))
    def test_finite_subgroup_orders(self, name: str) -> None:
        """Test the orders 3, 4, 5 and 6 of the finite-type words."""
        word, order = FINITE_ORDER_WORDS[name]

        assert coxeter_order(word_matrix(word, _cartan()), 100) == order

    @pytest.mark.parametrize(
        "letters", [(0, 1, 2), (-1, 0, 1, 2), (-2, -1, 0, 1, 2)]
    )
    def test_mode_words_have_infinite_order(self, letters: tuple[int, ...]) -> None:
        """Test that sigma_a, sigma_h and sigma_L have no finite order."""
        matrix = word_matrix(_word(*letters), _cartan())

        assert coxeter_order(matrix, 10000) is None

    def test_reflection_has_order_two(self) -> None:
        """Test order 2 for a single reflection and 1 for the identity."""
        cartan = _cartan()

        assert coxeter_order(reflection_matrix(-1, cartan), 10) == 2
        assert coxeter_order(word_matrix(_word(), cartan), 10) == 1

    def test_h_max_caps_the_search(self) -> None:
        """Test that orders above h_max are reported as None."""
        word, _ = FINITE_ORDER_WORDS["A1xA2"]

        assert coxeter_order(word_matrix(word, _cartan()), 5) is None


class TestOrbitCache:
    """Test the shared orbit memo."""

    def test_hits_and_misses(self) -> None:
        """Test that a repeated window is served from the cache."""
        cache = OrbitCache()
        matrix = word_matrix(_word(0, 1, 2), _cartan())
        seed = RootVector(coeffs=(0, 0, 1, 0, 0))

        first = cache.orbit(matrix, seed, -1, 1)
        second = cache.orbit(matrix, seed, -1, 1)

        assert first == second == orbit(matrix, seed, -1, 1)
        assert cache.misses == 3
        assert cache.hits == 3
        assert len(cache) == 3

    def test_clear(self) -> None:
        """Test that clear empties the store and the counters."""
        cache = OrbitCache()
        matrix = word_matrix(_word(0, 1, 2), _cartan())
        cache.orbit(matrix, RootVector(coeffs=(0, 0, 1, 0, 0)), 0, 4)
        cache.clear()

        assert len(cache) == 0
        assert cache.hits == cache.misses == 0

    def test_bounded_size(self) -> None:
        """Test that the oldest entries are evicted beyond maxsize."""
        cache = OrbitCache(maxsize=2)
        matrix = word_matrix(_word(0, 1, 2), _cartan())
        seed = RootVector(coeffs=(0, 0, 1, 0, 0))

        window = cache.orbit(matrix, seed, 0, 4)
        assert window == orbit(matrix, seed, 0, 4)
        assert len(cache) == 2

        cache.orbit(matrix, seed, 3, 4)
        assert cache.hits == 2
        cache.orbit(matrix, seed, 0, 0)
        assert cache.misses == 6


class TestCyclotomicIndex:
    """Test recognition of cyclotomic factors."""

    @pytest.mark.parametrize(
        "expr, index",
        [("x - 1", 1), ("x + 1", 2), ("x**2 + x + 1", 3), ("x**2 + 1", 4)],
    )
    def test_cyclotomic(self, expr: str, index: int) -> None:
        """Test the first four cyclotomic polynomials."""
        x = sp.Symbol("x")

        assert cyclotomic_index(sp.Poly(sp.sympify(expr), x)) == index

    def test_twelfth(self) -> None:
        """Test Phi_12 = x^4 - x^2 + 1."""
        x = sp.Symbol("x")

        assert cyclotomic_index(sp.Poly(x**4 - x**2 + 1, x)) == 12

    @pytest.mark.parametrize("expr", ["x - 2", "x**2 - 3*x + 1", "x**2 + 2"])
    def test_not_cyclotomic(self, expr: str) -> None:
        """Test factors with roots off the unit circle or of infinite order."""
        x = sp.Symbol("x")

        assert cyclotomic_index(sp.Poly(sp.sympify(expr), x)) is None


class TestAmbient:
    """Test the reflection action on ambient coordinates q1..q7."""

    def test_sigma_minus_one_swaps_u1_v1(self) -> None:
        """Test that sigma_-1 swaps q4 and q5."""
        embedding = build_embedding(2, 2)
        q = (1, 2, 3, 4, 5, 6, 7)

        assert ambient_reflect(-1, q, embedding) == (1, 2, 3, 5, 4, 6, 7)

    def test_sigma_minus_two(self) -> None:
        """Test q4 -> q4 + q5 + q6 - q7, q6 -> q7 - q5, q7 -> q5 + q6."""
        embedding = build_embedding(2, 2)
        q1, q2, q3, q4, q5, q6, q7 = (3, 1, 4, 1, 5, 9, 2)

        assert ambient_reflect(-2, (q1, q2, q3, q4, q5, q6, q7), embedding) == (
            q1,
            q2,
            q3,
            q4 + q5 + q6 - q7,
            q5,
            q7 - q5,
            q5 + q6,
        )

    def test_finite_reflections_permute(self) -> None:
        """Test that sigma_1 and sigma_2 permute the Euclidean coordinates."""
        embedding = build_embedding(2, 2)
        q = (1, 2, 3, 4, 5, 6, 7)

        assert ambient_reflect(1, q, embedding) == (2, 1, 3, 4, 5, 6, 7)
        assert ambient_reflect(2, q, embedding) == (1, 3, 2, 4, 5, 6, 7)

    def test_sigma0(self) -> None:
        """Test q1 -> q3 - q5, q3 -> q1 + q5, q4 -> q4 + q1 - q3 + q5."""
        embedding = build_embedding(2, 2)
        q1, q2, q3, q4, q5, q6, q7 = (3, 1, 4, 1, 5, 9, 2)

        assert ambient_reflect(0, (q1, q2, q3, q4, q5, q6, q7), embedding) == (
            q3 - q5,
            q2,
            q1 + q5,
            q4 + q1 - q3 + q5,
            q5,
            q6,
            q7,
        )

    def test_affine_word_symbolically(self) -> None:
        """Test sigma_2 sigma_1 sigma_0 on symbolic coordinates."""
        embedding = build_embedding(2, 2)
        q = sp.symbols("q1:8")
        q1, q2, q3, q4, q5, q6, q7 = q

        image = ambient_word(_word(2, 1, 0), q, embedding)
        expected = (q2, q1 + q5, q3 - q5, q1 - q3 + q4 + q5, q5, q6, q7)

        assert all(sp.expand(a - b) == 0 for a, b in zip(image, expected))

    def test_ambient_action_preserves_kinetic_form(self) -> None:
        """Test that random words preserve q.q on exact rational points."""
        embedding = build_embedding(2, 2)
        rng = random.Random(8)
        for _ in range(1000):
            q = tuple(
                Fraction(rng.randint(-20, 20), rng.randint(1, 6)) for _ in range(7)
            )
            length = rng.randint(1, 5)
            letters = tuple(rng.choice(embedding.labels) for _ in range(length))
            image = ambient_word(_word(*letters), q, embedding)
            assert ambient_inner(image, image, embedding) == ambient_inner(
                q, q, embedding
            )

    def test_ambient_matches_coefficient_action(self) -> None:
        """Test that reflecting an embedded root equals embedding the reflection."""
        cartan = _cartan()
        embedding = build_embedding(2, 2)
        rng = random.Random(9)
        for _ in range(200):
            label = rng.choice(cartan.labels)
            a = _random_root(rng)
            assert ambient_reflect(label, embed(a, embedding), embedding) == embed(
                reflect(label, a, cartan), embedding
            )
