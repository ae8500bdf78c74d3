"""Exact kernel tests.

Expected values were frozen from an independent derivation (sympy matrices /
explicit Sylvester determinants computed outside this package); property tests
check the algebraic laws directly.
"""

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from otcohom.exactmath import (
    RationalMatrix,
    RationalPolynomial,
    det_fraction_free,
    exterior_power,
    poly_from_ints,
    poly_gcd,
    rank,
    resultant,
    sturm_count,
)

X3_MINUS_2 = poly_from_ints([-2, 0, 0, 1])
X_MINUS_1 = poly_from_ints([-1, 1])


def naive_gauss_det(rows):
    """Textbook rational Gaussian elimination, used as an in-test oracle."""
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] * inv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return det


def naive_sylvester_resultant(a, b):
    """res(a, b) with the package convention, as det of the Sylvester matrix
    of (b, a) computed by plain Gaussian elimination."""
    m, n = a.degree, b.degree
    if m == 0 and n == 0:
        return Fraction(1)
    bc = list(reversed(b.coeffs))
    ac = list(reversed(a.coeffs))
    N = m + n
    rows = []
    for i in range(m):
        rows.append([Fraction(0)] * i + bc + [Fraction(0)] * (N - n - 1 - i))
    for i in range(n):
        rows.append([Fraction(0)] * i + ac + [Fraction(0)] * (N - m - 1 - i))
    return naive_gauss_det(rows)


class TestPolynomial:
    def test_trailing_zeros_stripped(self):
        p = RationalPolynomial([1, 2, 0, 0])
        assert p.degree == 1 and p.coeffs == (Fraction(1), Fraction(2))

    def test_zero_polynomial_has_predicate_not_degree(self):
        z = RationalPolynomial([])
        assert z.is_zero
        with pytest.raises(ValueError):
            z.degree

    def test_eval_horner(self):
        assert X3_MINUS_2(1) == -1
        assert X3_MINUS_2(Fraction(3, 2)) == Fraction(27, 8) - 2

    def test_divmod_reconstructs(self):
        a = poly_from_ints([3, -1, 0, 7, 2])
        b = poly_from_ints([1, 4, 5])
        q, r = a.divmod(b)
        assert q * b + r == a
        assert r.is_zero or r.degree < b.degree

    @given(
        st.lists(st.integers(-9, 9), min_size=1, max_size=6),
        st.lists(st.integers(-9, 9), min_size=1, max_size=6),
    )
    def test_ring_laws(self, ca, cb):
        a, b = RationalPolynomial(ca), RationalPolynomial(cb)
        assert a * b == b * a
        assert (a + b) - b == a

    @given(st.fractions(), st.fractions())
    def test_rational_normalization(self, p, q):
        # Fraction backs the Rational contract: normalized, denominator > 0
        r = p + q
        from math import gcd

        assert r.denominator > 0
        assert gcd(r.numerator, r.denominator) == 1


class TestGcd:
    def test_frozen_example(self):
        a = poly_from_ints([-1, 0, 0, 0, 1])  # x^4 - 1
        b = poly_from_ints([-1, 0, 0, 0, 0, 0, 1])  # x^6 - 1
        assert poly_gcd(a, b) == poly_from_ints([-1, 0, 1])

    def test_squarefree_detector(self):
        g = poly_gcd(X3_MINUS_2, X3_MINUS_2.derivative())
        assert g.degree == 0

    def test_nontrivial_common_factor(self):
        common = poly_from_ints([2, 1])
        a = common * poly_from_ints([-1, 1])
        b = common * poly_from_ints([3, 0, 1])
        g = poly_gcd(a, b)
        assert g == common.monic()

    def test_gcd_divides_both(self):
        rng = random.Random(7)
        for _ in range(25):
            a = RationalPolynomial([rng.randint(-5, 5) for _ in range(rng.randint(1, 6))])
            b = RationalPolynomial([rng.randint(-5, 5) for _ in range(rng.randint(1, 6))])
            if a.is_zero or b.is_zero:
                continue
            g = poly_gcd(a, b)
            if g.is_zero:
                continue
            assert a.divmod(g)[1].is_zero
            assert b.divmod(g)[1].is_zero


class TestResultant:
    def test_evaluation_convention(self):
        # res(f, x - c) == f(c), the sign convention everything else relies on
        assert resultant(X3_MINUS_2, X_MINUS_1) == -1

    def test_frozen_examples(self):
        assert resultant(poly_from_ints([1, 0, 1]), poly_from_ints([-1, 0, 1])) == 4
        assert resultant(X_MINUS_1, X_MINUS_1) == 0
        assert resultant(poly_from_ints([1, 2]), poly_from_ints([-5, 3])) == 13

    def test_norm_of_unit_generator(self):
        # product of (root - 1) over roots of x^p - 2 is 1 for odd p: these are
        # the norms behind the acceptance fields
        for p in (3, 5, 7):
            f = poly_from_ints([-2] + [0] * (p - 1) + [1])
            assert resultant(X_MINUS_1, f) == 1

    def test_eval_convention_random(self):
        rng = random.Random(11)
        for _ in range(30):
            f = RationalPolynomial(
                [rng.randint(-8, 8) for _ in range(rng.randint(1, 7))] + [rng.randint(1, 5)]
            )
            c = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            g = RationalPolynomial([-c, 1])
            assert resultant(f, g) == f(c)

    def test_against_naive_sylvester_oracle(self):
        rng = random.Random(13)
        checked = 0
        while checked < 50:
            a = RationalPolynomial([rng.randint(-6, 6) for _ in range(rng.randint(2, 6))])
            b = RationalPolynomial([rng.randint(-6, 6) for _ in range(rng.randint(2, 6))])
            if a.is_zero or b.is_zero or a.degree == 0 or b.degree == 0:
                continue
            assert resultant(a, b) == naive_sylvester_resultant(a, b)
            checked += 1

    def test_swap_sign_law(self):
        rng = random.Random(17)
        for _ in range(50):
            a = RationalPolynomial([rng.randint(-6, 6) for _ in range(rng.randint(2, 6))])
            b = RationalPolynomial([rng.randint(-6, 6) for _ in range(rng.randint(2, 6))])
            if a.is_zero or b.is_zero or a.degree == 0 or b.degree == 0:
                continue
            sign = -1 if (a.degree % 2) and (b.degree % 2) else 1
            assert resultant(a, b) == sign * resultant(b, a)

    def test_multiplicative_in_first_argument(self):
        a = poly_from_ints([1, 3, 1])
        c = poly_from_ints([-2, 0, 5])
        b = poly_from_ints([-1, 1, 1])
        assert resultant(a * c, b) == resultant(a, b) * resultant(c, b)

    def test_large_degree_path_matches_sylvester(self):
        # degree above the determinant cutoff exercises the remainder-sequence path
        rng = random.Random(19)
        a = RationalPolynomial([rng.randint(-4, 4) for _ in range(14)] + [3])
        b = RationalPolynomial([rng.randint(-4, 4) for _ in range(13)] + [2])
        assert resultant(a, b) == naive_sylvester_resultant(a, b)


class TestSturm:
    def test_frozen_counts(self):
        assert sturm_count(X3_MINUS_2, 0, 2) == 1
        assert sturm_count(poly_from_ints([1, 0, 1]), -10, 10) == 0
        assert sturm_count(poly_from_ints([-2, 0, 0, 0, 0, 1]), -4, 4) == 1
        assert sturm_count(poly_from_ints([-1, -1, 0, 1]), -2, 2) == 1
        assert sturm_count(poly_from_ints([-2, 0, 1]), -2, 2) == 2

    def test_endpoint_root_rejected(self):
        f = poly_from_ints([-1, 0, 1])  # roots at -1 and 1
        with pytest.raises(ValueError):
            sturm_count(f, 0, 1)
        with pytest.raises(ValueError):
            sturm_count(f, -1, 0)
        with pytest.raises(ValueError):
            sturm_count(f, 2, 1)

    def test_interval_additivity(self):
        f = poly_from_ints([-1, -1, 0, 1])
        lo, mid, hi = Fraction(-3), Fraction(1, 7), Fraction(3)
        assert sturm_count(f, lo, hi) == sturm_count(f, lo, mid) + sturm_count(f, mid, hi)

    def test_total_count_matches_signature(self):
        # x^5 - 2 has exactly one real root; x^3 - x - 1 has one; x^2 - 2 has two
        f = poly_from_ints([-1, -1, 0, 1])
        assert sturm_count(f, -100, 100) == 1


class TestDeterminant:
    def test_frozen_rational_4x4(self):
        m = RationalMatrix(
            [
                [Fraction(1, 2), 3, 0, 1],
                [2, Fraction(-1, 3), 1, 4],
                [0, 5, Fraction(2, 7), -1],
                [1, 0, 2, Fraction(3, 5)],
            ]
        )
        assert det_fraction_free(m) == Fraction(-101, 30)

    def test_identity_and_singular(self):
        assert det_fraction_free(RationalMatrix.identity(5)) == 1
        m = RationalMatrix([[1, 2], [2, 4]])
        assert det_fraction_free(m) == 0

    def test_companion_det_is_constant_term_sign(self):
        # companion of x^3 - 2: columns are alpha * basis vectors
        c = RationalMatrix([[0, 0, 2], [1, 0, 0], [0, 1, 0]])
        assert det_fraction_free(c) == 2

    def test_against_gauss_oracle(self):
        rng = random.Random(23)
        for _ in range(30):
            n = rng.randint(1, 5)
            rows = [
                [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
                for _ in range(n)
            ]
            assert det_fraction_free(RationalMatrix(rows)) == naive_gauss_det(rows)

    def test_multiplicativity(self):
        rng = random.Random(29)
        a = RationalMatrix([[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)])
        b = RationalMatrix([[rng.randint(-5, 5) for _ in range(4)] for _ in range(4)])
        assert det_fraction_free(a @ b) == det_fraction_free(a) * det_fraction_free(b)

    def test_rank(self):
        m = RationalMatrix([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
        assert rank(m) == 2
        assert rank(RationalMatrix.identity(4)) == 4
        assert rank(RationalMatrix([[0, 0], [0, 0]])) == 0


class TestExteriorPower:
    def test_diagonal(self):
        d = RationalMatrix([[2, 0, 0], [0, 3, 0], [0, 0, 5]])
        assert exterior_power(d, 2) == RationalMatrix(
            [[6, 0, 0], [0, 10, 0], [0, 0, 15]]
        )

    def test_frozen_companion_square(self):
        c = RationalMatrix([[0, 0, 2], [1, 0, 0], [0, 1, 0]])
        assert exterior_power(c, 2) == RationalMatrix(
            [[0, -2, 0], [0, 0, -2], [1, 0, 0]]
        )

    def test_top_power_is_determinant(self):
        rng = random.Random(31)
        m = RationalMatrix([[rng.randint(-4, 4) for _ in range(4)] for _ in range(4)])
        top = exterior_power(m, 4)
        assert top.nrows == 1 and top[0, 0] == det_fraction_free(m)

    def test_cauchy_binet_functoriality(self):
        rng = random.Random(37)
        a = RationalMatrix([[rng.randint(-3, 3) for _ in range(4)] for _ in range(4)])
        b = RationalMatrix([[rng.randint(-3, 3) for _ in range(4)] for _ in range(4)])
        assert exterior_power(a @ b, 2) == exterior_power(a, 2) @ exterior_power(b, 2)

    def test_minor_entries_brute_force(self):
        rng = random.Random(41)
        m = RationalMatrix([[rng.randint(-4, 4) for _ in range(4)] for _ in range(4)])
        c2 = exterior_power(m, 2)
        subsets = list(itertools.combinations(range(4), 2))
        for i, S in enumerate(subsets):
            for j, T in enumerate(subsets):
                expected = (
                    m[S[0], T[0]] * m[S[1], T[1]] - m[S[0], T[1]] * m[S[1], T[0]]
                )
                assert c2[i, j] == expected

    def test_kronecker_eigstructure(self):
        # eigenvalues of kron(A, B) are pairwise products: check via det identity
        a = RationalMatrix([[2, 0], [0, 3]])
        b = RationalMatrix([[5, 0], [0, 7]])
        k = a.kronecker(b)
        assert det_fraction_free(k) == (2 * 3) ** 2 * (5 * 7) ** 2
        assert k[0, 0] == 10 and k[3, 3] == 21
