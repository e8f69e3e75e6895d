from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fvkit.combinatorics import (
    RationalPolynomial,
    binomial,
    check_shifted_rising_factorial_expansion,
    check_stirling_convolution,
    check_vanishing_alternating_sum,
    falling_factorial,
    rising_factorial,
    rising_factorial_poly,
    stirling1_unsigned,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=12)


def stirling_oracle(n_top):
    """Independent triangular recurrence, kept local to the tests."""
    rows = [[1]]
    for n in range(1, n_top + 1):
        prev = rows[-1]
        row = [0] * (n + 1)
        for k in range(1, n + 1):
            row[k] = prev[k - 1] + (n - 1) * (prev[k] if k < n else 0)
        rows.append(row)
    return rows


class TestFactorials:
    def test_rising_empty_product(self):
        assert rising_factorial(Fraction(17, 3), 0) == 1
        assert rising_factorial(0, 0) == 1

    def test_rising_values(self):
        assert rising_factorial(2, 3) == 24
        assert rising_factorial(Fraction(1, 2), 2) == Fraction(3, 4)

    def test_falling_values(self):
        assert falling_factorial(5, 2) == 20
        assert falling_factorial(2, 3) == 0  # factor (2-2) vanishes
        for n in range(8):
            fact = 1
            for i in range(1, n + 1):
                fact *= i
            assert falling_factorial(n, n) == fact

    def test_binomial(self):
        assert binomial(5, 2) == 10
        assert binomial(7, 0) == 1
        assert binomial(3, 4) == 0

    @given(rationals, st.integers(0, 12))
    def test_falling_is_reflected_rising(self, a, m):
        assert falling_factorial(a, m) == (-1) ** m * rising_factorial(-a, m)

    @given(st.integers(0, 30), st.integers(0, 30))
    def test_binomial_symmetry(self, m, n):
        assert binomial(m, n) == binomial(m, m - n) if n <= m else binomial(m, n) == 0

    def test_rising_ratio_used_by_series(self):
        # r_(j) = j! C(j+r-1, j)
        import math
        for r in range(1, 16):
            for j in range(16):
                assert rising_factorial(r, j) == math.factorial(j) * binomial(j + r - 1, j)


class TestStirling:
    def test_small_values_against_oracle(self):
        oracle = stirling_oracle(12)
        for n in range(13):
            for k in range(n + 1):
                assert stirling1_unsigned(n, k) == oracle[n][k]
        assert stirling1_unsigned(4, 2) == 11

    def test_edges(self):
        assert stirling1_unsigned(0, 0) == 1
        for n in range(1, 10):
            assert stirling1_unsigned(n, n) == 1
            assert stirling1_unsigned(n, 0) == 0
            assert stirling1_unsigned(n, n + 3) == 0

    def test_pascal_type_recurrence(self):
        for n in range(1, 26):
            for k in range(1, n + 1):
                assert stirling1_unsigned(n, k) == (
                    stirling1_unsigned(n - 1, k - 1) + (n - 1) * stirling1_unsigned(n - 1, k)
                )

    def test_generating_function(self):
        # rising_factorial(x, n) = sum_k |s(n,k)| x^k at 10 distinct rationals
        points = [Fraction(i, 3) for i in range(-4, 6)]
        for n in range(21):
            for x in points:
                direct = rising_factorial(x, n)
                summed = sum(stirling1_unsigned(n, k) * x**k for k in range(n + 1))
                assert direct == summed

    def test_cap(self):
        from fvkit.combinatorics import _StirlingTable
        small = _StirlingTable(cap=8)
        assert small.value(8, 3) > 0
        with pytest.raises(ValueError):
            small.value(9, 2)


class TestRationalPolynomial:
    def test_rising_poly_examples(self):
        assert rising_factorial_poly(0, 1).coefficients == (0, 1)
        assert rising_factorial_poly(1, 2).coefficients == (2, 3, 1)

    def test_rising_poly_coefficients_are_stirling(self):
        for m in range(10):
            coeffs = rising_factorial_poly(0, m).coefficients
            for k, c in enumerate(coeffs):
                assert c == stirling1_unsigned(m, k)

    def test_zero_polynomial_trimming(self):
        assert RationalPolynomial([0, 0]).coefficients == ()
        assert RationalPolynomial([1, 2, 0]).coefficients == (1, 2)
        assert RationalPolynomial().degree == -1

    @given(st.lists(rationals, max_size=6), st.lists(rationals, max_size=6), rationals)
    def test_ring_ops_match_evaluation(self, a, b, x):
        pa, pb = RationalPolynomial(a), RationalPolynomial(b)
        assert (pa + pb).evaluate(x) == pa.evaluate(x) + pb.evaluate(x)
        assert (pa - pb).evaluate(x) == pa.evaluate(x) - pb.evaluate(x)
        assert (pa * pb).evaluate(x) == pa.evaluate(x) * pb.evaluate(x)

    @given(st.lists(rationals, max_size=5), st.lists(rationals, max_size=5))
    def test_mul_commutes(self, a, b):
        pa, pb = RationalPolynomial(a), RationalPolynomial(b)
        assert pa * pb == pb * pa


class TestVanishingAlternatingSum:
    def test_k1(self):
        assert check_vanishing_alternating_sum(1, 1, Fraction(3, 2))

    def test_examples(self):
        assert check_vanishing_alternating_sum(2, 1, 1)
        assert check_vanishing_alternating_sum(6, 3, Fraction(7, 3))

    def test_grid(self):
        for k in range(1, 9):
            for r in range(1, k + 1):
                for phi in (Fraction(1, 3), 1, Fraction(5, 2), 10):
                    assert check_vanishing_alternating_sum(k, r, phi)

    def test_rejects_bad_r(self):
        with pytest.raises(ValueError):
            check_vanishing_alternating_sum(3, 0, 1)
        with pytest.raises(ValueError):
            check_vanishing_alternating_sum(3, 4, 1)


class TestShiftedRisingExpansion:
    def test_m_equals_r_is_trivially_one(self):
        assert rising_factorial_poly(5, 0).coefficients == (1,)
        assert check_shifted_rising_factorial_expansion(7, 7)

    def test_examples(self):
        assert check_shifted_rising_factorial_expansion(3, 1)
        assert check_shifted_rising_factorial_expansion(12, 5)

    def test_grid_both_methods(self):
        for m in range(1, 11):
            for r in range(1, m + 1):
                assert check_shifted_rising_factorial_expansion(m, r)
                assert check_shifted_rising_factorial_expansion(m, r, method="points")

    def test_rejects(self):
        with pytest.raises(ValueError):
            check_shifted_rising_factorial_expansion(3, 0)
        with pytest.raises(ValueError):
            check_shifted_rising_factorial_expansion(3, 4)


class TestStirlingConvolution:
    def test_a_equals_b_collapses(self):
        for c in range(1, 8):
            for a in range(1, c + 1):
                assert check_stirling_convolution(a, a, c)

    def test_examples(self):
        assert check_stirling_convolution(1, 2, 3)
        assert check_stirling_convolution(2, 4, 7)

    def test_grid(self):
        for c in range(1, 10):
            for b in range(1, c + 1):
                for a in range(1, b + 1):
                    assert check_stirling_convolution(a, b, c)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            check_stirling_convolution(3, 2, 5)
        with pytest.raises(ValueError):
            check_stirling_convolution(1, 4, 3)
