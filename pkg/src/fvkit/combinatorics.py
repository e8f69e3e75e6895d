"""Exact combinatorial primitives: factorials, Stirling numbers, and the
identity checks everything else in the package leans on.

All arithmetic here is arbitrary-precision integer/rational.  No floats.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


def rising_factorial(a: Rational, m: int) -> Rational:
    """a(a+1)...(a+m-1), with the empty product equal to 1."""
    if m < 0:
        raise ValueError("m must be >= 0")
    out: Rational = 1
    for i in range(m):
        out *= a + i
    return out


def falling_factorial(a: Rational, m: int) -> Rational:
    """a(a-1)...(a-m+1), with the empty product equal to 1.

    For integer a with 0 <= a < m one of the factors is zero, so the
    product is zero; this is the convention the overlap pmf relies on.
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    out: Rational = 1
    for i in range(m):
        out *= a - i
    return out


def binomial(m: int, n: int) -> int:
    """C(m, n) with C(m, n) = 0 whenever n > m or n < 0."""
    if n < 0 or n > m:
        return 0
    n = min(n, m - n)
    out = 1
    for i in range(1, n + 1):
        out = out * (m - n + i) // i
    return out


class _StirlingTable:
    """Triangular table of unsigned Stirling numbers of the first kind.

    Rows are grown on demand via |s(n,k)| = |s(n-1,k-1)| + (n-1)|s(n-1,k)|.
    Growth is serialized by a lock so concurrent readers see a consistent
    table; a cap bounds memory.
    """

    def __init__(self, cap: int = 512):
        self.cap = cap
        self._rows: list[list[int]] = [[1]]
        self._lock = threading.Lock()

    def value(self, n: int, k: int) -> int:
        if n < 0 or k < 0:
            raise ValueError("n and k must be >= 0")
        if k > n:
            return 0
        if n >= len(self._rows):
            self._grow(n)
        return self._rows[n][k]

    def _grow(self, n: int) -> None:
        if n > self.cap:
            raise ValueError(f"Stirling table capped at n <= {self.cap}")
        with self._lock:
            while len(self._rows) <= n:
                i = len(self._rows)
                prev = self._rows[i - 1]
                row = [0] * (i + 1)
                for k in range(1, i + 1):
                    row[k] = prev[k - 1] + (i - 1) * (prev[k] if k < i else 0)
                self._rows.append(row)


_STIRLING = _StirlingTable()


def stirling1_unsigned(n: int, k: int) -> int:
    """|s(n, k)|: the coefficient of x^k in x(x+1)...(x+n-1)."""
    return _STIRLING.value(n, k)


class RationalPolynomial:
    """Univariate polynomial with exact rational coefficients.

    Coefficient i is the coefficient of theta^i.  Trailing zeros are
    trimmed on construction, so the zero polynomial has no coefficients
    and equality is plain coefficient equality.
    """

    __slots__ = ("coefficients",)

    def __init__(self, coefficients=()):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(coeffs)

    @classmethod
    def constant(cls, c: Rational) -> "RationalPolynomial":
        return cls([c])

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPolynomial(out)

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + other.scale(-1)

    def __mul__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return RationalPolynomial()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
        return RationalPolynomial(out)

    def scale(self, c: Rational) -> "RationalPolynomial":
        return RationalPolynomial([Fraction(c) * x for x in self.coefficients])

    def evaluate(self, x: Rational) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __repr__(self) -> str:
        return f"RationalPolynomial({list(self.coefficients)!r})"


def rising_factorial_poly(offset: Rational, m: int) -> RationalPolynomial:
    """The polynomial (theta + offset)(theta + offset + 1)...(theta + offset + m - 1)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    out = RationalPolynomial([1])
    for i in range(m):
        out = out * RationalPolynomial([Fraction(offset) + i, 1])
    return out


def check_vanishing_alternating_sum(k: int, r: int, phi: Rational) -> bool:
    """Check that sum_{l=0}^{k} (-1)^(k-l) C(k,l) (phi+l)_(k-r) is exactly 0.

    The summand is a degree k-r polynomial in l with k-r < k, so the k-th
    order alternating binomial difference annihilates it.  Requires
    1 <= r <= k.
    """
    if not 1 <= r <= k:
        raise ValueError("need 1 <= r <= k")
    phi = Fraction(phi)
    total = Fraction(0)
    for l in range(k + 1):
        sign = -1 if (k - l) % 2 else 1
        total += sign * binomial(k, l) * rising_factorial(phi + l, k - r)
    return total == 0


def _shifted_rising_expansion_lhs(m: int, r: int) -> RationalPolynomial:
    # sum_{k=0}^{m-r} k! C(k+r-1,k) C(m-r,k) theta_(m-r-k), as a polynomial in theta
    total = RationalPolynomial()
    fact_k = 1
    for k in range(m - r + 1):
        if k > 0:
            fact_k *= k
        coef = fact_k * binomial(k + r - 1, k) * binomial(m - r, k)
        total = total + rising_factorial_poly(0, m - r - k).scale(coef)
    return total


def check_shifted_rising_factorial_expansion(m: int, r: int, method: str = "coefficients") -> bool:
    """Check the expansion of (theta+r)_(m-r) as a weighted sum of theta_(j) terms.

    ``method="coefficients"`` compares both sides as polynomials in theta,
    which establishes the identity for every theta at once.
    ``method="points"`` instead evaluates both sides at degree+1 distinct
    rationals, a cross-validation of the symbolic route.
    """
    if not 0 < r <= m:
        raise ValueError("need m >= r > 0")
    lhs = _shifted_rising_expansion_lhs(m, r)
    rhs = rising_factorial_poly(r, m - r)
    if method == "coefficients":
        return lhs == rhs
    if method == "points":
        deg = m - r
        points = [Fraction(2 * i + 1, 3) for i in range(deg + 1)]
        return all(lhs.evaluate(x) == rhs.evaluate(x) for x in points)
    raise ValueError(f"unknown method {method!r}")


def check_stirling_convolution(a: int, b: int, c: int) -> bool:
    """Check C(b,a)|s(c,b)| = sum_j C(c,j)|s(c-j,a)||s(j,b-a)| for a <= b <= c."""
    if not (0 < a <= b <= c):
        raise ValueError("need 0 < a <= b <= c")
    lhs = binomial(b, a) * stirling1_unsigned(c, b)
    rhs = 0
    for j in range(b - a, c - a + 1):
        rhs += binomial(c, j) * stirling1_unsigned(c - j, a) * stirling1_unsigned(j, b - a)
    return lhs == rhs
