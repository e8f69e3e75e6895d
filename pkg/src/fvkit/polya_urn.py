"""The general Polya-urn predictive scheme over n conditioning atoms, and
the distribution of the overlap count: how many distinct conditioning atoms
an m-draw sample hits.

The base measure is nonatomic, so the urn is modeled purely by labels:
a draw either hits a conditioning atom, repeats an earlier draw, or is a
fresh value.  No real-number equality testing is ever involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .combinatorics import binomial, falling_factorial, rising_factorial

Rational = Union[int, Fraction]

BRUTEFORCE_PATH_BUDGET = 10**7


@dataclass(frozen=True)
class UrnParams:
    """theta >= 0 plus the number n of distinct conditioning atoms."""

    theta: Union[float, Fraction]
    n: int

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.n < 0:
            raise ValueError("n must be >= 0")
        if not self.theta + self.n > 0:
            raise ValueError("theta + n must be > 0 for the first draw to be defined")


@dataclass(frozen=True)
class HitX:
    """Draw equal to conditioning atom X_i (1-based)."""
    i: int


@dataclass(frozen=True)
class RepeatY:
    """Draw repeating the earlier draw Y_j (1-based, j < current index)."""
    j: int


@dataclass(frozen=True)
class Fresh:
    """Fresh draw from the nonatomic base: a.s. a new value."""


DrawLabel = Union[HitX, RepeatY, Fresh]


@dataclass(frozen=True)
class UrnTrace:
    params: UrnParams
    labels: tuple

    def __post_init__(self):
        for pos, lab in enumerate(self.labels, start=1):
            if isinstance(lab, HitX) and not 1 <= lab.i <= self.params.n:
                raise ValueError(f"HitX index {lab.i} outside 1..{self.params.n}")
            if isinstance(lab, RepeatY) and not 1 <= lab.j < pos:
                raise ValueError(f"RepeatY at position {pos} must reference an earlier draw")


@dataclass(frozen=True)
class OverlapPmf:
    """Distribution of the overlap count r over 0..min(m, n); exact
    rational probabilities."""

    m: int
    n: int
    theta: Union[Fraction, float]
    probs: tuple

    @property
    def probs_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])


@dataclass(frozen=True)
class EmpiricalOverlapPmf:
    m: int
    n: int
    theta: float
    reps: int
    probs: np.ndarray
    stderr: np.ndarray


def sample_urn(params: UrnParams, m: int, rng: np.random.Generator) -> UrnTrace:
    """Sequential sample of m urn draws.  Draw j hits each conditioning atom
    with probability 1/(theta+n+j-1), repeats each earlier draw with the
    same probability, and is fresh with probability theta/(theta+n+j-1)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    theta = float(params.theta)
    n = params.n
    labels = []
    for j in range(1, m + 1):
        u = rng.random() * (theta + n + j - 1)
        if u < n:
            labels.append(HitX(int(u) + 1))
        elif u < n + j - 1:
            labels.append(RepeatY(int(u - n) + 1))
        else:
            labels.append(Fresh())
    return UrnTrace(params=params, labels=tuple(labels))


def overlap_count(trace: UrnTrace) -> int:
    """Number of distinct conditioning atoms hit, resolving repeat chains
    to their root draw first."""
    roots: list[int] = []  # conditioning-atom index per draw, 0 for fresh-rooted
    hit = set()
    for lab in trace.labels:
        if isinstance(lab, HitX):
            roots.append(lab.i)
            hit.add(lab.i)
        elif isinstance(lab, RepeatY):
            r = roots[lab.j - 1]
            roots.append(r)
            if r:
                hit.add(r)
        else:
            roots.append(0)
    return len(hit)


def _overlap_form_direct(r: int, m: int, n: int, theta: Fraction) -> Fraction:
    return Fraction(
        falling_factorial(n, r) * rising_factorial(theta + r, m - r) * binomial(m, r),
        rising_factorial(theta + n, m),
    )


def _overlap_form_extended(r: int, m: int, n: int, theta: Fraction) -> Fraction:
    num = math.factorial(r) * binomial(n, r) * binomial(m, r) \
        * rising_factorial(theta, n) * rising_factorial(theta, m)
    den = rising_factorial(theta, n + m) * rising_factorial(theta, r)
    return Fraction(num, den)


def _shifted_rising_via_expansion(theta: Fraction, r: int, m: int) -> Fraction:
    # (theta+r)_(m-r) recomputed through its expansion as a weighted sum of
    # plain rising factorials; valid for r >= 1
    total = Fraction(0)
    for k in range(m - r + 1):
        total += (math.factorial(k) * binomial(k + r - 1, k) * binomial(m - r, k)
                  * rising_factorial(theta, m - r - k))
    return total


def overlap_pmf_exact(m: int, n: int, theta, via_expansion: bool = False) -> OverlapPmf:
    """Closed-form overlap pmf for theta > 0, computed through BOTH published
    forms and cross-asserted entry by entry; exact rational output summing
    to exactly 1.

    ``via_expansion`` swaps the shifted rising factorial in the direct form
    for its combinatorial expansion, tying the pmf to the underlying
    identity.
    """
    if m < 0 or n < 0:
        raise ValueError("m and n must be >= 0")
    theta = Fraction(theta)
    if not theta > 0:
        raise ValueError("theta must be > 0 (use overlap_pmf_theta0 for theta = 0)")
    probs = []
    for r in range(min(m, n) + 1):
        if via_expansion and r >= 1:
            direct = Fraction(
                falling_factorial(n, r) * _shifted_rising_via_expansion(theta, r, m)
                * binomial(m, r),
                rising_factorial(theta + n, m),
            )
        else:
            direct = _overlap_form_direct(r, m, n, theta)
        extended = _overlap_form_extended(r, m, n, theta)
        if direct != extended:
            raise RuntimeError(
                f"overlap pmf forms disagree at r={r}, m={m}, n={n}, theta={theta}: "
                f"{direct} vs {extended}"
            )
        probs.append(direct)
    if sum(probs) != 1:
        raise RuntimeError(f"overlap pmf does not sum to 1 for m={m}, n={n}, theta={theta}")
    return OverlapPmf(m=m, n=n, theta=theta, probs=tuple(probs))


def overlap_pmf_theta0(m: int, n: int) -> OverlapPmf:
    """Overlap pmf in the theta = 0 regime (no fresh mass): requires
    m, n >= 1, and r = 0 has probability 0.  Both printed forms are
    computed and cross-asserted."""
    if m < 1 or n < 1:
        raise ValueError("theta = 0 pmf needs m >= 1 and n >= 1")
    probs = []
    for r in range(min(m, n) + 1):
        a = Fraction(
            falling_factorial(n, r) * rising_factorial(r, m - r) * binomial(m, r),
            rising_factorial(n, m),
        )
        b = Fraction(
            r * binomial(m, r) * binomial(n, r) * math.factorial(n - 1) * math.factorial(m - 1),
            math.factorial(n + m - 1),
        )
        if a != b:
            raise RuntimeError(f"theta=0 overlap forms disagree at r={r}, m={m}, n={n}: {a} vs {b}")
        probs.append(a)
    if probs[0] != 0 or sum(probs) != 1:
        raise RuntimeError(f"theta=0 overlap pmf invalid for m={m}, n={n}")
    return OverlapPmf(m=m, n=n, theta=Fraction(0), probs=tuple(probs))


def bruteforce_path_count(m: int, n: int) -> int:
    paths = 1
    for j in range(1, m + 1):
        paths *= n + j
    return paths


def overlap_pmf_bruteforce(m: int, n: int, theta) -> OverlapPmf:
    """Exhaustive enumeration over every label sequence of length m,
    accumulating exact path probabilities grouped by overlap count.

    This mirrors the sequential predictive rule directly and is the
    independent oracle for the closed forms.  Instances beyond the path
    budget are rejected.
    """
    if m < 0 or n < 0:
        raise ValueError("m and n must be >= 0")
    theta = Fraction(theta)
    if not theta + n > 0:
        raise ValueError("theta + n must be > 0")
    if bruteforce_path_count(m, n) > BRUTEFORCE_PATH_BUDGET:
        raise ValueError(
            f"enumeration budget exceeded: {bruteforce_path_count(m, n)} paths "
            f"> {BRUTEFORCE_PATH_BUDGET}"
        )
    acc = [Fraction(0)] * (min(m, n) + 1)
    roots = [0] * m  # atom index (1-based) or 0 for fresh, per draw

    def rec(j: int, prob: Fraction, hitmask: int):
        if j > m:
            acc[hitmask.bit_count()] += prob
            return
        denom = theta + n + j - 1
        unit = prob / denom
        for i in range(1, n + 1):
            roots[j - 1] = i
            rec(j + 1, unit, hitmask | (1 << (i - 1)))
        for l in range(1, j):
            r = roots[l - 1]
            roots[j - 1] = r
            rec(j + 1, unit, hitmask | ((1 << (r - 1)) if r else 0))
        if theta:
            roots[j - 1] = 0
            rec(j + 1, unit * theta, hitmask)

    rec(1, Fraction(1), 0)
    if sum(acc) != 1:
        raise RuntimeError(f"enumeration probabilities do not sum to 1 for m={m}, n={n}")
    return OverlapPmf(m=m, n=n, theta=theta, probs=tuple(acc))


def overlap_pmf_montecarlo(m: int, n: int, theta, reps: int,
                           rng: np.random.Generator) -> EmpiricalOverlapPmf:
    """Monte Carlo overlap frequencies with binomial standard errors, for
    instances beyond the enumeration budget.  Vectorized over replicates;
    distributionally identical to repeated sample_urn + overlap_count."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    theta_f = float(theta)
    if not theta_f + n > 0:
        raise ValueError("theta + n must be > 0")
    kmax = min(m, n)
    counts = np.zeros(kmax + 1, dtype=np.int64)
    chunk = max(1, 4_000_000 // max(m, 1))
    done = 0
    while done < reps:
        c = min(chunk, reps - done)
        roots = np.empty((c, max(m, 1)), dtype=np.int64)
        for j in range(1, m + 1):
            u = rng.random(c) * (theta_f + n + j - 1)
            col = np.where(u < n, u.astype(np.int64), np.int64(-1))
            if j > 1:
                is_rep = (u >= n) & (u < n + j - 1)
                l = np.clip((u - n).astype(np.int64), 0, j - 2)
                prev = np.take_along_axis(roots[:, :j - 1], l[:, None], axis=1)[:, 0]
                col = np.where(is_rep, prev, col)
            roots[:, j - 1] = col
        if m == 0:
            distinct = np.zeros(c, dtype=np.int64)
        else:
            s = np.sort(roots[:, :m], axis=1)
            newval = np.ones_like(s, dtype=bool)
            newval[:, 1:] = s[:, 1:] != s[:, :-1]
            distinct = ((s >= 0) & newval).sum(axis=1)
        counts += np.bincount(distinct, minlength=kmax + 1)[:kmax + 1]
        done += c
    probs = counts / reps
    stderr = np.sqrt(probs * (1 - probs) / reps)
    return EmpiricalOverlapPmf(m=m, n=n, theta=theta_f, reps=reps, probs=probs, stderr=stderr)
