"""The pure death process with rate 0.5*n*(n-1+theta), started at infinity.

The marginal pmf d_n(t) is an alternating series with severe cancellation
for small t, so series evaluation runs in mpmath wide floats with the
rational coefficients carried exactly until the exponential factor is
applied.  Truncation is certified: we stop only once a computable bound
shows every remaining term is strictly smaller than its predecessor, at
which point the alternating-series bound applies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath
import numpy as np

from .combinatorics import binomial, falling_factorial, rising_factorial

Rational = Union[int, Fraction]


class PrecisionExhaustedError(RuntimeError):
    """Raised when a series cannot be truncated within the requested tolerance.

    ``smallest_achievable`` is the tightest absolute tolerance the evaluation
    could have certified (``inf`` when the decreasing regime was never
    reached, which happens for very small t at low ``max_terms``).
    """

    def __init__(self, message: str, smallest_achievable: float):
        super().__init__(f"{message} (smallest achievable tolerance: {smallest_achievable:g})")
        self.smallest_achievable = smallest_achievable


@dataclass(frozen=True)
class DeathParams:
    """Mutation parameter theta >= 0.  theta = 0 is the coalescent regime:
    state 1 is absorbing and d_0(t) = 0 identically."""

    theta: Union[float, Fraction]

    def __post_init__(self):
        if self.theta < 0:
            raise ValueError("theta must be >= 0")

    @property
    def theta_fraction(self) -> Fraction:
        return Fraction(self.theta)

    @property
    def is_coalescent(self) -> bool:
        return self.theta == 0


@dataclass(frozen=True)
class PrecisionConfig:
    working_digits: int = 60
    tail_tol: float = 1e-12
    max_terms: int = 400

    def __post_init__(self):
        if self.working_digits < 16:
            raise ValueError("working_digits must be >= 16")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be > 0")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


@dataclass(frozen=True)
class DeathPmf:
    """Truncated pmf of the death count at time t.

    ``probs[n]`` is d_n(t) as an mpmath float; ``term_bounds[n]`` bounds the
    absolute series-truncation error of that entry.  ``residual`` is the
    mass attributed to n > n_max.  ``clamped`` lists indices whose tiny
    negative computed values were clamped to zero.
    """

    t: float
    params: DeathParams
    probs: tuple
    term_bounds: tuple
    residual: float
    clamped: tuple
    working_digits: int

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    @property
    def term_bound(self) -> float:
        return max(self.term_bounds, default=0.0)

    @property
    def probs_float(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def rows(self):
        """(n, d_n, term_bound) rows for table output."""
        return [(n, float(p), b) for n, (p, b) in enumerate(zip(self.probs, self.term_bounds))]


def death_rate(n: int, params: DeathParams) -> float:
    """Rate 0.5*n*(n-1+theta) of the jump n -> n-1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return 0.5 * n * (n - 1 + float(params.theta))


def _death_rate_fraction(n: int, theta: Fraction) -> Fraction:
    return Fraction(n, 2) * (n - 1 + theta)


def _mpf_frac(x) -> mpmath.mpf:
    # exact rational -> mpf at the current working precision
    fr = Fraction(x)
    return mpmath.mpf(fr.numerator) / fr.denominator


def _gamma_factor(m: int, theta: Fraction, t: Fraction):
    # (2m - 1 + theta) * exp(-lambda_m * t), under the caller's mp context
    lam_t = _death_rate_fraction(m, theta) * t
    return (2 * m - 1 + _mpf_frac(theta)) * mpmath.exp(-_mpf_frac(lam_t))


class _GammaCache:
    def __init__(self, theta: Fraction, t: Fraction):
        self.theta = theta
        self.t = t
        self._vals: dict[int, object] = {}

    def __call__(self, m: int):
        v = self._vals.get(m)
        if v is None:
            v = _gamma_factor(m, self.theta, self.t)
            self._vals[m] = v
        return v


def _alternating_series(n: int, theta: Fraction, t: Fraction, gamma, prec: PrecisionConfig):
    """Sum the alternating series for d_n(t) (n >= 1) or for the n = 0
    complement sum, returning (value, error_bound) as (mpf, float).

    The stop rule: at candidate index m, a closed-form bound on the term
    ratio certifies that every term from m on is strictly decreasing; if
    additionally |term_m| < tail_tol, the alternating-series bound gives
    |neglected tail| <= |term_m| and we stop without adding term m.
    """
    th = float(theta)
    tf = float(t)
    if n >= 1:
        m0 = n
        coeff = Fraction(rising_factorial(theta + n, n - 1), math.factorial(n))
    else:
        # complement series sum_{m>=1} (-1)^(m-1) theta_(m-1)/m! gamma_m
        m0 = 1
        coeff = Fraction(1)

    total = mpmath.mpf(0)
    peak = 0.0
    nterms = 0
    best_cert = math.inf
    sign = 1
    m = m0
    while nterms < prec.max_terms:
        a_mpf = _mpf_frac(coeff) * gamma(m)
        a = float(a_mpf)
        # sup over m' >= m of the rational part of the term ratio
        if n >= 1:
            f = (th + n + m - 1) / (m + 1 - n)
        else:
            f = max(1.0, (th + m - 1) / (m + 1))
        ratio_bound = f * (2 * m + 1 + th) / (2 * m - 1 + th) * math.exp(-(m + th / 2) * tf)
        if ratio_bound < 0.999:
            if a < prec.tail_tol:
                round_slack = peak * nterms * 10.0 ** (-(prec.working_digits - 2))
                if round_slack > prec.tail_tol:
                    raise PrecisionExhaustedError(
                        f"cancellation exceeds working precision for n={n}, t={tf}",
                        smallest_achievable=round_slack,
                    )
                return total, a + round_slack
            best_cert = min(best_cert, a)
        total += sign * a_mpf
        peak = max(peak, abs(a))
        sign = -sign
        coeff = coeff * (theta + n + m - 1) / (m + 1 - n) if n >= 1 else coeff * (theta + m - 1) / (m + 1)
        m += 1
        nterms += 1
    raise PrecisionExhaustedError(
        f"series for n={n} at t={tf} did not reach tolerance {prec.tail_tol:g} "
        f"within {prec.max_terms} terms; increase max_terms or tail_tol",
        smallest_achievable=best_cert,
    )


def _death_prob(n: int, t: Fraction, params: DeathParams, prec: PrecisionConfig, gamma=None):
    """Single entry d_n(t) with its error bound, evaluated at the precision
    the config asks for regardless of the ambient mp context."""
    theta = params.theta_fraction
    with mpmath.workdps(prec.working_digits):
        if gamma is None:
            gamma = _GammaCache(theta, t)
        if n == 0:
            if params.is_coalescent:
                return mpmath.mpf(0), 0.0
            s, bound = _alternating_series(0, theta, t, gamma, prec)
            return 1 - s, bound
        s, bound = _alternating_series(n, theta, t, gamma, prec)
        return s, bound


def death_pmf(t, params: DeathParams, prec: PrecisionConfig = PrecisionConfig()) -> DeathPmf:
    """Compute {d_n(t)} for n = 0..n_max, with n_max chosen so the
    accumulated mass reaches 1 - tail_tol."""
    if not t > 0:
        raise ValueError("t must be > 0")
    tf = Fraction(t)
    theta = params.theta_fraction
    probs = []
    bounds = []
    clamped = []
    with mpmath.workdps(prec.working_digits):
        gamma = _GammaCache(theta, tf)
        mass = mpmath.mpf(0)
        total_bound = 0.0
        n = 0
        while True:
            if n >= 2:
                # the computed mass can sit below 1 - tail_tol by up to the
                # summed per-entry truncation bounds, so the stop condition
                # allows that slack; it still certifies true tail <= tail_tol
                if 1 - float(mass) <= prec.tail_tol + total_bound:
                    break
            p, b = _death_prob(n, tf, params, prec, gamma)
            if p < 0:
                if float(-p) <= max(b, prec.tail_tol):
                    clamped.append(n)
                    p = mpmath.mpf(0)
                else:
                    raise PrecisionExhaustedError(
                        f"d_{n}({float(t)}) computed as {float(p):g} < 0, beyond its error bound {b:g}",
                        smallest_achievable=float(-p),
                    )
            probs.append(p)
            bounds.append(b)
            mass += p
            total_bound += b
            n += 1
        residual = max(0.0, float(1 - mass))
    return DeathPmf(
        t=float(t),
        params=params,
        probs=tuple(probs),
        term_bounds=tuple(bounds),
        residual=residual,
        clamped=tuple(clamped),
        working_digits=prec.working_digits,
    )


def _inner_prec(prec: PrecisionConfig, shrink: float) -> PrecisionConfig:
    # tighten the series tolerance for use inside weighted sums, raising
    # the working precision to match so cancellation headroom is preserved
    extra = min(80, max(0, 2 * math.ceil(-math.log10(shrink)) + 8))
    digits = prec.working_digits + extra
    floor = 10.0 ** (-(digits - 10))
    return PrecisionConfig(
        working_digits=digits,
        tail_tol=max(prec.tail_tol * shrink, floor),
        max_terms=prec.max_terms,
    )


def transition_given_n(n: int, s, params: DeathParams, prec: PrecisionConfig = PrecisionConfig()):
    """Transition vector P(count = r after s | count = n now) for r = 0..n,
    recovered from the pmf series by inverting the urn-weighted sum that
    links d_m(s) to the transition probabilities.  Requires theta > 0
    (the theta = 0 regime is served by ``transition_closed_form``)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if params.is_coalescent:
        raise ValueError("theta = 0 transitions go through transition_closed_form")
    theta = params.theta_fraction
    # absolute output error scales with the largest prefactor, so shrink accordingly
    pre_max = max(
        Fraction(rising_factorial(theta, n) * math.factorial(n),
                 rising_factorial(theta, r) * math.factorial(n - r))
        for r in range(n + 1)
    )
    pmf = death_pmf(s, params, _inner_prec(prec, 1e-4 / float(pre_max)))
    out = []
    with mpmath.workdps(prec.working_digits):
        for r in range(n + 1):
            acc = mpmath.mpf(0)
            for m in range(r, pmf.n_max + 1):
                w = Fraction(binomial(m, r), rising_factorial(theta + m, n))
                acc += _mpf_frac(w) * pmf.probs[m]
            pre = Fraction(rising_factorial(theta, n) * math.factorial(n),
                           rising_factorial(theta, r) * math.factorial(n - r))
            out.append(float(_mpf_frac(pre) * acc))
    return out


def transition_closed_form(n: int, r: int, s, params: DeathParams,
                           working_digits: int = 60) -> float:
    """P(count = r after s | count = n) for the finite pure death chain with
    pairwise distinct rates, via the standard partial-fraction formula.
    This is the independent oracle for ``transition_given_n``."""
    if not 0 <= r <= n:
        raise ValueError("need 0 <= r <= n")
    if not s > 0:
        raise ValueError("s must be > 0")
    theta = params.theta_fraction
    rates = [_death_rate_fraction(k, theta) for k in range(r, n + 1)]
    if len(set(rates)) != len(rates):
        raise ValueError("coincident rates: closed form needs pairwise distinct rates")
    sf = Fraction(s)
    with mpmath.workdps(working_digits):
        if r == n:
            return float(mpmath.exp(-_mpf_frac(rates[-1] * sf)))
        prod_rates = Fraction(1)
        for lam in rates[1:]:
            prod_rates *= lam
        total = mpmath.mpf(0)
        for i, lam_k in enumerate(rates):
            denom = Fraction(1)
            for j, lam_j in enumerate(rates):
                if j != i:
                    denom *= lam_j - lam_k
            total += mpmath.exp(-_mpf_frac(lam_k * sf)) / _mpf_frac(denom)
        return float(_mpf_frac(prod_rates) * total)


def check_survival_identity(n: int, s, params: DeathParams,
                            prec: PrecisionConfig = PrecisionConfig()) -> float:
    """Residual of: sum_m m_[n]/(theta+m)_(n) d_m(s) = exp(-lambda_n s).

    The left side is the stay-put transition probability recovered from the
    pmf series; the right side is the direct exponential holding-time law.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if params.is_coalescent:
        raise ValueError("requires theta > 0")
    theta = params.theta_fraction
    pmf = death_pmf(s, params, _inner_prec(prec, 1e-4))
    sf = Fraction(s)
    with mpmath.workdps(prec.working_digits):
        acc = mpmath.mpf(0)
        for m in range(n, pmf.n_max + 1):
            w = Fraction(falling_factorial(m, n), rising_factorial(theta + m, n))
            acc += _mpf_frac(w) * pmf.probs[m]
        rhs = mpmath.exp(-_mpf_frac(_death_rate_fraction(n, theta) * sf))
        return abs(float(acc - rhs))


def _single_death_closed_form(n: int, s, theta: Fraction, dps: int):
    lam_hi = _death_rate_fraction(n, theta)
    lam_lo = _death_rate_fraction(n - 1, theta)
    sf = Fraction(s)
    with mpmath.workdps(dps):
        gap = _mpf_frac(lam_hi - lam_lo)
        return (mpmath.exp(-_mpf_frac(lam_lo * sf)) - mpmath.exp(-_mpf_frac(lam_hi * sf))) / (2 * gap)


def check_single_death_identity(n: int, s, params: DeathParams,
                                prec: PrecisionConfig = PrecisionConfig()) -> float:
    """Residual of the one-death identity: the urn-weighted pmf sum
    H(s) = sum_m m_[n-1]/(theta+m)_(n) d_m(s) against its closed form
    0.5*(exp(-lambda_{n-1} s) - exp(-lambda_n s))/(lambda_n - lambda_{n-1}).

    Also sanity-checks the s -> 0+ behavior of the closed form: H vanishes
    linearly, so 0 < H(1e-3) <= 5e-4."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if params.is_coalescent:
        raise ValueError("requires theta > 0")
    theta = params.theta_fraction
    h_small = float(_single_death_closed_form(n, Fraction(1, 1000), theta, prec.working_digits))
    assert 0 < h_small <= 5e-4, f"H(1e-3) = {h_small} outside (0, 5e-4]"
    pmf = death_pmf(s, params, _inner_prec(prec, 1e-4))
    with mpmath.workdps(prec.working_digits):
        acc = mpmath.mpf(0)
        for m in range(n - 1, pmf.n_max + 1):
            w = Fraction(falling_factorial(m, n - 1), rising_factorial(theta + m, n))
            acc += _mpf_frac(w) * pmf.probs[m]
        closed = _single_death_closed_form(n, s, theta, prec.working_digits)
        return abs(float(acc - closed))


def check_chapman_kolmogorov(r: int, t, s, params: DeathParams,
                             prec: PrecisionConfig = PrecisionConfig()) -> float:
    """Residual of the composition law
    d_r(t+s) = sum_{n,m} P(r | m, n) d_m(s) d_n(t),
    with P(r|m,n) the urn overlap pmf coefficient, computed exactly."""
    if r < 0:
        raise ValueError("r must be >= 0")
    if params.is_coalescent:
        raise ValueError("requires theta > 0")
    theta = params.theta_fraction
    inner = _inner_prec(prec, 1e-4)
    pmf_t = death_pmf(t, params, inner)
    pmf_s = death_pmf(s, params, inner)
    tf, sf = Fraction(t), Fraction(s)
    with mpmath.workdps(prec.working_digits):
        lhs, _ = _death_prob(r, tf + sf, params, inner)
        # theta_(k) table up to the largest n + m needed
        top = pmf_t.n_max + pmf_s.n_max
        rises = [Fraction(1)] * (top + 1)
        for k in range(1, top + 1):
            rises[k] = rises[k - 1] * (theta + k - 1)
        fact_r = math.factorial(r)
        rhs = mpmath.mpf(0)
        for n in range(r, pmf_t.n_max + 1):
            cn = fact_r * binomial(n, r) * rises[n]
            for m in range(r, pmf_s.n_max + 1):
                coef = Fraction(cn * binomial(m, r) * rises[m], rises[n + m] * rises[r])
                rhs += _mpf_frac(coef) * pmf_s.probs[m] * pmf_t.probs[n]
        return abs(float(lhs - rhs))


def check_nonabsorption_bounds(t, params: DeathParams,
                               prec: PrecisionConfig = PrecisionConfig()) -> bool:
    """True iff exp(-lambda_1 t) < 1 - d_0(t) < (1+theta) exp(-lambda_1 t),
    strictly, certified against a margin of 10x the achieved evaluation
    error.

    For large t the true value sits within ~exp(-(lambda_2-lambda_1)t) of
    the upper bound, far below any fixed tolerance, so the evaluation
    deepens until the margin resolves the gap; if the working precision
    cannot resolve it, the check fails loudly rather than guessing.
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    if params.is_coalescent:
        raise ValueError("requires theta > 0")
    theta = params.theta_fraction
    tf = Fraction(t)
    inner = _inner_prec(prec, 1e-12)
    floor = 10.0 ** (-(inner.working_digits - 10))
    with mpmath.workdps(inner.working_digits):
        lam1_t = _mpf_frac(_death_rate_fraction(1, theta) * tf)
        lo = mpmath.exp(-lam1_t)
        hi = (1 + _mpf_frac(theta)) * mpmath.exp(-lam1_t)
        tol = inner.tail_tol
        while True:
            d0, bound = _death_prob(0, tf, params,
                                    PrecisionConfig(inner.working_digits, tol,
                                                    inner.max_terms))
            mid = 1 - d0
            margin = 10 * max(bound, 5e-324)
            if lo + margin < mid < hi - margin:
                return True
            if mid < lo - margin or mid > hi + margin:
                return False
            # within the margin of an endpoint: unresolved at this depth
            if tol <= floor:
                raise PrecisionExhaustedError(
                    f"bound gap at t={float(t)} is below the certifiable "
                    f"resolution at {inner.working_digits} digits",
                    smallest_achievable=bound,
                )
            tol = max(tol * 1e-12, floor)


def sample_death_count(pmf: DeathPmf, rng: np.random.Generator, size: Optional[int] = None):
    """Draw the death count from a truncated pmf, renormalized over its
    support.  Rejects pmfs whose unassigned tail mass exceeds 1%."""
    if pmf.residual > 0.01:
        raise ValueError(f"pmf residual {pmf.residual:g} too large to sample from")
    p = np.clip(pmf.probs_float, 0.0, None)
    cum = np.cumsum(p)
    total = cum[-1]
    if size is None:
        return int(np.searchsorted(cum, rng.random() * total, side="right"))
    return np.searchsorted(cum, rng.random(size) * total, side="right").astype(np.int64)


@dataclass(frozen=True)
class EmpiricalPmf:
    """Monte Carlo estimate of the death-count distribution at time t,
    simulated from a finite start n0 (approximating the start at infinity)."""

    t: float
    theta: float
    n0: int
    reps: int
    probs: np.ndarray
    stderr: np.ndarray


_MC_CHUNK_TARGET = 5_000_000  # floats per simulation chunk


def mean_entry_time(n0: int, theta: float) -> float:
    """Mean time the infinite-start chain spends above n0:
    sum_{k>n0} 1/lambda_k, about 2/n0.

    A finite-start simulation must discount its clock by this amount or it
    lags the infinite-start law by O(1/n0), which is several standard
    errors at a million replicates."""
    M = n0 + 1_000_000
    ks = np.arange(n0 + 1, M + 1, dtype=float)
    return float((2.0 / (ks * (ks - 1 + theta))).sum()) + 2.0 / M


def _hold_rates(theta: float, hi: int, lo: int) -> tuple[np.ndarray, np.ndarray]:
    # holding-time columns for states hi down to lo, in jump order
    states = np.arange(hi, lo - 1, -1)
    return states, 0.5 * states * (states - 1 + theta)


def _death_chain_counts(t: float, theta: float, n0: int, reps: int,
                        rng: np.random.Generator, paired_double: bool = False,
                        entry_compensation: bool = True):
    """Simulate the chain from n0 (and, when ``paired_double``, also from
    2*n0 reusing the same holding times for states <= n0) and return state
    counts at time t.  State 1 is absorbing when theta = 0.

    With ``entry_compensation`` each run's clock is discounted by the mean
    entry time of the infinite-start chain into its start state, so the
    counts estimate the infinite-start law with O(1/n0^3) bias instead of
    O(1/n0).  Chunks draw from independently spawned substreams, so the
    result for a fixed generator is identical however chunks are scheduled.
    """
    lowest = 2 if theta == 0 else 1
    _, rates_low = _hold_rates(theta, n0, lowest)
    t_low = t - mean_entry_time(n0, theta) if entry_compensation else t
    if t_low <= 0:
        raise ValueError(
            f"t={t:g} is within the mean entry time of the start n0={n0}; "
            "the finite-start oracle needs a larger n0 or a larger t"
        )
    if paired_double:
        _, rates_high = _hold_rates(theta, 2 * n0, n0 + 1)
        t_hi = t - mean_entry_time(2 * n0, theta) if entry_compensation else t
    start_hi = 2 * n0 if paired_double else n0
    chunk = max(1, _MC_CHUNK_TARGET // start_hi)
    nchunks = -(-reps // chunk)
    streams = rng.spawn(2 * nchunks if paired_double else nchunks)
    counts = np.zeros(n0 + 1, dtype=np.int64)
    counts_hi = np.zeros(2 * n0 + 1, dtype=np.int64) if paired_double else None
    done = 0
    for i in range(nchunks):
        c = min(chunk, reps - done)
        h_low = streams[i].standard_exponential((c, rates_low.size)) / rates_low
        reach = np.cumsum(h_low, axis=1)
        states = n0 - (reach <= t_low).sum(axis=1)
        counts += np.bincount(states, minlength=n0 + 1)
        if paired_double:
            h_high = streams[nchunks + i].standard_exponential((c, rates_high.size)) / rates_high
            reach_hi = np.cumsum(h_high, axis=1)
            offset = reach_hi[:, -1]
            jumps = (reach_hi <= t_hi).sum(axis=1) + (reach + offset[:, None] <= t_hi).sum(axis=1)
            counts_hi += np.bincount(2 * n0 - jumps, minlength=2 * n0 + 1)
        done += c
    return (counts, counts_hi) if paired_double else counts


def mc_death_pmf(t: float, params: DeathParams, n0: int, reps: int,
                 rng: np.random.Generator, entry_compensation: bool = True) -> EmpiricalPmf:
    """Monte Carlo oracle for the death-count pmf: simulate the chain from
    the finite start n0, reps times, with the clock discounted by the mean
    time the infinite-start chain spends above n0.

    Pass ``entry_compensation=False`` to simulate the plain chain started
    exactly at n0 for duration t (the finite-chain law rather than the
    infinite-start approximation)."""
    if n0 < 2:
        raise ValueError("n0 must be >= 2")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    theta = float(params.theta)
    counts = _death_chain_counts(t, theta, n0, reps, rng,
                                 entry_compensation=entry_compensation)
    probs = counts / reps
    stderr = np.sqrt(probs * (1 - probs) / reps)
    return EmpiricalPmf(t=t, theta=theta, n0=n0, reps=reps, probs=probs, stderr=stderr)


@dataclass(frozen=True)
class SensitivityReport:
    """Effect of doubling the finite start n0 of the Monte Carlo oracle.

    The doubled run reuses the base run's holding times for states <= n0
    (common random numbers), so the shift isolates the finite-start bias;
    the joint standard errors are reported as if the runs were independent,
    which makes shift-vs-SE comparisons conservative."""

    base: EmpiricalPmf
    doubled: EmpiricalPmf
    max_abs_shift: float
    max_shift_in_se: float


def mc_death_pmf_sensitivity(t: float, params: DeathParams, n0: int, reps: int,
                             rng: np.random.Generator) -> SensitivityReport:
    """Run the Monte Carlo oracle at n0 and 2*n0 and report the largest
    pmf shift, in absolute terms and in units of the joint standard error."""
    if n0 < 2:
        raise ValueError("n0 must be >= 2")
    theta = float(params.theta)
    counts, counts_hi = _death_chain_counts(t, theta, n0, reps, rng, paired_double=True)
    probs = counts / reps
    probs_hi = counts_hi / reps
    se = np.sqrt(probs * (1 - probs) / reps)
    se_hi = np.sqrt(probs_hi * (1 - probs_hi) / reps)
    base = EmpiricalPmf(t=t, theta=theta, n0=n0, reps=reps, probs=probs, stderr=se)
    doubled = EmpiricalPmf(t=t, theta=theta, n0=2 * n0, reps=reps, probs=probs_hi, stderr=se_hi)
    k = probs.size
    shift = np.abs(probs_hi[:k] - probs)
    joint = np.sqrt(se ** 2 + se_hi[:k] ** 2)
    seen = shift > 0
    max_in_se = float(np.max(shift[seen] / joint[seen])) if seen.any() else 0.0
    return SensitivityReport(
        base=base,
        doubled=doubled,
        max_abs_shift=float(shift.max()),
        max_shift_in_se=max_in_se,
    )
