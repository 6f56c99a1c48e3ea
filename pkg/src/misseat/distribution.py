"""Exact distribution of the number of misseated passengers.

``P(n, k, m)`` is the probability that exactly ``m`` of ``n`` passengers end
up out of their assigned seat when passengers ``1..k`` pick a uniformly
random free seat and everyone else takes their own seat if free, or a
uniformly random free seat otherwise.

Two closed forms are provided.  The *thread* form sums over how the
misseating decomposes into chains started by absent-minded passengers;
the *simplified* form collapses the inner sums to a single alternating
power sum.  Both are evaluated in integers scaled by ``n!`` and only
turned into ``Fraction`` at the end.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .combinatorics import (
    binomial,
    derangements,
    factorial,
    lah,
    stirling1_unsigned,
    stirling2,
)

__all__ = [
    "ConsistencyError",
    "ExactPmf",
    "MomentSummary",
    "METHODS",
    "alternating_delta",
    "distribution_full",
    "lah_derangement_sum",
    "lemma1_lhs",
    "moments",
    "pmf_special",
    "pmf_theorem1",
    "pmf_theorem2",
    "thread_coefficient",
]

METHODS = ("theorem1", "theorem2")


class ConsistencyError(RuntimeError):
    """An exact distribution failed one of its structural invariants."""


@dataclass(frozen=True)
class ExactPmf:
    """Dense exact pmf of the misseated count, ``probs[m]`` for ``m = 0..n``."""

    n: int
    k: int
    probs: tuple[Fraction, ...]
    method: str = "theorem1"

    def __getitem__(self, m: int) -> Fraction:
        return self.probs[m]

    def __len__(self) -> int:
        return len(self.probs)

    def as_dict(self, drop_zeros: bool = False) -> dict[int, Fraction]:
        return {m: p for m, p in enumerate(self.probs) if p or not drop_zeros}

    def check(self) -> None:
        """Raise ConsistencyError unless every pmf invariant holds."""
        if len(self.probs) != self.n + 1:
            raise ConsistencyError(f"pmf has {len(self.probs)} entries, want {self.n + 1}")
        if sum(self.probs) != 1:
            raise ConsistencyError(f"pmf for n={self.n}, k={self.k} sums to {sum(self.probs)}")
        bad = [m for m, p in enumerate(self.probs) if p < 0]
        if bad:
            raise ConsistencyError(f"negative mass at m={bad}")
        if self.n >= 1 and self.probs[1] != 0:
            raise ConsistencyError(f"P(1) = {self.probs[1]}, must be 0")
        base = Fraction(factorial(self.n - self.k), factorial(self.n))
        if self.probs[0] != base:
            raise ConsistencyError(f"P(0) = {self.probs[0]}, want {base}")


@dataclass(frozen=True)
class MomentSummary:
    mean: Fraction
    variance: Fraction


def _check_domain(n: int, k: int, allow_zero: bool = False) -> None:
    lo = 0 if allow_zero else 1
    if n < 1:
        raise ValueError(f"n must be positive, got n={n}")
    if not lo <= k <= n:
        raise ValueError(f"k must satisfy {lo} <= k <= n, got n={n}, k={k}")


# -- simplified closed form ------------------------------------------------


@lru_cache(maxsize=None)
def _power_sum(s: int, e: int) -> int:
    """s! * sum_{l=1..s} (-1)^(s-l) l^e / (s-l)!, an integer since s!/(s-l)! is."""
    total = 0
    falling = 1  # s! / (s-l)!
    for ell in range(1, s + 1):
        falling *= s - ell + 1
        term = falling * ell**e
        total += -term if (s - ell) % 2 else term
    return total


def _theorem1_scaled(n: int, k: int, m: int) -> int:
    """n! * P(n, k, m) via the simplified form."""
    if m < 0 or m > n:
        return 0
    rows = n - k + 1
    total = binomial(k, m) * factorial(n - k)
    if m % 2:
        total = -total
    # stirling1(rows, m-s+1) vanishes unless 1 <= m-s+1 <= rows, so the
    # exponent m-s is never negative in a surviving term
    for s in range(max(1, m - rows + 1), min(k, m) + 1):
        c1 = stirling1_unsigned(rows, m - s + 1)
        if c1:
            total += c1 * binomial(k, s) * _power_sum(s, m - s)
    return total


def pmf_theorem1(n: int, k: int, m: int) -> Fraction:
    """P(n, k, m) from the simplified single-sum formula.

    Returns 0 for ``m`` outside ``0..n``.

    >>> pmf_theorem1(7, 3, 0)
    Fraction(1, 210)
    """
    _check_domain(n, k)
    return Fraction(_theorem1_scaled(n, k, m), factorial(n))


# -- thread form -----------------------------------------------------------


@lru_cache(maxsize=None)
def _lah_derangement_lhs(s: int, t: int) -> int:
    return sum(binomial(s, r) * lah(r, t) * derangements(s - r) for r in range(t, s + 1))


def thread_coefficient(s: int, e: int, r: int | None = None, t: int | None = None) -> int:
    """Number of seatings with a fixed set of ``s`` misseated absent-minded
    passengers and a fixed set of ``e`` misseated regular passengers.

    Sum over thread count ``t`` and thread-member count ``r`` of
    ``C(s,r) L(r,t) (t!)^2 S2(e,t) d(s-r)``.  Passing ``r`` and/or ``t``
    restricts the sum to that cell.
    """
    if s < 0 or e < 0:
        return 0
    total = 0
    for tt in range(0, s + 1) if t is None else (t,):
        c2 = stirling2(e, tt)
        if not c2:
            continue
        ft = factorial(tt)
        for rr in range(tt, s + 1) if r is None else (r,):
            total += binomial(s, rr) * lah(rr, tt) * ft * ft * c2 * derangements(s - rr)
    return total


@lru_cache(maxsize=None)
def _thread_coefficient_cached(s: int, e: int) -> int:
    total = 0
    for t in range(0, s + 1):
        c2 = stirling2(e, t)
        if c2:
            ft = factorial(t)
            total += ft * ft * c2 * _lah_derangement_lhs(s, t)
    return total


def _theorem2_scaled(n: int, k: int, m: int) -> int:
    if m < 0 or m > n:
        return 0
    rows = n - k + 1
    total = 0
    for s in range(0, k + 1):
        c1 = stirling1_unsigned(rows, m - s + 1)
        if c1:
            total += binomial(k, s) * c1 * _thread_coefficient_cached(s, m - s)
    return total


def pmf_theorem2(n: int, k: int, m: int) -> Fraction:
    """P(n, k, m) from the thread-decomposition formula."""
    _check_domain(n, k)
    return Fraction(_theorem2_scaled(n, k, m), factorial(n))


# -- full distributions ----------------------------------------------------


def distribution_full(n: int, k: int, method: str = "theorem1") -> ExactPmf:
    """Dense pmf over ``m = 0..n``.

    ``k = 0`` gives the point mass at 0.  Raises ConsistencyError if the
    result is not a valid pmf, which would indicate a bug.
    """
    _check_domain(n, k, allow_zero=True)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    if k == 0:
        pmf = ExactPmf(n, k, (Fraction(1),) + (Fraction(0),) * n, method)
        pmf.check()
        return pmf
    kernel = _theorem1_scaled if method == "theorem1" else _theorem2_scaled
    nfact = factorial(n)
    scaled = [kernel(n, k, m) for m in range(n + 1)]
    if sum(scaled) != nfact:
        raise ConsistencyError(
            f"{method} masses for n={n}, k={k} sum to {Fraction(sum(scaled), nfact)}"
        )
    pmf = ExactPmf(n, k, tuple(Fraction(x, nfact) for x in scaled), method)
    pmf.check()
    return pmf


def pmf_special(n: int, k: int, m: int) -> Fraction:
    """Hand-specialized formulas for one, two or three absent-minded passengers.

    The ``k = 1`` formula ``stirling1(n, m) / n!`` only covers ``m >= 2``;
    smaller ``m`` go through the general formula.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"specialized formulas exist only for k in 1..3, got {k}")
    if n < 3:
        raise ValueError(f"specialized formulas need n >= 3, got {n}")
    if m < 0 or m > n:
        return Fraction(0)
    nfact = factorial(n)
    c1 = stirling1_unsigned
    if k == 1:
        if m < 2:
            return pmf_theorem1(n, k, m)
        return Fraction(c1(n, m), nfact)

    # 2^(m-1), 3^(m-2), ... appear only next to stirling factors that are
    # zero whenever the exponent would be negative
    def pw(base: int, exp: int) -> Fraction:
        return Fraction(base) ** exp

    sign = -1 if m % 2 else 1
    if k == 2:
        head = Fraction(sign * binomial(2, m), n * (n - 1))
        tail = 2 * c1(n - 1, m)
        if c1(n - 1, m - 1):
            tail += (pw(2, m - 1) - 2) * c1(n - 1, m - 1)
        return head + Fraction(tail) / nfact
    head = Fraction(sign * binomial(3, m), n * (n - 1) * (n - 2))
    tail = Fraction(3 * c1(n - 2, m))
    if c1(n - 2, m - 1):
        tail += 3 * (pw(2, m - 1) - 2) * c1(n - 2, m - 1)
    if c1(n - 2, m - 2):
        tail += (2 * pw(3, m - 2) - 3 * pw(2, m - 2) + 3) * c1(n - 2, m - 2)
    return head + tail / nfact


def moments(pmf: ExactPmf) -> MomentSummary:
    mean = sum((m * p for m, p in enumerate(pmf.probs)), Fraction(0))
    second = sum((m * m * p for m, p in enumerate(pmf.probs)), Fraction(0))
    return MomentSummary(mean, second - mean * mean)


# -- identities behind the simplification ---------------------------------


def lemma1_lhs(n: int, k: int, m: int, s: int) -> Fraction:
    """Sum over ``k < i_1 < ... < i_{m-s} <= n`` of prod 1/(n - i_j + 1).

    Direct enumeration; the empty sequence contributes 1.
    """
    _check_domain(n, k)
    size = m - s
    if size < 0:
        raise ValueError(f"m - s must be nonnegative, got {size}")
    if size > n - k:
        raise ValueError(f"m - s = {size} exceeds the {n - k} regular passengers")
    total = Fraction(0)
    for seq in itertools.combinations(range(k + 1, n + 1), size):
        den = 1
        for i in seq:
            den *= n - i + 1
        total += Fraction(1, den)
    return total


def lah_derangement_sum(s: int, t: int, form: str = "lhs") -> Fraction:
    """Both sides of the Lah/derangement collapse.

    ``lhs``: sum_{r=t..s} C(s,r) L(r,t) d(s-r).
    ``rhs``: (s!/t!) sum_{j=0..s-t} (-1)^j / j! * C(s-j, t).
    """
    if not 0 <= t <= s:
        raise ValueError(f"need 0 <= t <= s, got s={s}, t={t}")
    if form == "lhs":
        return Fraction(_lah_derangement_lhs(s, t))
    if form == "rhs":
        inner = sum(
            (Fraction((-1) ** j, factorial(j)) * binomial(s - j, t) for j in range(s - t + 1)),
            Fraction(0),
        )
        return Fraction(factorial(s), factorial(t)) * inner
    raise ValueError(f"form must be 'lhs' or 'rhs', got {form!r}")


def alternating_delta(L: int, K: int) -> int:
    """sum_{J=L..K} (-1)^J C(K-L, J-L); equals (-1)^L if L == K, else 0."""
    if L > K:
        raise ValueError(f"need L <= K, got L={L}, K={K}")
    return sum((-1) ** J * binomial(K - L, J - L) for J in range(L, K + 1))

