"""Exhaustive, exact enumeration of the boarding decision tree.

Ground truth for small planes.  Every branch weight is a product of
``1 / #free seats`` factors, so each path probability is ``w / n!`` for an
integer ``w`` and all bookkeeping is done in integers.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .combinatorics import factorial
from .distribution import ExactPmf

__all__ = [
    "DEFAULT_BOUND",
    "DEFAULT_ATOM_BOUND",
    "OutcomeAtom",
    "count_arrangements",
    "enumerate_outcomes",
    "enumerate_process",
    "misseated_sets",
    "per_outcome_probability",
]

DEFAULT_BOUND = 9
DEFAULT_ATOM_BOUND = 7


@dataclass(frozen=True)
class OutcomeAtom:
    """Final seating (``seating[p - 1]`` = seat of passenger ``p``) and its probability."""

    seating: tuple[int, ...]
    probability: Fraction


def _check(n: int, k: int, bound: int) -> None:
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    if n > bound:
        raise ValueError(f"n={n} exceeds the enumeration bound {bound}")


def _walk(n: int, k: int):
    """Yield (seating, weight) over all leaves; probability is weight / n!."""
    nfact = factorial(n)
    taken = [False] * (n + 1)
    seating = [0] * n

    def rec(p: int, weight: int):
        if p > n:
            yield tuple(seating), weight
            return
        if p > k and not taken[p]:
            choices = (p,)
        else:
            choices = [x for x in range(1, n + 1) if not taken[x]]
        w = weight // len(choices)
        for seat in choices:
            taken[seat] = True
            seating[p - 1] = seat
            yield from rec(p + 1, w)
            taken[seat] = False

    # n! is divisible by every product of distinct free-seat counts along a path
    yield from rec(1, nfact)


def enumerate_outcomes(n: int, k: int, bound: int = DEFAULT_BOUND) -> list[OutcomeAtom]:
    """Every reachable seating with its exact probability, in DFS order."""
    _check(n, k, bound)
    nfact = factorial(n)
    merged: dict[tuple[int, ...], int] = {}
    for seating, w in _walk(n, k):
        merged[seating] = merged.get(seating, 0) + w
    return [OutcomeAtom(seating, Fraction(w, nfact)) for seating, w in merged.items()]


def enumerate_process(n: int, k: int, bound: int = DEFAULT_BOUND) -> ExactPmf:
    """Exact pmf of the misseated count by summing over all decision paths."""
    _check(n, k, bound)
    nfact = factorial(n)
    scaled = [0] * (n + 1)
    for seating, w in _walk(n, k):
        m = sum(1 for p in range(n) if seating[p] != p + 1)
        scaled[m] += w
    if sum(scaled) != nfact:
        raise AssertionError(f"enumeration lost mass: {sum(scaled)} / {nfact}")
    return ExactPmf(n, k, tuple(Fraction(x, nfact) for x in scaled), method="oracle")


def misseated_sets(seating: tuple[int, ...], k: int) -> tuple[frozenset[int], frozenset[int]]:
    wrong = [p for p in range(1, len(seating) + 1) if seating[p - 1] != p]
    return frozenset(p for p in wrong if p <= k), frozenset(p for p in wrong if p > k)


def per_outcome_probability(n: int, k: int, misseated_mc: Iterable[int]) -> Fraction:
    """(n-k)!/n! times prod 1/(n - i + 1) over the misseated regular passengers."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    prob = Fraction(factorial(n - k), factorial(n))
    for i in sorted(set(misseated_mc)):
        if not k < i <= n:
            raise ValueError(f"passenger {i} is not a regular passenger for n={n}, k={k}")
        prob /= n - i + 1
    return prob


def count_arrangements(
    n: int,
    k: int,
    misseated_fc: Iterable[int],
    misseated_mc: Iterable[int],
    bound: int = DEFAULT_ATOM_BOUND,
) -> int:
    """Number of reachable seatings whose misseated sets are exactly the ones given."""
    _check(n, k, bound)
    fc, mc = frozenset(misseated_fc), frozenset(misseated_mc)
    if any(not 1 <= p <= k for p in fc) or any(not k < p <= n for p in mc):
        raise ValueError(f"misseated sets out of range for n={n}, k={k}")
    return sum(1 for atom in enumerate_outcomes(n, k, bound) if misseated_sets(atom.seating, k) == (fc, mc))


def group_by_sets(n: int, k: int, bound: int = DEFAULT_ATOM_BOUND) -> dict:
    """Map (misseated_fc, misseated_mc) to the list of atoms realizing it."""
    groups = defaultdict(list)
    for atom in enumerate_outcomes(n, k, bound):
        groups[misseated_sets(atom.seating, k)].append(atom)
    return dict(groups)
