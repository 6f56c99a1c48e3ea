"""Arbitrary-precision combinatorial numbers.

Every kernel accepts any integer arguments and answers 0 outside its
natural domain, so formula evaluation can pass indices such as
``m - s + 1 <= 0`` straight through.  Conventions:

* ``stirling1(0, 0) = 1``, ``stirling1(p, 0) = 0`` and ``stirling1(p, -q) = 0``
  for positive ``p, q``.
* ``stirling2(0, 0) = 1``, ``stirling2(0, q) = 0``, ``stirling2(-p, q) = 0``,
  ``stirling2(-p, 0) = 0``.
* ``lah(0, 0) = 1`` so that the ``t = 0`` term of the thread sum reduces
  to a plain derangement count.

Triangles are built by recurrence and grown on demand.  Rows already
materialized are never rewritten.
"""

from __future__ import annotations

import math
import threading

__all__ = [
    "CombinatoricsTables",
    "binomial",
    "derangements",
    "factorial",
    "lah",
    "rising_factorial_coefficients",
    "stirling1_unsigned",
    "stirling2",
    "tables",
]


class CombinatoricsTables:
    """Lazily extended triangles of Stirling and Lah numbers.

    Rows ``0..limit`` of each triangle are stored as lists of Python ints.
    Growth happens under a lock and the new rows are published in one
    assignment, so concurrent readers only ever see completed rows.
    """

    def __init__(self, limit: int = 0):
        self._lock = threading.Lock()
        self.limit = -1
        self.stirling1_rows: list[list[int]] = []
        self.stirling2_rows: list[list[int]] = []
        self.lah_rows: list[list[int]] = []
        self.factorials: list[int] = []
        self.derangements: list[int] = []
        self.ensure(limit)

    def ensure(self, limit: int) -> None:
        """Materialize all rows up to and including ``limit``."""
        if limit <= self.limit:
            return
        with self._lock:
            if limit <= self.limit:
                return
            c1 = list(self.stirling1_rows)
            c2 = list(self.stirling2_rows)
            la = list(self.lah_rows)
            fact = list(self.factorials)
            der = list(self.derangements)
            for n in range(self.limit + 1, limit + 1):
                if n == 0:
                    c1.append([1])
                    c2.append([1])
                    la.append([1])
                    fact.append(1)
                    der.append(1)
                    continue
                p1, p2, pl = c1[n - 1], c2[n - 1], la[n - 1]
                r1 = [0] * (n + 1)
                r2 = [0] * (n + 1)
                rl = [0] * (n + 1)
                for j in range(1, n + 1):
                    below1 = p1[j] if j < n else 0
                    below2 = p2[j] if j < n else 0
                    belowl = pl[j] if j < n else 0
                    # c(n, j) = (n-1) c(n-1, j) + c(n-1, j-1)
                    r1[j] = (n - 1) * below1 + p1[j - 1]
                    # S(n, j) = j S(n-1, j) + S(n-1, j-1)
                    r2[j] = j * below2 + p2[j - 1]
                    # L(n, j) = (n-1+j) L(n-1, j) + L(n-1, j-1)
                    rl[j] = (n - 1 + j) * belowl + pl[j - 1]
                c1.append(r1)
                c2.append(r2)
                la.append(rl)
                fact.append(fact[-1] * n)
                der.append(0 if n == 1 else (n - 1) * (der[-1] + der[-2]))
            self.stirling1_rows, self.stirling2_rows, self.lah_rows = c1, c2, la
            self.factorials, self.derangements = fact, der
            self.limit = limit

    def _row(self, triangle: str, i: int) -> list[int]:
        if i > self.limit:
            self.ensure(i)
        return getattr(self, triangle)[i]

    def stirling1_unsigned(self, i: int, j: int) -> int:
        if i < 0 or j < 0 or j > i:
            return 0
        return self._row("stirling1_rows", i)[j]

    def stirling2(self, i: int, j: int) -> int:
        # Negative second argument is not covered by the usual conventions;
        # treated as 0 by analogy with stirling1(p, -q).
        if i < 0 or j < 0 or j > i:
            return 0
        return self._row("stirling2_rows", i)[j]

    def lah(self, i: int, j: int) -> int:
        if i < 0 or j < 0 or j > i:
            return 0
        return self._row("lah_rows", i)[j]

    def factorial(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"factorial of negative number {n}")
        if n > self.limit:
            self.ensure(n)
        return self.factorials[n]

    def derangement(self, n: int) -> int:
        if n < 0:
            raise ValueError(f"derangement count of negative size {n}")
        if n > self.limit:
            self.ensure(n)
        return self.derangements[n]


tables = CombinatoricsTables(32)


def factorial(n: int) -> int:
    """Return ``n!`` exactly."""
    return tables.factorial(n)


def binomial(n: int, m: int) -> int:
    """Return C(n, m), or 0 when ``m < 0`` or ``m > n``."""
    if m < 0 or n < 0 or m > n:
        return 0
    return math.comb(n, m)


def stirling1_unsigned(i: int, j: int) -> int:
    """Number of permutations of ``i`` elements with exactly ``j`` cycles."""
    return tables.stirling1_unsigned(i, j)


def stirling2(i: int, j: int) -> int:
    """Number of partitions of ``i`` labeled items into ``j`` nonempty blocks."""
    return tables.stirling2(i, j)


def lah(i: int, j: int) -> int:
    """Number of partitions of ``i`` items into ``j`` nonempty ordered blocks."""
    return tables.lah(i, j)


def derangements(i: int) -> int:
    """Number of fixed-point-free permutations of ``i`` elements."""
    return tables.derangement(i)


def rising_factorial_coefficients(N: int) -> list[int]:
    """Coefficients of ``x (x+1) ... (x+N-1)`` by ascending power of ``x``.

    Expanded by direct polynomial multiplication, independently of the
    Stirling table, so the two can check each other.

    >>> rising_factorial_coefficients(3)
    [0, 2, 3, 1]
    """
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    coeffs = [1]
    for a in range(N):
        # multiply by (x + a)
        nxt = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += a * c
            nxt[i + 1] += c
        coeffs = nxt
    return coeffs
