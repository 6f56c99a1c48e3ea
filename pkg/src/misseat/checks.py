"""Verification suites behind ``misseat check``.

Each suite returns ``(ok, detail)``; ``detail`` names the first failing
case or summarizes how many cases were covered.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable

from .combinatorics import (
    binomial,
    derangements,
    factorial,
    lah,
    rising_factorial_coefficients,
    stirling1_unsigned,
)
from .distribution import (
    alternating_delta,
    distribution_full,
    lah_derangement_sum,
    lemma1_lhs,
    pmf_special,
    thread_coefficient,
)
from .oracle import DEFAULT_ATOM_BOUND, DEFAULT_BOUND, enumerate_process, group_by_sets, per_outcome_probability
from .process import BoardingOutcome, decompose_threads

Suite = Callable[[int], "tuple[bool, str]"]


def stirling_rows(max_n: int):
    for n in range(0, 26):
        if sum(stirling1_unsigned(n, j) for j in range(n + 1)) != factorial(n):
            return False, f"stirling1 row {n} does not sum to {n}!"
        if rising_factorial_coefficients(n) != [stirling1_unsigned(n, j) for j in range(n + 1)]:
            return False, f"rising factorial of degree {n} differs from stirling1 row"
    return True, "rows 0..25"


def lah_closed_form(max_n: int):
    for i in range(1, 21):
        for j in range(1, i + 1):
            closed = binomial(i - 1, j - 1) * factorial(i) // factorial(j)
            if lah(i, j) != closed:
                return False, f"L({i},{j}) = {lah(i, j)}, closed form {closed}"
    return True, "1 <= j <= i <= 20"


def derangement_closed_form(max_n: int):
    for i in range(21):
        closed = factorial(i) * sum(Fraction((-1) ** j, factorial(j)) for j in range(i + 1))
        if derangements(i) != closed:
            return False, f"d({i}) = {derangements(i)}, alternating sum {closed}"
    return True, "0 <= i <= 20"


def trinomial_revision(max_n: int):
    for w in range(16):
        for t in range(w + 1):
            for ell in range(t + 1):
                if binomial(w, t) * binomial(t, ell) != binomial(w, ell) * binomial(w - ell, t - ell):
                    return False, f"w={w}, t={t}, l={ell}"
    return True, "0 <= l <= t <= w <= 15"


def reciprocal_sums(max_n: int):
    count = 0
    for n in range(1, min(max_n, 12) + 1):
        for k in range(1, n + 1):
            for size in range(0, n - k + 1):
                want = Fraction(stirling1_unsigned(n - k + 1, size + 1), factorial(n - k))
                if lemma1_lhs(n, k, size, 0) != want:
                    return False, f"n={n}, k={k}, m-s={size}"
                count += 1
    return True, f"{count} cases"


def alternating_binomials(max_n: int):
    for K in range(1, 31):
        for L in range(1, K + 1):
            want = (-1) ** L if L == K else 0
            if alternating_delta(L, K) != want:
                return False, f"L={L}, K={K}"
    return True, "1 <= L <= K <= 30"


def lah_derangement_collapse(max_n: int):
    for s in range(21):
        for t in range(s + 1):
            if lah_derangement_sum(s, t, "lhs") != lah_derangement_sum(s, t, "rhs"):
                return False, f"s={s}, t={t}"
    return True, "0 <= t <= s <= 20"


def theorem_equivalence(max_n: int):
    count = 0
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            if distribution_full(n, k, "theorem1").probs != distribution_full(n, k, "theorem2").probs:
                return False, f"n={n}, k={k}"
            count += 1
    return True, f"{count} configurations"


def normalization(max_n: int):
    for n in range(1, max_n + 1):
        for k in range(1, n + 1):
            pmf = distribution_full(n, k)
            if sum(pmf.probs) != 1 or pmf[1] != 0 or pmf[0] != Fraction(factorial(n - k), factorial(n)):
                return False, f"n={n}, k={k}"
    return True, f"n <= {max_n}"


def specializations(max_n: int):
    for n in range(3, max_n + 1):
        for k in (1, 2, 3):
            pmf = distribution_full(n, k)
            for m in range(n + 1):
                if pmf_special(n, k, m) != pmf[m]:
                    return False, f"n={n}, k={k}, m={m}"
        for m in range(2, n + 1):
            if distribution_full(n, 1)[m] != Fraction(stirling1_unsigned(n, m), factorial(n)):
                return False, f"k=1 tail n={n}, m={m}"
    return True, f"3 <= n <= {max_n}"


def oracle_equivalence(max_n: int):
    top = min(max_n, DEFAULT_BOUND - 1)
    for n in range(1, top + 1):
        for k in range(1, n + 1):
            if enumerate_process(n, k).probs != distribution_full(n, k).probs:
                return False, f"n={n}, k={k}"
    return True, f"n <= {top}"


def counting_identity(max_n: int):
    top = min(max_n, DEFAULT_ATOM_BOUND)
    groups_seen = 0
    for n in range(1, top + 1):
        for k in range(1, n + 1):
            for (fc, mc), atoms in group_by_sets(n, k).items():
                s, e = len(fc), len(mc)
                if len(atoms) != thread_coefficient(s, e):
                    return False, f"n={n}, k={k}, fc={sorted(fc)}, mc={sorted(mc)}"
                want = per_outcome_probability(n, k, mc)
                if any(a.probability != want for a in atoms):
                    return False, f"atom probability n={n}, k={k}, mc={sorted(mc)}"
                cells: dict[tuple[int, int], int] = {}
                for a in atoms:
                    st = decompose_threads(BoardingOutcome.from_seating(a.seating, k))
                    cells[st.r, st.t] = cells.get((st.r, st.t), 0) + 1
                for r, t in itertools.product(range(s + 1), repeat=2):
                    if cells.get((r, t), 0) != thread_coefficient(s, e, r, t):
                        return False, f"(r,t)=({r},{t}) n={n}, k={k}, fc={sorted(fc)}, mc={sorted(mc)}"
                groups_seen += 1
    return True, f"{groups_seen} misseated-set groups, n <= {top}"


SUITES: dict[str, Suite] = {
    "stirling-rows": stirling_rows,
    "lah-closed-form": lah_closed_form,
    "derangement-closed-form": derangement_closed_form,
    "trinomial-revision": trinomial_revision,
    "reciprocal-sum-enumeration": reciprocal_sums,
    "alternating-binomial-delta": alternating_binomials,
    "lah-derangement-collapse": lah_derangement_collapse,
    "theorem-equivalence": theorem_equivalence,
    "normalization": normalization,
    "specializations": specializations,
    "oracle-equivalence": oracle_equivalence,
    "counting-identity": counting_identity,
}


def run_all(max_n: int) -> list[tuple[str, bool, str]]:
    return [(name, *suite(max_n)) for name, suite in SUITES.items()]
