"""Exit criteria.  Run ``pytest tests/test_acceptance.py`` for a PASS/FAIL line per criterion."""

import itertools
import math
import time
from collections import Counter
from fractions import Fraction

import pytest

from misseat import distribution as dist_mod
from misseat.cli import main
from misseat.combinatorics import factorial, rising_factorial_coefficients, stirling1_unsigned
from misseat.distribution import (
    alternating_delta,
    distribution_full,
    lah_derangement_sum,
    lemma1_lhs,
    pmf_special,
    thread_coefficient,
)
from misseat.oracle import enumerate_process, group_by_sets, per_outcome_probability
from misseat.process import BoardingConfig, compare_empirical, monte_carlo

acceptance = pytest.mark.acceptance


@acceptance("1 theorem equivalence, 1 <= k <= n <= 30, exact")
def test_theorem_equivalence():
    start = time.perf_counter()
    configs = 0
    for n in range(1, 31):
        for k in range(1, n + 1):
            assert distribution_full(n, k, "theorem1").probs == distribution_full(n, k, "theorem2").probs, (n, k)
            configs += 1
    assert configs == 465
    assert time.perf_counter() - start < 120


@acceptance("2 oracle equivalence, 1 <= k <= n <= 8, exact")
def test_oracle_equivalence():
    start = time.perf_counter()
    for n in range(1, 9):
        for k in range(1, n + 1):
            assert enumerate_process(n, k).probs == distribution_full(n, k, "theorem1").probs, (n, k)
    assert time.perf_counter() - start < 60


@acceptance("3 normalization, P(1)=0, P(0)=(n-k)!/n!, n <= 100; < 5 s per (n,k) at n=100")
def test_normalization_and_structural_zeros():
    for n in range(1, 101):
        for k in range(1, n + 1):
            pmf = distribution_full(n, k)
            assert sum(pmf.probs) == 1, (n, k)
            assert pmf[1] == 0, (n, k)
            assert pmf[0] == Fraction(factorial(n - k), factorial(n)), (n, k)
    dist_mod._power_sum.cache_clear()
    for k in (1, 3, 34, 50, 67, 100):
        start = time.perf_counter()
        distribution_full(100, k)
        assert time.perf_counter() - start < 5, k


@acceptance("4 specializations k=1,2,3 equal the general formula, n <= 40, exact")
def test_specialization_fidelity():
    for n in range(3, 41):
        for k in (1, 2, 3):
            pmf = distribution_full(n, k)
            for m in range(n + 1):
                assert pmf_special(n, k, m) == pmf[m], (n, k, m)
        for m in range(2, n + 1):
            assert distribution_full(n, 1)[m] == Fraction(stirling1_unsigned(n, m), factorial(n))


@acceptance("5 identity suites: reciprocal sums n<=12, alternating delta K<=30, Lah/derangement s<=20, rising factorial N<=25")
def test_identity_suites():
    for n in range(1, 13):
        for k in range(1, n + 1):
            for m, s in itertools.product(range(n + 1), range(k + 1)):
                if 0 <= m - s <= n - k:
                    want = Fraction(stirling1_unsigned(n - k + 1, m - s + 1), factorial(n - k))
                    assert lemma1_lhs(n, k, m, s) == want, (n, k, m, s)
    for K in range(1, 31):
        for L in range(1, K + 1):
            assert alternating_delta(L, K) == ((-1) ** L if L == K else 0)
    for s in range(21):
        for t in range(s + 1):
            assert lah_derangement_sum(s, t, "lhs") == lah_derangement_sum(s, t, "rhs"), (s, t)
    for N in range(26):
        assert rising_factorial_coefficients(N) == [stirling1_unsigned(N, i) for i in range(N + 1)]


@acceptance("6 counting identity and per-atom probabilities, n <= 7, exact")
def test_counting_identity():
    for n in range(1, 8):
        for k in range(1, n + 1):
            groups = group_by_sets(n, k)
            covered = 0
            for s in range(k + 1):
                for e in range(n - k + 1):
                    for fc in itertools.combinations(range(1, k + 1), s):
                        for mc in itertools.combinations(range(k + 1, n + 1), e):
                            atoms = groups.get((frozenset(fc), frozenset(mc)), [])
                            assert len(atoms) == thread_coefficient(s, e), (n, k, fc, mc)
                            for atom in atoms:
                                assert atom.probability == per_outcome_probability(n, k, mc)
                            covered += len(atoms)
            assert covered == sum(len(a) for a in groups.values())


@acceptance("7 Monte Carlo n=100 k=3, 1e5 trials, every 0<p<1 within 4 SE, no m=1, < 30 s")
def test_monte_carlo_consistency():
    start = time.perf_counter()
    emp = monte_carlo(BoardingConfig(100, 3), 100_000, seed=1)
    elapsed = time.perf_counter() - start
    exact = distribution_full(100, 3)
    assert emp.counts[1] == 0
    for m, p in enumerate(exact.probs):
        if 0 < p < 1:
            pf = float(p)
            se = math.sqrt(pf * (1 - pf) / emp.trials)
            assert abs(emp.counts[m] / emp.trials - pf) <= 4 * se, m
    report = compare_empirical(emp, exact, 4.0)
    assert report.passed and not report.impossible
    assert elapsed < 30


@acceptance("8 plot n=100 k=1,2,3: columns sum to 1 within 1e-12, m=0 heights (n-k)!/n!")
def test_figure_reproduction(capsys):
    assert main(["plot", "--n", "100", "--k", "1,2,3"]) == 0
    out = capsys.readouterr().out
    rows = [line.split() for line in out.splitlines() if not line.startswith("#")]
    table = {int(r[0]): [float(x) for x in r[1:]] for r in rows}
    assert sorted(table) == list(range(101))
    for j, k in enumerate((1, 2, 3)):
        assert abs(math.fsum(table[m][j] for m in table) - 1) <= 1e-12
        assert table[0][j] == float(Fraction(factorial(100 - k), factorial(100)))
        assert table[1][j] == 0.0
    assert table[0] == [1 / 100, 1 / 9900, 1 / 970200]
