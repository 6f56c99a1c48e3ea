"""Simulation of the boarding process and the thread view of its outcomes.

Passengers board in order ``1..n``; passenger ``p`` owns seat ``p``.
Passengers ``1..k`` are absent-minded and pick a uniformly random free
seat.  Everyone else sits in their own seat if it is free and otherwise
picks a uniformly random free seat.

Randomness: trial ``i`` under seed ``s`` draws from a Philox4x64
generator keyed with the 128-bit value ``s | (i << 64)``.  Each random
choice is ``Generator.integers(len(free))`` indexing the ascending list
of free seats.  Trials are therefore independent of one another and of
how a run is split across workers.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .distribution import ExactPmf

__all__ = [
    "BoardingConfig",
    "BoardingOutcome",
    "Comparison",
    "EmpiricalPmf",
    "MalformedOutcome",
    "ThreadStats",
    "TraceStep",
    "board",
    "compare_empirical",
    "decompose_threads",
    "monte_carlo",
    "trial_rng",
]

SEED_BITS = 64


class MalformedOutcome(ValueError):
    pass


@dataclass(frozen=True)
class BoardingConfig:
    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise ValueError(f"k must satisfy 0 <= k <= n, got n={self.n}, k={self.k}")


class TraceStep(NamedTuple):
    passenger: int
    free_seats: tuple[int, ...]
    seat: int
    random: bool


@dataclass(frozen=True)
class BoardingOutcome:
    """A completed seating.

    ``seating[p - 1]`` is the seat taken by passenger ``p``.
    """

    n: int
    k: int
    seating: tuple[int, ...]
    misseated_fc: tuple[int, ...]
    misseated_mc: tuple[int, ...]
    trace: tuple[TraceStep, ...] | None = None

    @classmethod
    def from_seating(cls, seating, k: int, trace=None) -> BoardingOutcome:
        seating = tuple(int(x) for x in seating)
        n = len(seating)
        if sorted(seating) != list(range(1, n + 1)):
            raise MalformedOutcome(f"seating {seating} is not a permutation of 1..{n}")
        if not 0 <= k <= n:
            raise MalformedOutcome(f"k={k} out of range for n={n}")
        wrong = [p for p in range(1, n + 1) if seating[p - 1] != p]
        return cls(
            n=n,
            k=k,
            seating=seating,
            misseated_fc=tuple(p for p in wrong if p <= k),
            misseated_mc=tuple(p for p in wrong if p > k),
            trace=None if trace is None else tuple(trace),
        )

    @property
    def m(self) -> int:
        return len(self.misseated_fc) + len(self.misseated_mc)

    @property
    def s(self) -> int:
        return len(self.misseated_fc)

    def seat_of(self, passenger: int) -> int:
        return self.seating[passenger - 1]


@dataclass(frozen=True)
class ThreadStats:
    s: int
    r: int
    t: int
    threads: tuple[tuple[int, ...], ...]
    derangement_cycles: tuple[tuple[int, ...], ...]


def _check_seed(seed: int, trial_index: int) -> None:
    if not 0 <= seed < 1 << SEED_BITS:
        raise ValueError(f"seed must be a 64-bit unsigned value, got {seed}")
    if not 0 <= trial_index < 1 << 64:
        raise ValueError(f"trial_index out of range: {trial_index}")


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """The generator used for trial ``trial_index`` of a run seeded with ``seed``."""
    _check_seed(seed, trial_index)
    return np.random.Generator(np.random.Philox(key=seed | (trial_index << 64)))


def _seat_passengers(n: int, k: int, rng: np.random.Generator, trace: list | None):
    taken = [False] * (n + 1)
    seating = [0] * n
    for p in range(1, n + 1):
        if p > k and not taken[p]:
            seat = p
            if trace is not None:
                free = tuple(x for x in range(1, n + 1) if not taken[x])
                trace.append(TraceStep(p, free, seat, False))
        else:
            free = [x for x in range(1, n + 1) if not taken[x]]
            seat = free[int(rng.integers(len(free)))]
            if trace is not None:
                trace.append(TraceStep(p, tuple(free), seat, True))
        taken[seat] = True
        seating[p - 1] = seat
    return seating


def board(config: BoardingConfig, seed: int, trial_index: int = 0, trace: bool = False) -> BoardingOutcome:
    """Run one boarding; a pure function of ``(config, seed, trial_index)``."""
    rng = trial_rng(seed, trial_index)
    steps = [] if trace else None
    seating = _seat_passengers(config.n, config.k, rng, steps)
    return BoardingOutcome.from_seating(seating, config.k, steps)


def decompose_threads(outcome: BoardingOutcome) -> ThreadStats:
    """Split the misseating of ``outcome`` into threads and derangement cycles.

    Follow each misseated passenger to the owner of the seat they took.
    Cycles made only of absent-minded passengers are derangement cycles.
    Any other cycle is cut after each maximal run of regular passengers,
    so every piece is a run of absent-minded passengers followed by a run
    of regular passengers.
    """
    n, k = outcome.n, outcome.k
    seating = outcome.seating
    if len(seating) != n or sorted(seating) != list(range(1, n + 1)):
        raise MalformedOutcome(f"seating {seating} is not a permutation of 1..{n}")

    seen = set()
    threads = []
    cycles = []
    for start in range(1, n + 1):
        if start in seen or seating[start - 1] == start:
            continue
        cycle = []
        p = start
        while p not in seen:
            seen.add(p)
            cycle.append(p)
            p = seating[p - 1]
        if all(q <= k for q in cycle):
            cycles.append(tuple(cycle))
            continue
        # rotate so the cycle opens on an absent-minded passenger right after a regular one
        L = len(cycle)
        cut = next(i for i in range(L) if cycle[i] <= k and cycle[i - 1] > k)
        cycle = cycle[cut:] + cycle[:cut]
        current = [cycle[0]]
        for prev, q in zip(cycle, cycle[1:]):
            if q <= k < prev:
                threads.append(tuple(current))
                current = []
            current.append(q)
        threads.append(tuple(current))

    s = outcome.s
    r = sum(1 for th in threads for q in th if q <= k)
    return ThreadStats(s=s, r=r, t=len(threads), threads=tuple(threads), derangement_cycles=tuple(cycles))


@dataclass(frozen=True)
class EmpiricalPmf:
    config: BoardingConfig
    trials: int
    counts: tuple[int, ...]
    seed: int
    thread_tallies: dict[tuple[int, int, int], int] | None = field(default=None, compare=False)

    def frequencies(self) -> list[Fraction]:
        return [Fraction(c, self.trials) for c in self.counts]


def _run_range(n: int, k: int, seed: int, start: int, stop: int, collect_threads: bool):
    counts = [0] * (n + 1)
    tallies = Counter() if collect_threads else None
    for i in range(start, stop):
        seating = _seat_passengers(n, k, trial_rng(seed, i), None)
        m = sum(1 for p in range(n) if seating[p] != p + 1)
        counts[m] += 1
        if collect_threads:
            st = decompose_threads(BoardingOutcome.from_seating(seating, k))
            tallies[st.s, st.r, st.t] += 1
    return counts, tallies


def monte_carlo(
    config: BoardingConfig,
    trials: int,
    seed: int,
    workers: int = 1,
    collect_threads: bool = False,
) -> EmpiricalPmf:
    """Tally the misseated count over trials ``0..trials-1``.

    With ``workers > 1`` the trial range is split into contiguous chunks
    run in separate processes; the tallies are identical to a serial run.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    _check_seed(seed, trials - 1)
    n, k = config.n, config.k
    if workers <= 1:
        parts = [_run_range(n, k, seed, 0, trials, collect_threads)]
    else:
        step = math.ceil(trials / workers)
        bounds = [(a, min(a + step, trials)) for a in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_range, n, k, seed, a, b, collect_threads) for a, b in bounds]
            parts = [f.result() for f in futures]

    counts = [0] * (n + 1)
    tallies = Counter() if collect_threads else None
    for part_counts, part_tallies in parts:
        for m, c in enumerate(part_counts):
            counts[m] += c
        if collect_threads:
            tallies.update(part_tallies)
    return EmpiricalPmf(
        config=config,
        trials=trials,
        counts=tuple(counts),
        seed=seed,
        thread_tallies=dict(sorted(tallies.items())) if collect_threads else None,
    )


@dataclass(frozen=True)
class Comparison:
    z_scores: tuple[float | None, ...]
    max_abs_z: float
    impossible: tuple[int, ...]
    threshold: float
    passed: bool


def compare_empirical(emp: EmpiricalPmf, exact: ExactPmf, threshold: float = 4.0) -> Comparison:
    """Binomial z-score of each observed frequency against its exact mass.

    ``z = (freq - p) * sqrt(trials) / sqrt(p (1 - p))`` for ``0 < p < 1``;
    entries with ``p`` in {0, 1} get ``None`` and are instead flagged in
    ``impossible`` when the sample contradicts them.
    """
    if (emp.config.n, emp.config.k) != (exact.n, exact.k) or len(emp.counts) != len(exact.probs):
        raise ValueError(
            f"empirical (n={emp.config.n}, k={emp.config.k}) does not match exact (n={exact.n}, k={exact.k})"
        )
    z_scores = []
    impossible = []
    for m, (count, p) in enumerate(zip(emp.counts, exact.probs)):
        if p == 0 or p == 1:
            z_scores.append(None)
            if count != p * emp.trials:
                impossible.append(m)
            continue
        freq = count / emp.trials
        pf = float(p)
        z_scores.append((freq - pf) * math.sqrt(emp.trials) / math.sqrt(pf * (1 - pf)))
    max_abs = max((abs(z) for z in z_scores if z is not None), default=0.0)
    return Comparison(
        z_scores=tuple(z_scores),
        max_abs_z=max_abs,
        impossible=tuple(impossible),
        threshold=threshold,
        passed=not impossible and max_abs <= threshold,
    )
