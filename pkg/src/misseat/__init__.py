"""Exact distribution of misseated passengers when absent-minded passengers board first."""

__version__ = "0.1.0"

from .combinatorics import (
    CombinatoricsTables,
    binomial,
    derangements,
    factorial,
    lah,
    rising_factorial_coefficients,
    stirling1_unsigned,
    stirling2,
)
from .distribution import (
    ConsistencyError,
    ExactPmf,
    MomentSummary,
    distribution_full,
    moments,
    pmf_special,
    pmf_theorem1,
    pmf_theorem2,
)
from .process import (
    BoardingConfig,
    BoardingOutcome,
    EmpiricalPmf,
    ThreadStats,
    board,
    compare_empirical,
    decompose_threads,
    monte_carlo,
)
from .oracle import (
    OutcomeAtom,
    count_arrangements,
    enumerate_outcomes,
    enumerate_process,
    per_outcome_probability,
)
