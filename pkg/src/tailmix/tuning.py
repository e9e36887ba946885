"""Cut-count rule for the intermediate order statistics and tail-rate advisories.

The default rule sets ``iota = kappa = floor(C * (n ln ln n) ** 0.6)`` (at least 1).
With ``C = 0.5`` this puts the left cut at roughly the 5.9% quantile of a
subsample of 500 and the 2.6% quantile of a subsample of 5,000.

Log-concave tails, ``-ln(1 - G(y)) ~ (y / s_G) ** a_G`` and likewise for H,
satisfy the bias condition whenever the cut fractions vanish, provided
``a_G < a_H`` (or ``a_G == a_H`` with ``s_G > s_H``) on the right and the mirror
ordering on the left. Equal-shape Gaussian location mixtures sit on the knife
edge: the estimators stay consistent but intervals can badly undercover.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .data import TuningConstants
from .errors import DominanceError, TuningError

MIN_SUBSAMPLE = 16


@dataclass(frozen=True)
class CutSelection:
    iota: int
    kappa: int
    n: int

    @property
    def q_ell(self) -> float:
        return self.iota / self.n

    @property
    def q_r(self) -> float:
        return (self.n - self.kappa) / self.n


def _raw_count(n: int, tuning: TuningConstants) -> int:
    return max(1, math.floor(tuning.C * (n * math.log(math.log(n))) ** tuning.exponent))


def _feasible(n: int, tuning: TuningConstants) -> bool:
    k = _raw_count(n, tuning)
    return k + 1 <= n - k


def minimal_feasible_n(tuning: TuningConstants, limit: int = 10 ** 9) -> int:
    if _feasible(MIN_SUBSAMPLE, tuning):
        return MIN_SUBSAMPLE
    lo, hi = MIN_SUBSAMPLE, 2 * MIN_SUBSAMPLE
    while not _feasible(hi, tuning):
        if hi > limit:
            raise TuningError(f"no feasible subsample size below {limit} for C={tuning.C}")
        lo, hi = hi, 2 * hi
    # bisect on (infeasible lo, feasible hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _feasible(mid, tuning):
            hi = mid
        else:
            lo = mid
    return hi


def cut_counts(n_S: int, tuning: TuningConstants = TuningConstants()) -> CutSelection:
    """Left and right cut counts for a subsample of size ``n_S``."""
    if n_S < MIN_SUBSAMPLE:
        raise TuningError(f"subsample of size {n_S} is below the minimum {MIN_SUBSAMPLE}")
    k = _raw_count(n_S, tuning)
    if k + 1 > n_S - k:
        raise TuningError(
            f"cuts overlap for n={n_S}, C={tuning.C}; smallest feasible size is "
            f"{minimal_feasible_n(tuning)}")
    return CutSelection(iota=k, kappa=k, n=n_S)


class ParetoAdvisory(NamedTuple):
    gamma: float  # kappa = o(n ** gamma) keeps the bias negligible
    beta: float   # convergence rate close to n ** (-beta / 2)


def pareto_rate_exponent(alpha_G: float, alpha_H: float) -> ParetoAdvisory:
    """Growth-rate ceiling for the cut count under Pareto right tails.

    ``alpha_G`` and ``alpha_H`` are the tail indices of the dominant (G) and
    dominated (H) component; G must have the heavier tail.
    """
    if not (alpha_G > 0 and alpha_H > alpha_G):
        raise DominanceError(
            f"need alpha_H > alpha_G > 0, got alpha_G={alpha_G}, alpha_H={alpha_H}")
    gamma = (alpha_H - alpha_G) / (alpha_H - alpha_G / 2)
    c = alpha_H / alpha_G
    beta = 2 * (c - 1) / (2 * c - 1)
    return ParetoAdvisory(gamma, beta)
