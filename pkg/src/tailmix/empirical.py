"""Subsample ECDFs and intermediate order statistics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .data import Sample
from .errors import TieWarning, TuningError


@dataclass(frozen=True)
class OrderStatCuts:
    """Left cut ``ell`` is the (iota+1)-th and right cut ``r`` the (m-kappa)-th order statistic."""

    iota: int
    kappa: int
    ell: float
    r: float
    m: int


def ecdf(sample: Sample, S, y):
    """Fraction of the S-subsample at or below ``y`` (scalar or array)."""
    ys = sample.sorted_subset(S)
    counts = np.searchsorted(ys, y, side="right")
    return counts / ys.size


def ecdf_counts(sorted_values: np.ndarray, y):
    return np.searchsorted(sorted_values, y, side="right")


def check_cuts(m: int, iota: int, kappa: int) -> None:
    if iota < 0:
        raise TuningError(f"iota must be nonnegative, got {iota}")
    if kappa < 1:
        raise TuningError(f"kappa must be at least 1, got {kappa}")
    if iota + 1 > m - kappa:
        raise TuningError(
            f"cuts overlap: iota + 1 = {iota + 1} exceeds m - kappa = {m - kappa} (m = {m})")


def left_cut(ys: np.ndarray, iota: int) -> float:
    """(iota+1)-th smallest of sorted ``ys``; warns when it ties with its successor."""
    m = ys.size
    if iota < 0 or iota + 1 > m:
        raise TuningError(f"left cut rank {iota + 1} outside 1..{m}")
    ell = ys[iota]
    if iota + 1 < m and ys[iota + 1] == ell:
        warnings.warn(f"tied outcomes at the left cut (rank {iota + 1}, value {ell!r})",
                      TieWarning, stacklevel=3)
    return float(ell)


def right_cut(ys: np.ndarray, kappa: int) -> float:
    """(m-kappa)-th smallest of sorted ``ys``; warns when it ties with its successor."""
    m = ys.size
    if kappa < 1 or m - kappa < 1:
        raise TuningError(f"right cut rank {m - kappa} outside 1..{m}")
    r = ys[m - kappa - 1]
    if ys[m - kappa] == r:
        warnings.warn(f"tied outcomes at the right cut (rank {m - kappa}, value {r!r})",
                      TieWarning, stacklevel=3)
    return float(r)


def order_stats(sample: Sample, S, iota: int, kappa: int) -> OrderStatCuts:
    ys = sample.sorted_subset(S)
    check_cuts(ys.size, iota, kappa)
    return OrderStatCuts(iota=iota, kappa=kappa, ell=left_cut(ys, iota),
                         r=right_cut(ys, kappa), m=int(ys.size))
