"""Closed-form mixing proportions and component CDFs with plug-in standard errors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .data import Sample, TuningConstants, label_set
from .errors import (
    DegenerateDenominatorError,
    DegenerateWeightError,
    PartitionError,
    SampleSizeError,
)
from .tail_ratio import TailRatioEstimate, zeta_minus_hat, zeta_plus_hat
from .tuning import cut_counts

Z95 = 1.959963984540054
DENOM_TOL = 1e-10
MIN_SUBSET = 50


@dataclass(frozen=True)
class MixingProportionEstimate:
    x: tuple[str, ...]
    lambda_hat: float
    lambda_clipped: float
    se: float
    ci_low: float
    ci_high: float
    iota: int
    kappa: int
    zeta_minus: TailRatioEstimate
    zeta_plus: TailRatioEstimate

    def covers(self, value: float) -> bool:
        """Whether the unclipped interval lambda_hat +/- 1.96 se contains ``value``."""
        half = Z95 * self.se
        return self.lambda_hat - half <= value <= self.lambda_hat + half

    def to_dict(self) -> dict:
        return {
            "x": list(self.x), "lambda_hat": self.lambda_hat,
            "lambda_clipped": self.lambda_clipped, "se": self.se,
            "ci_low": self.ci_low, "ci_high": self.ci_high,
            "iota": self.iota, "kappa": self.kappa,
            "q_ell": self.iota / self.zeta_minus.n_B,
            "q_r": (self.zeta_plus.n_B - self.kappa) / self.zeta_plus.n_B,
            "zeta_minus": self.zeta_minus.to_dict(), "zeta_plus": self.zeta_plus.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class ComponentCdfEstimate:
    """Step-function estimates of G and H on a grid.

    Fields of a component that was not requested (one-sided estimation) are None.
    Values are raw unless ``rearranged`` is set; bands are clipped to [0, 1].
    """

    grid: np.ndarray
    g_values: np.ndarray | None
    h_values: np.ndarray | None
    g_se: np.ndarray | None
    h_se: np.ndarray | None
    g_band: tuple[np.ndarray, np.ndarray] | None
    h_band: tuple[np.ndarray, np.ndarray] | None
    A: frozenset
    B: frozenset
    zeta_minus: TailRatioEstimate | None
    zeta_plus: TailRatioEstimate | None
    rearranged: bool = False

    def values(self, component: str) -> np.ndarray:
        out = self.g_values if component == "G" else self.h_values
        if out is None:
            raise ValueError(f"component {component} was not estimated")
        return out

    def evaluate(self, component: str, y) -> np.ndarray:
        """Evaluate the right-continuous step function through the grid at ``y``."""
        vals = self.values(component)
        idx = np.searchsorted(self.grid, y, side="right") - 1
        out = np.where(idx >= 0, vals[np.clip(idx, 0, None)], 0.0)
        return out

    def to_dict(self) -> dict:
        def arr(a):
            return None if a is None else a.tolist()

        d = {"A": sorted(self.A), "B": sorted(self.B), "grid": self.grid.tolist(),
             "rearranged": self.rearranged}
        if self.g_values is not None:
            d.update(g_values=arr(self.g_values), g_se=arr(self.g_se),
                     g_band_low=arr(self.g_band[0]), g_band_high=arr(self.g_band[1]),
                     zeta_minus_BA=self.zeta_minus.to_dict())
        if self.h_values is not None:
            d.update(h_values=arr(self.h_values), h_se=arr(self.h_se),
                     h_band_low=arr(self.h_band[0]), h_band_high=arr(self.h_band[1]),
                     zeta_plus_BA=self.zeta_plus.to_dict())
        return d


def lambda_from_zetas(zeta_minus: float, zeta_plus: float) -> float:
    diff = zeta_plus - zeta_minus
    if abs(diff) < DENOM_TOL:
        raise DegenerateDenominatorError(
            "tail ratios coincide: lambda is constant across the partition or x is irrelevant")
    return (1.0 - zeta_minus) / diff


def jacobians(zeta_minus: float, zeta_plus: float) -> tuple[float, float]:
    """Partial derivatives of (1 - zm) / (zp - zm) with respect to zm and zp."""
    diff = zeta_plus - zeta_minus
    if abs(diff) < DENOM_TOL:
        raise DegenerateDenominatorError("tail ratios coincide")
    d2 = diff * diff
    return (1.0 - zeta_plus) / d2, (zeta_minus - 1.0) / d2


def _require_size(sample: Sample, S, what: str, min_size: int) -> int:
    n_s = sample.subset_size(S)
    if n_s < min_size:
        raise SampleSizeError(f"{what} has {n_s} observations, below the minimum {min_size}")
    return n_s


def _cuts(n_s, tuning, iota, kappa):
    sel = cut_counts(n_s, tuning) if iota is None or kappa is None else None
    return (sel.iota if iota is None else iota), (sel.kappa if kappa is None else kappa)


def lambda_hat(sample: Sample, x, tuning: TuningConstants = TuningConstants(), *,
               min_size: int = MIN_SUBSET, iota: int | None = None,
               kappa: int | None = None) -> MixingProportionEstimate:
    """Mixing proportion at label ``x`` (or a set of labels) against all other labels."""
    B = sample.validate_subset(x)
    A = frozenset(sample.label_counts).difference(B)
    if not A:
        raise PartitionError("need at least two labels: lambda must vary across X")
    n_x = _require_size(sample, B, f"subset {sorted(B)}", min_size)
    _require_size(sample, A, "complement subset", min_size)
    iota, kappa = _cuts(n_x, tuning, iota, kappa)

    zm = zeta_minus_hat(sample, A, B, iota)
    zp = zeta_plus_hat(sample, A, B, kappa)
    lam = lambda_from_zetas(zm.value, zp.value)
    d_minus, d_plus = jacobians(zm.value, zp.value)
    se = math.sqrt(d_minus * d_minus * zm.sigma2 / iota + d_plus * d_plus * zp.sigma2 / kappa)
    clip = min(1.0, max(0.0, lam))
    lo = min(1.0, max(0.0, lam - Z95 * se))
    hi = min(1.0, max(0.0, lam + Z95 * se))
    return MixingProportionEstimate(
        x=tuple(sorted(B)), lambda_hat=lam, lambda_clipped=clip, se=se,
        ci_low=lo, ci_high=hi, iota=iota, kappa=kappa, zeta_minus=zm, zeta_plus=zp)


def lambda_all(sample: Sample, tuning: TuningConstants = TuningConstants(),
               **kwargs) -> dict[str, MixingProportionEstimate]:
    return {lab: lambda_hat(sample, lab, tuning, **kwargs) for lab in sample.label_counts}


def _check_partition(sample: Sample, A, B, cover: bool):
    a, b = sample.validate_subset(A), sample.validate_subset(B)
    if a & b:
        raise PartitionError(f"A and B overlap on {sorted(a & b)}")
    if cover and (a | b) != frozenset(sample.label_counts):
        raise PartitionError("A and B must partition the label set")
    return a, b


def _one_component(FA, FB, zeta: TailRatioEstimate, what: str):
    """Component values and plug-in SEs from one B-versus-A tail ratio."""
    one_minus = 1.0 - zeta.value
    if abs(one_minus) < DENOM_TOL:
        raise DegenerateWeightError(f"{what}: tail ratio is 1, component weight undefined")
    w = 1.0 / one_minus
    diff = FA - FB
    values = FA - w * diff
    d = diff / (one_minus * one_minus)
    se = np.abs(d) * math.sqrt(zeta.sigma2) / math.sqrt(zeta.cut_count)
    return values, se


def _band(values, se):
    return (np.clip(values - Z95 * se, 0.0, 1.0), np.clip(values + Z95 * se, 0.0, 1.0))


def component_estimate(sample: Sample, A, B, tuning: TuningConstants = TuningConstants(),
                       grid=None, *, sides=("left", "right"), cover: bool = True,
                       min_size: int = MIN_SUBSET, iota: int | None = None,
                       kappa: int | None = None, rearrange: bool = False
                       ) -> ComponentCdfEstimate:
    """Shared path behind the two- and one-sided component CDF estimators.

    ``cover=False`` lets B be any set disjoint from A, as the specification
    test needs.
    """
    a, b = _check_partition(sample, A, B, cover)
    n_a = _require_size(sample, a, "subset A", min_size)
    _require_size(sample, b, "subset B", min_size)
    iota, kappa = _cuts(n_a, tuning, iota, kappa)

    if grid is None:
        grid = np.unique(np.concatenate([sample.sorted_subset(a), sample.sorted_subset(b)]))
    else:
        grid = np.asarray(grid, dtype=np.float64)
        if grid.ndim != 1 or np.any(np.diff(grid) < 0):
            raise ValueError("grid must be a 1-d ascending array")
    ya, yb = sample.sorted_subset(a), sample.sorted_subset(b)
    FA = np.searchsorted(ya, grid, side="right") / ya.size
    FB = np.searchsorted(yb, grid, side="right") / yb.size

    g = h = g_se = h_se = g_band = h_band = zm = zp = None
    if "left" in sides:
        zm = zeta_minus_hat(sample, b, a, iota)
        g, g_se = _one_component(FA, FB, zm, "G")
        if rearrange:
            g = np.clip(np.sort(g), 0.0, 1.0)
        g_band = _band(g, g_se)
    if "right" in sides:
        zp = zeta_plus_hat(sample, b, a, kappa)
        h, h_se = _one_component(FA, FB, zp, "H")
        if rearrange:
            h = np.clip(np.sort(h), 0.0, 1.0)
        h_band = _band(h, h_se)
    return ComponentCdfEstimate(grid=grid, g_values=g, h_values=h, g_se=g_se, h_se=h_se,
                                g_band=g_band, h_band=h_band, A=a, B=b,
                                zeta_minus=zm, zeta_plus=zp, rearranged=rearrange)


def component_cdfs(sample: Sample, A, B, tuning: TuningConstants = TuningConstants(),
                   grid=None, **kwargs) -> ComponentCdfEstimate:
    """Estimate G and H from a partition (A, B) of the labels."""
    return component_estimate(sample, A, B, tuning, grid, **kwargs)


def component_cdf_one_sided(sample: Sample, A, B, tuning: TuningConstants = TuningConstants(),
                            side: Literal["left", "right"] = "right", grid=None,
                            **kwargs) -> ComponentCdfEstimate:
    """Estimate only G (``side="left"``) or only H (``side="right"``).

    Only the dominance condition on that side is needed.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return component_estimate(sample, A, B, tuning, grid, sides=(side,), **kwargs)


def implied_lambdas(est: ComponentCdfEstimate) -> tuple[float, float]:
    """Aggregate mixing weights of A and B implied by the two B-versus-A tail ratios."""
    zm, zp = est.zeta_minus.value, est.zeta_plus.value
    lam_a = (1.0 - zm) / (zp - zm)
    return lam_a, lam_a * zp


def default_partition(sample: Sample) -> tuple[frozenset, frozenset]:
    labels = list(sample.label_counts)
    if len(labels) < 2:
        raise PartitionError("need at least two labels to form a partition")
    return label_set(labels[:1]), label_set(labels[1:])
