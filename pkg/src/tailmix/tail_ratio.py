"""Left and right tail-ratio estimators with plug-in variance.

For disjoint label sets A and B, the left ratio compares the A- and B-ECDFs at
the (iota+1)-th smallest B-outcome; the right ratio compares survival
functions at the (n_B - kappa)-th smallest B-outcome. Each ratio is
asymptotically normal at rate ``sqrt(cut_count)`` with variance
``zeta**2 + rho * zeta`` where ``rho = n_B / n_A``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

from .data import Sample
from .empirical import ecdf_counts, left_cut, right_cut
from .errors import DegenerateTailError, PartitionError, ZeroTailWarning

Side = Literal["left", "right"]


@dataclass(frozen=True)
class TailRatioEstimate:
    side: Side
    value: float
    cut_count: int
    rho_hat: float
    sigma2: float
    se: float
    cut_point: float
    n_A: int
    n_B: int
    diagnostics: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "side": self.side, "value": self.value, "cut_count": self.cut_count,
            "rho_hat": self.rho_hat, "sigma2": self.sigma2,
            "se": None if math.isnan(self.se) else self.se,
            "cut_point": self.cut_point, "n_A": self.n_A, "n_B": self.n_B,
            "diagnostics": list(self.diagnostics),
        }


def _disjoint(sample: Sample, A, B):
    a = sample.validate_subset(A)
    b = sample.validate_subset(B)
    if a & b:
        raise PartitionError(f"A and B overlap on {sorted(a & b)}")
    return a, b


def _finish(side, value, cut_count, n_A, n_B, cut_point, diagnostics):
    rho = n_B / n_A
    sigma2 = value * value + rho * value
    se = math.sqrt(sigma2 / cut_count) if cut_count >= 1 else math.nan
    if cut_count < 1:
        diagnostics = diagnostics + ("se-undefined",)
    return TailRatioEstimate(side=side, value=value, cut_count=cut_count, rho_hat=rho,
                             sigma2=sigma2, se=se, cut_point=cut_point, n_A=n_A, n_B=n_B,
                             diagnostics=diagnostics)


def zeta_minus_hat(sample: Sample, A, B, iota: int) -> TailRatioEstimate:
    """Left tail ratio F_n(ell|A) / F_n(ell|B) with ell cut on the B-subsample."""
    a, b = _disjoint(sample, A, B)
    ya, yb = sample.sorted_subset(a), sample.sorted_subset(b)
    ell = left_cut(yb, iota)
    num = ecdf_counts(ya, ell) / ya.size
    den = ecdf_counts(yb, ell) / yb.size
    if den == 0:
        raise DegenerateTailError("left tail ratio has a zero denominator")
    value = float(num / den)
    diagnostics = ()
    if value == 0:
        warnings.warn("no A-outcomes at or below the left cut", ZeroTailWarning, stacklevel=2)
        diagnostics = ("zero-tail",)
    return _finish("left", value, iota, int(ya.size), int(yb.size), ell, diagnostics)


def zeta_plus_hat(sample: Sample, A, B, kappa: int) -> TailRatioEstimate:
    """Right tail ratio (1 - F_n(r|A)) / (1 - F_n(r|B)) with r cut on the B-subsample."""
    a, b = _disjoint(sample, A, B)
    ya, yb = sample.sorted_subset(a), sample.sorted_subset(b)
    r = right_cut(yb, kappa)
    num = 1.0 - ecdf_counts(ya, r) / ya.size
    den = 1.0 - ecdf_counts(yb, r) / yb.size
    if den == 0:
        raise DegenerateTailError("right tail ratio has a zero denominator")
    value = float(num / den)
    diagnostics = ()
    if value == 0:
        warnings.warn("no A-outcomes above the right cut", ZeroTailWarning, stacklevel=2)
        diagnostics = ("zero-tail",)
    return _finish("right", value, kappa, int(ya.size), int(yb.size), r, diagnostics)


def zeta_hat(sample: Sample, A, B, side: Side, count: int) -> TailRatioEstimate:
    if side == "left":
        return zeta_minus_hat(sample, A, B, count)
    if side == "right":
        return zeta_plus_hat(sample, A, B, count)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def population_zetas(lambda_A: float, lambda_B: float) -> tuple[float, float]:
    """Limits of the left and right tail ratios given aggregate mixing weights."""
    return (1 - lambda_A) / (1 - lambda_B), lambda_A / lambda_B

