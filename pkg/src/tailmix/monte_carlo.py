"""Simulation study: skew-normal mixture designs, replications and summary tables.

Each replication draws its own RNG stream from ``(master_seed, replication)``
through ``numpy.random.SeedSequence`` spawn keys feeding a Philox generator,
so results do not depend on how replications are spread over workers.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtri

from . import skew_normal as sn
from .data import Sample, TuningConstants
from .errors import DegenerateError, DesignError, TieWarning, ZeroTailWarning
from .mixture import Z95, component_cdfs, lambda_hat
from .spec_test import make_weight, run_spec_test


@dataclass(frozen=True)
class DesignSpec:
    """Y = T V_G + (1 - T) V_H with V_G ~ SN(mu, sigma, beta), V_H ~ SN(-mu, sigma_h, -beta).

    ``p_t1_given_x[k]`` is P(T=1 | X=k), i.e. the mixing proportion of label k.
    With two labels, P(X=1) = ``p_x1``; with more, ``label_probs`` (uniform if
    omitted). ``sigma_h`` defaults to ``sigma``.
    """

    mu: float = 0.0
    beta: float = 5.0
    sigma: float = 1.0
    p_x1: float = 0.5
    p_t1_given_x: tuple[float, ...] = (0.25, 0.75)
    n: int = 1000
    reps: int = 1000
    tuning: TuningConstants = TuningConstants()
    master_seed: int = 0
    sigma_h: float | None = None
    label_probs: tuple[float, ...] | None = None

    def __post_init__(self):
        lam = tuple(float(v) for v in self.p_t1_given_x)
        object.__setattr__(self, "p_t1_given_x", lam)
        if len(lam) < 2:
            raise DesignError("need at least two labels")
        if any(not 0.0 <= v <= 1.0 for v in lam):
            raise DesignError(f"mixing proportions must lie in [0, 1], got {lam}")
        if not 0.0 <= self.p_x1 <= 1.0:
            raise DesignError(f"p_x1 must lie in [0, 1], got {self.p_x1}")
        if self.label_probs is not None:
            probs = tuple(float(v) for v in self.label_probs)
            if len(probs) != len(lam) or any(v < 0 for v in probs) or abs(sum(probs) - 1) > 1e-12:
                raise DesignError("label_probs must be a probability vector matching the labels")
            object.__setattr__(self, "label_probs", probs)
        if not self.sigma > 0 or (self.sigma_h is not None and not self.sigma_h > 0):
            raise DesignError("scales must be positive")
        if self.reps < 1:
            raise DesignError(f"reps must be at least 1, got {self.reps}")
        if self.n < 100:
            raise DesignError(f"n must be at least 100, got {self.n}")
        if not 0 <= self.master_seed < 2 ** 64:
            raise DesignError("master_seed must be a 64-bit unsigned integer")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(str(k) for k in range(len(self.p_t1_given_x)))

    @property
    def probs(self) -> tuple[float, ...]:
        if self.label_probs is not None:
            return self.label_probs
        k = len(self.p_t1_given_x)
        if k == 2:
            return (1.0 - self.p_x1, self.p_x1)
        return (1.0 / k,) * k

    @property
    def g_params(self) -> sn.SkewNormalParams:
        return sn.SkewNormalParams(self.mu, self.sigma, self.beta)

    @property
    def h_params(self) -> sn.SkewNormalParams:
        return sn.SkewNormalParams(-self.mu, self.sigma if self.sigma_h is None else self.sigma_h,
                                   -self.beta)

    def columns(self) -> dict:
        return {"mu": self.mu, "beta": self.beta, "sigma": self.sigma,
                "sigma_h": self.sigma if self.sigma_h is None else self.sigma_h,
                "p_x1": self.probs[-1] if len(self.probs) == 2 else None,
                "lambdas": "/".join(repr(v) for v in self.p_t1_given_x),
                "reps": self.reps, "seed": self.master_seed}


def replication_rng(master_seed: int, rep: int) -> np.random.Generator:
    seq = np.random.SeedSequence(master_seed, spawn_key=(rep,))
    return np.random.Generator(np.random.Philox(seq))


def draw_latent(design: DesignSpec, rng: np.random.Generator):
    """Outcomes, label codes and the latent component indicator T (True for G)."""
    n = design.n
    cum = np.cumsum(design.probs)
    cum[-1] = 1.0
    codes = np.searchsorted(cum, rng.random(n), side="right")
    t = rng.random(n) < np.asarray(design.p_t1_given_x)[codes]
    vg = sn.sample(design.g_params, rng, n)
    vh = sn.sample(design.h_params, rng, n)
    return np.where(t, vg, vh), codes, t


def generate_dataset(design: DesignSpec, rng: np.random.Generator) -> Sample:
    y, codes, _ = draw_latent(design, rng)
    return Sample(y, codes, design.labels)


def true_curves(design: DesignSpec, grid):
    """True G, H and conditional CDFs F(.|x) for every label, evaluated on ``grid``."""
    grid = np.asarray(grid, dtype=np.float64)
    G = sn.cdf(design.g_params, grid)
    H = sn.cdf(design.h_params, grid)
    F = {lab: lam * G + (1.0 - lam) * H for lab, lam in zip(design.labels, design.p_t1_given_x)}
    return G, H, F


def pooled_quantile(design: DesignSpec, q: float) -> float:
    lam_bar = float(np.dot(design.probs, design.p_t1_given_x))

    def f(y):
        return (lam_bar * sn.cdf(design.g_params, y) + (1 - lam_bar) * sn.cdf(design.h_params, y)
                - q)

    scale = 10.0 * max(design.sigma, design.sigma_h or 0.0) + abs(design.mu)
    return brentq(f, -scale, scale, xtol=1e-12)


def figure_lattice(design: DesignSpec, points: int = 201) -> np.ndarray:
    return np.linspace(pooled_quantile(design, 0.001), pooled_quantile(design, 0.999), points)


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get("TAILMIX_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _chunks(reps: int, workers: int):
    size = max(1, math.ceil(reps / (4 * workers)))
    return [range(s, min(reps, s + size)) for s in range(0, reps, size)]


def _map_ordered(fn, args_list, workers):
    if workers <= 1 or len(args_list) <= 1:
        return [fn(*a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, *zip(*args_list)))


# ---------------------------------------------------------------- lambda study

@dataclass
class TargetRow:
    target: str
    lambda_true: float
    q_ell: float
    q_r: float
    bias: float | None
    sd: float | None
    se_over_sd: float | None
    ci95: float | None
    mean_se: float | None
    reps_used: int
    excluded_reps: int


@dataclass
class ComponentSummary:
    mean: np.ndarray
    band_low: np.ndarray
    band_high: np.ndarray
    true: np.ndarray
    mc_low: np.ndarray
    mc_high: np.ndarray
    sd: np.ndarray


@dataclass
class FigureData:
    grid: np.ndarray
    partition: tuple[tuple[str, ...], tuple[str, ...]]
    G: ComponentSummary
    H: ComponentSummary
    reps_used: int
    excluded_reps: int


@dataclass
class StudyReport:
    design: DesignSpec
    rows: list[TargetRow]
    figure: FigureData | None = None
    meta: dict = field(default_factory=dict)

    def row(self, target: str) -> TargetRow:
        for r in self.rows:
            if r.target == target:
                return r
        raise KeyError(target)


def _lambda_chunk(design: DesignSpec, reps: range, grid, partition):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroTailWarning)
        warnings.simplefilter("ignore", TieWarning)
        return _lambda_reps(design, reps, grid, partition)


def _lambda_reps(design: DesignSpec, reps: range, grid, partition):
    out = []
    for rep in reps:
        sample = generate_dataset(design, replication_rng(design.master_seed, rep))
        rec = {"rep": rep, "targets": {}, "figure": None}
        for lab in design.labels:
            try:
                est = lambda_hat(sample, lab, design.tuning)
            except DegenerateError:
                rec["targets"][lab] = None
                continue
            rec["targets"][lab] = (est.lambda_hat, est.se, est.iota / est.zeta_minus.n_B,
                                   (est.zeta_plus.n_B - est.kappa) / est.zeta_plus.n_B)
        if grid is not None:
            try:
                c = component_cdfs(sample, partition[0], partition[1], design.tuning, grid)
                rec["figure"] = np.stack([c.g_values, c.g_se, c.h_values, c.h_se])
            except DegenerateError:
                pass
        out.append(rec)
    return out


def _summarize_component(stack, true):
    """Means of the estimates and of their unclipped plug-in band edges."""
    values, se = stack[:, 0], stack[:, 1]
    mean = values.mean(axis=0)
    sd = values.std(axis=0, ddof=1) if stack.shape[0] > 1 else np.full_like(mean, np.nan)
    return ComponentSummary(mean=mean, band_low=(values - Z95 * se).mean(axis=0),
                            band_high=(values + Z95 * se).mean(axis=0), true=true,
                            mc_low=mean - Z95 * sd, mc_high=mean + Z95 * sd, sd=sd)


def run_study(design: DesignSpec, *, workers: int | None = None, figures: bool = False,
              figure_partition=None, grid_points: int = 201) -> StudyReport:
    """Replicate the lambda estimators (and optionally G_n, H_n) over ``design.reps`` draws."""
    workers = worker_count(workers)
    grid = figure_lattice(design, grid_points) if figures else None
    if figure_partition is None:
        figure_partition = (design.labels[:1], design.labels[1:])
    partition = tuple(tuple(sorted(s)) for s in figure_partition)
    chunks = _chunks(design.reps, workers)
    results = _map_ordered(_lambda_chunk, [(design, c, grid, partition) for c in chunks], workers)
    records = [r for chunk in results for r in chunk]

    rows = []
    for lab, lam in zip(design.labels, design.p_t1_given_x):
        vals = [r["targets"][lab] for r in records if r["targets"][lab] is not None]
        excluded = len(records) - len(vals)
        if not vals:
            rows.append(TargetRow(lab, lam, math.nan, math.nan, None, None, None, None, None,
                                  0, excluded))
            continue
        arr = np.array(vals)
        est, se = arr[:, 0], arr[:, 1]
        half = Z95 * se
        covered = (est - half <= lam) & (lam <= est + half)
        sd = float(est.std(ddof=1)) if len(est) > 1 else None
        rows.append(TargetRow(
            target=lab, lambda_true=lam, q_ell=float(arr[:, 2].mean()),
            q_r=float(arr[:, 3].mean()), bias=float(est.mean() - lam), sd=sd,
            se_over_sd=(float(se.mean()) / sd) if sd else None,
            ci95=float(covered.mean()), mean_se=float(se.mean()), reps_used=len(est),
            excluded_reps=excluded))

    figure = None
    if figures:
        stacks = [r["figure"] for r in records if r["figure"] is not None]
        G, H, _ = true_curves(design, grid)
        if stacks:
            stack = np.stack(stacks)
            figure = FigureData(grid=grid, partition=partition,
                                G=_summarize_component(stack[:, 0:2], G),
                                H=_summarize_component(stack[:, 2:4], H),
                                reps_used=len(stacks), excluded_reps=len(records) - len(stacks))
    return StudyReport(design=design, rows=rows, figure=figure)


# ------------------------------------------------------------ spec-test study

@dataclass
class SpecTestStudy:
    design: DesignSpec
    partition: tuple[tuple[str, ...], ...]
    statistics: dict[str, np.ndarray]
    excluded_reps: dict[str, int]

    def rejection_rate(self, component: str, tau: float = 0.05) -> float:
        stats = self.statistics[component]
        return float(np.mean(np.abs(stats) > ndtri(1.0 - tau / 2.0)))


def _spec_chunk(design, reps, partition, weight, components):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ZeroTailWarning)
        warnings.simplefilter("ignore", TieWarning)
        return _spec_reps(design, reps, partition, weight, components)


def _spec_reps(design, reps, partition, weight, components):
    out = []
    for rep in reps:
        sample = generate_dataset(design, replication_rng(design.master_seed, rep))
        W = make_weight(weight, sample)
        rec = {}
        for comp in components:
            try:
                rec[comp] = run_spec_test(sample, *partition, design.tuning, W, comp).statistic
            except DegenerateError:
                rec[comp] = None
        out.append(rec)
    return out


def run_spec_test_study(design: DesignSpec, partition=None, *, weight: str = "uniform",
                        components=("G", "H"), workers: int | None = None) -> SpecTestStudy:
    """Replicate the specification test; defaults to A, B, C = first three labels."""
    if partition is None:
        labs = design.labels
        if len(labs) < 3:
            raise DesignError("the specification test needs at least three labels")
        partition = ((labs[0],), (labs[1],), tuple(labs[2:]))
    partition = tuple(tuple(sorted(s)) for s in partition)
    workers = worker_count(workers)
    chunks = _chunks(design.reps, workers)
    results = _map_ordered(_spec_chunk,
                           [(design, c, partition, weight, tuple(components)) for c in chunks],
                           workers)
    records = [r for chunk in results for r in chunk]
    stats, excluded = {}, {}
    for comp in components:
        vals = [r[comp] for r in records if r[comp] is not None]
        stats[comp] = np.array(vals)
        excluded[comp] = len(records) - len(vals)
    return SpecTestStudy(design, partition, stats, excluded)
