"""Exact optima by enumeration and Monte Carlo checks of the guarantees.

The brute-force routines here deliberately share no feasibility code with the
solvers: they compute group counts directly from bitmasks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .fair import FairSolveConfig, plan_backup, route, solve, trial_rng
from .model import FairnessSpec, Instance, InfeasibleSpecError, group_bounds
from .objectives import (
    TABLE_LIMIT,
    VALUE_TOL,
    ComplementOracle,
    SubmodularOracle,
    all_masks,
    from_mask,
)

# Problem families understood by ``brute_force``.
FAIR = "fair"                        # l_i <= |S & V_i| <= u_i  (and |S| <= c)
RELAXED = "relaxed"                  # |S & V_i| <= u_i  (and reserved-slot cap)
FLIPPED = "flipped"                  # complement bounds on g  (and |S| >= n - c)
FLIPPED_RELAXED = "flipped-relaxed"  # |S & V_i| <= |V_i| - l_i on g

SIGMAS = 3.0


@dataclass(frozen=True)
class BruteForceResult:
    opt_value: float
    members: frozenset[int]
    feasible_count: int


def _group_counts(instance: Instance, masks: np.ndarray) -> np.ndarray:
    gms = [sum(1 << e for e in g) for g in instance.groups]
    return np.stack([np.bitwise_count(masks & np.int64(gm)) for gm in gms], axis=-1).astype(np.int64)


def feasible_masks(instance: Instance, spec: FairnessSpec, problem: str = FAIR) -> np.ndarray:
    """Boolean array over all bitmasks marking feasibility for ``problem``."""
    if instance.n > TABLE_LIMIT:
        raise ValueError(f"brute force needs n <= {TABLE_LIMIT}")
    masks = all_masks(instance.n)
    counts = _group_counts(instance, masks)
    sizes = np.array(instance.group_sizes)
    b = group_bounds(instance, spec)
    lo, hi = np.array(b.lower), np.array(b.upper)
    total = np.bitwise_count(masks).astype(np.int64)
    c = spec.cap
    if problem == FAIR:
        ok = np.all((counts >= lo) & (counts <= hi), axis=1)
        if c is not None:
            ok &= total <= c
    elif problem == RELAXED:
        ok = np.all(counts <= hi, axis=1)
        if c is not None:
            ok &= np.maximum(lo, counts).sum(axis=1) <= c
    elif problem == FLIPPED:
        ok = np.all((counts >= sizes - hi) & (counts <= sizes - lo), axis=1)
        if c is not None:
            ok &= total >= instance.n - c
    elif problem == FLIPPED_RELAXED:
        ok = np.all(counts <= sizes - lo, axis=1)
    else:
        raise ValueError(f"unknown problem {problem!r}")
    return ok


def brute_force(instance: Instance, spec: FairnessSpec, problem: str = FAIR) -> BruteForceResult:
    """Exact optimum of ``problem`` by enumerating every subset.

    The flipped problems are maximized over ``g(T) = f(V \\ T)``.
    """
    ok = feasible_masks(instance, spec, problem)
    if not ok.any():
        raise InfeasibleSpecError(f"no feasible set for problem {problem!r}")
    f = instance.objective
    oracle = ComplementOracle(f) if problem in (FLIPPED, FLIPPED_RELAXED) else f
    masks = all_masks(instance.n)[ok]
    vals = oracle.table()[masks]
    k = int(np.argmax(vals))
    return BruteForceResult(float(vals[k]), from_mask(int(masks[k])), int(ok.sum()))


def brute_force_opt(instance: Instance, spec: FairnessSpec) -> BruteForceResult:
    return brute_force(instance, spec, FAIR)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    values: np.ndarray


def estimate_expectation(
    run: Callable[[np.random.Generator], float], trials: int, seed: int = 0
) -> Estimate:
    """Sample mean and standard error of ``run(rng)`` over independent streams."""
    if trials < 2:
        raise ValueError("need at least two trials for a standard error")
    vals = np.array([run(trial_rng(seed, t)) for t in range(trials)], dtype=float)
    return Estimate(float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials)), trials, vals)


@dataclass(frozen=True)
class RatioReport:
    mean: float
    stderr: float
    trials: int
    opt_value: float
    bound: float
    passed: bool | None  # None when too few trials for a verdict

    @property
    def margin(self) -> float:
        """How far the mean sits above the lowest accepted value."""
        return self.mean - (self.bound * self.opt_value - SIGMAS * self.stderr)

    @property
    def ratio(self) -> float:
        return self.mean / self.opt_value if self.opt_value > 0 else float("nan")


def ratio_verdict(mean: float, stderr: float, trials: int, opt_value: float, bound: float) -> RatioReport:
    passed = None
    if trials >= 30:
        passed = bool(mean >= bound * opt_value - SIGMAS * stderr - VALUE_TOL)
    return RatioReport(mean, stderr, trials, opt_value, bound, passed)


def theorem_bound(spec: FairnessSpec) -> Fraction:
    return Fraction(1, 3) if spec.high_alpha else Fraction(1, 2)


def check_theorem_bound(
    instance: Instance, spec: FairnessSpec, trials: int = 1000, seed: int = 0, solver: str = "exact"
) -> RatioReport:
    """Mean value of the routed algorithm against ``bound * OPT``.

    The guarantee assumes an exact inner solver; with a heuristic solver the
    verdict is informational only.
    """
    opt = brute_force_opt(instance, spec).opt_value
    report = solve(instance, spec, FairSolveConfig(solver=solver, seed=seed, trials=trials))
    return ratio_verdict(report.mean, report.stderr, trials, opt, float(theorem_bound(spec)))


@dataclass(frozen=True)
class LemmaCheck:
    mean: float
    stderr: float
    bound: float
    trials: int
    passed: bool


def check_random_subset_lemma(
    oracle: SubmodularOracle, p: float, trials: int = 10000, seed: int = 0
) -> LemmaCheck:
    """Draw ``S`` with independent inclusion probability ``p`` and compare the
    mean of ``f(S)`` with ``(1 - p) f(empty)``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    n = oracle.n
    bits = np.int64(1) << np.arange(n, dtype=np.int64)
    draws = rng.random((trials, n)) < p
    masks = (draws * bits).sum(axis=1)
    if n <= TABLE_LIMIT:
        vals = oracle.table()[masks]
    else:
        vals = np.array([oracle.value_mask(int(m)) for m in masks])
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    bound = (1.0 - p) * oracle.value_mask(0)
    return LemmaCheck(mean, stderr, bound, trials, mean >= bound - SIGMAS * stderr - VALUE_TOL)


def backup_targets(instance: Instance, spec: FairnessSpec) -> tuple[tuple[int, ...], frozenset[int]]:
    """Refill targets of the routed algorithm and the items it never touches."""
    b = group_bounds(instance, spec)
    sizes = instance.group_sizes
    algorithm = route(spec)
    if algorithm in (1, 3):
        return b.lower, frozenset()
    dropped = {i for i, s in enumerate(sizes) if s == 1 and b.upper[i] == 0}
    excluded = frozenset(e for i in dropped for e in instance.groups[i])
    if algorithm == 2:
        t = tuple(0 if i in dropped else s - u for i, (s, u) in enumerate(zip(sizes, b.upper)))
    else:
        t = tuple(0 if i in dropped else s - lo for i, (s, lo) in enumerate(zip(sizes, b.lower)))
    return t, excluded


@dataclass(frozen=True)
class BackupProbabilityReport:
    frequencies: dict[int, float]
    analytic: dict[int, Fraction]
    bound: Fraction
    trials: int
    passed: bool

    @property
    def max_frequency(self) -> float:
        return max(self.frequencies.values(), default=0.0)


def check_backup_probability(
    instance: Instance,
    spec: FairnessSpec,
    relaxed: frozenset[int],
    trials: int = 10000,
    seed: int = 0,
) -> BackupProbabilityReport:
    """Empirical and exact probability that each item outside ``relaxed`` is
    drawn into a backup set, against 1/2 (alpha <= 1/2) or 2/3 (alpha > 1/2)."""
    relaxed = frozenset(relaxed)
    targets, excluded = backup_targets(instance, spec)
    if relaxed & excluded:
        raise ValueError("relaxed solution contains items the algorithm never selects")
    bound = Fraction(2, 3) if spec.high_alpha else Fraction(1, 2)
    outside = sorted(frozenset(range(instance.n)) - relaxed - excluded)
    hits = dict.fromkeys(outside, 0)
    for t in range(trials):
        plan = plan_backup(relaxed, targets, instance, trial_rng(seed, t))
        for e in plan.items:
            hits[e] += 1
    freqs = {e: hits[e] / trials for e in outside}
    analytic = {}
    for i, members in enumerate(instance.groups):
        pool = members - relaxed
        d = max(0, targets[i] - len(members & relaxed))
        for e in pool - excluded:
            analytic[e] = Fraction(d, len(pool)) if d else Fraction(0)
    sigma = math.sqrt(float(bound) * (1 - float(bound)) / trials)
    passed = all(v <= float(bound) + SIGMAS * sigma for v in freqs.values()) and all(
        a <= bound for a in analytic.values()
    )
    return BackupProbabilityReport(freqs, analytic, bound, trials, passed)
