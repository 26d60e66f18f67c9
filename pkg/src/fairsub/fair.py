"""Group-fair submodular maximization by relax, solve, then randomly refill.

Each algorithm drops the group lower bounds (and, with a global cap, folds the
cap into a matroid), solves the relaxation with an inner solver, and then
samples uniform "backup" items in every group that fell short. When
``alpha > 1/2`` the work happens on the complement function
``g(T) = f(V \\ T)`` and the final answer is the complement of the filled set.

===========  =========  ===========================================
algorithm    routed if  relaxation / refill target
===========  =========  ===========================================
1            a <= 1/2   caps ``u_i`` on f; fill to ``l_i``
2            a > 1/2    caps ``|V_i|-l_i`` on g; fill to ``|V_i|-u_i``
3 (capped)   a <= 1/2   fair-reduction matroid on f; fill to ``l_i``
4 (capped)   a > 1/2    caps ``|V_i|-l_i`` on g; fill to ``|V_i|-l_i``
===========  =========  ===========================================
"""
from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .inner import InnerSolver, get_solver
from .matroids import FairReductionMatroid, GroupMatroid, PartitionMatroid
from .model import (
    FairnessSpec,
    Instance,
    Solution,
    group_bounds,
    is_fair,
    require_feasible,
)
from .objectives import ComplementOracle, SubmodularOracle

BRANCHES = {
    1: "low-alpha",
    2: "high-alpha",
    3: "capped-low-alpha",
    4: "capped-high-alpha",
}


@dataclass(frozen=True)
class FairSolveConfig:
    solver: str = "exact"
    seed: int = 0
    trials: int = 1
    epsilon: float = 1e-4  # local-search improvement threshold
    best_of: bool = False
    lazy_fill: bool = False  # algorithm 4 only: fill to the complement floors, then top up

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        get_solver(self.solver)


@dataclass(frozen=True)
class BackupPlan:
    deficits: tuple[int, ...]
    backups: tuple[frozenset[int], ...]

    @property
    def items(self) -> frozenset[int]:
        return frozenset().union(*self.backups) if self.backups else frozenset()


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream per (master seed, trial index)."""
    return np.random.default_rng([int(seed), int(trial)])


def plan_backup(
    A: frozenset[int],
    targets: Sequence[int],
    instance: Instance,
    rng: np.random.Generator,
) -> BackupPlan:
    """Sample, for each group short of its target, a uniform set of the
    missing size from the group's items outside ``A``."""
    A = frozenset(A)
    deficits, backups = [], []
    for i, members in enumerate(instance.groups):
        have = len(A & members)
        d = max(0, targets[i] - have)
        deficits.append(d)
        if d == 0:
            backups.append(frozenset())
            continue
        pool = members - A
        if d > len(pool):
            raise RuntimeError(f"group {i} needs {d} backup items but only {len(pool)} are available")
        picked = rng.choice(np.array(sorted(pool)), size=d, replace=False)
        backups.append(frozenset(int(e) for e in picked))
    return BackupPlan(tuple(deficits), tuple(backups))


def backup_fill(
    A: frozenset[int],
    targets: Sequence[int],
    instance: Instance,
    rng: np.random.Generator,
) -> frozenset[int]:
    return frozenset(A) | plan_backup(A, targets, instance, rng).items


@dataclass
class _Prepared:
    """Everything a trial needs that does not depend on the trial's randomness."""

    algorithm: int
    oracle: SubmodularOracle  # f, or g on the active universe
    matroid: GroupMatroid
    targets: tuple[int, ...]
    complemented: bool
    universe: frozenset[int]
    excluded: frozenset[int]
    lazy_floor: tuple[int, ...] | None = None
    lazy_min_size: int = 0
    notes: list[str] = field(default_factory=list)


def route(spec: FairnessSpec) -> int:
    """Algorithm number for a spec: alpha == 1/2 goes to the low-alpha branch."""
    if spec.cap is None:
        return 2 if spec.high_alpha else 1
    return 4 if spec.high_alpha else 3


def _prepare(instance: Instance, spec: FairnessSpec, algorithm: int, lazy_fill: bool = False) -> _Prepared:
    require_feasible(instance, spec)
    f = instance.objective
    b = group_bounds(instance, spec)
    sizes = instance.group_sizes
    everything = frozenset(range(instance.n))

    if algorithm in (1, 3):
        if algorithm == 1:
            matroid: GroupMatroid = PartitionMatroid(instance.group_of, b.upper)
        else:
            matroid = FairReductionMatroid(instance.group_of, b.upper, b.lower, spec.cap)
        return _Prepared(algorithm, f, matroid, b.lower, False, everything, frozenset())

    # Singleton groups with both bounds zero can never be selected; solving
    # without them keeps every backup probability within the 2/3 bound.
    dropped = [i for i, s in enumerate(sizes) if s == 1 and b.upper[i] == 0]
    groups = instance.groups
    excluded = frozenset().union(*(groups[i] for i in dropped)) if dropped else frozenset()
    universe = everything - excluded
    caps = [0 if i in dropped else s - lo for i, (s, lo) in enumerate(zip(sizes, b.lower))]
    g = ComplementOracle(f, universe)
    matroid = PartitionMatroid(instance.group_of, caps)
    notes = []
    if dropped:
        notes.append(f"forced-empty singleton groups excluded from solving: {dropped}")
    if algorithm == 2:
        targets = tuple(0 if i in dropped else s - u for i, (s, u) in enumerate(zip(sizes, b.upper)))
        return _Prepared(2, g, matroid, targets, True, universe, excluded, notes=notes)

    prep = _Prepared(4, g, matroid, tuple(caps), True, universe, excluded, notes=notes)
    free_singletons = [i for i, s in enumerate(sizes) if s == 1 and b.lower[i] == 0 and b.upper[i] == 1]
    if free_singletons and not lazy_fill:
        notes.append(
            "singleton groups with bounds [0, 1] are always left out by the exact refill: "
            f"{free_singletons}; the 1/3 guarantee is not established for this instance"
        )
    if lazy_fill:
        prep.lazy_floor = tuple(0 if i in dropped else s - u for i, (s, u) in enumerate(zip(sizes, b.upper)))
        prep.lazy_min_size = len(universe) - spec.cap
        notes.append("lazy refill: complement floors plus global top-up")
    return prep


def _inner_call(solver: InnerSolver, config: FairSolveConfig):
    if solver.name == "local-search":
        return functools.partial(solver.solve, epsilon=config.epsilon)
    return solver.solve


def _lazy_top_up(A: frozenset[int], prep: _Prepared, instance: Instance, rng) -> frozenset[int]:
    A = set(A)
    counts = instance.counts(A)
    while len(A) < prep.lazy_min_size:
        pool = sorted(
            e for e in prep.universe - A if counts[instance.group_of[e]] < prep.targets[instance.group_of[e]]
        )
        if not pool:
            raise RuntimeError("no room left to satisfy the global cap")
        e = pool[int(rng.integers(len(pool)))]
        A.add(e)
        counts[instance.group_of[e]] += 1
    return frozenset(A)


def _finish(prep: _Prepared, instance: Instance, relaxed: frozenset[int], rng) -> frozenset[int]:
    if prep.lazy_floor is not None:
        filled = backup_fill(relaxed, prep.lazy_floor, instance, rng)
        filled = _lazy_top_up(filled, prep, instance, rng)
    else:
        filled = backup_fill(relaxed, prep.targets, instance, rng)
    return prep.universe - filled if prep.complemented else filled


def _single(instance, spec, config, algorithm) -> Solution:
    prep = _prepare(instance, spec, algorithm, config.lazy_fill)
    solver = get_solver(config.solver)
    rng = trial_rng(config.seed, 0)
    relaxed = _inner_call(solver, config)(prep.oracle, prep.matroid, rng)
    members = _finish(prep, instance, relaxed, rng)
    return Solution(members, instance.objective.value(members))


def _check_branch(spec: FairnessSpec, algorithm: int) -> None:
    if route(spec) != algorithm:
        raise ValueError(
            f"algorithm {algorithm} does not apply to alpha={spec.alpha}, cap={spec.cap}; "
            f"use algorithm {route(spec)}"
        )


def fair_low_alpha(instance: Instance, spec: FairnessSpec, config: FairSolveConfig = FairSolveConfig()) -> Solution:
    _check_branch(spec, 1)
    return _single(instance, spec, config, 1)


def fair_high_alpha(instance: Instance, spec: FairnessSpec, config: FairSolveConfig = FairSolveConfig()) -> Solution:
    _check_branch(spec, 2)
    return _single(instance, spec, config, 2)


def fair_card_low_alpha(
    instance: Instance, spec: FairnessSpec, config: FairSolveConfig = FairSolveConfig()
) -> Solution:
    _check_branch(spec, 3)
    return _single(instance, spec, config, 3)


def fair_card_high_alpha(
    instance: Instance, spec: FairnessSpec, config: FairSolveConfig = FairSolveConfig()
) -> Solution:
    _check_branch(spec, 4)
    return _single(instance, spec, config, 4)


@dataclass
class SolveReport:
    algorithm: int
    branch: str
    solver: str
    declared_gamma: float | None
    alpha: Fraction
    beta: Fraction
    cap: int | None
    seed: int
    solutions: list[Solution]
    feasible: bool
    violations: int
    oracle_calls: int
    wall_time: float
    notes: list[str]
    best_of: bool = False

    @property
    def values(self) -> np.ndarray:
        return np.array([s.value for s in self.solutions])

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def stderr(self) -> float:
        k = len(self.solutions)
        return float(self.values.std(ddof=1) / math.sqrt(k)) if k > 1 else 0.0

    @property
    def best(self) -> Solution:
        return max(self.solutions, key=lambda s: s.value)

    @property
    def selected(self) -> Solution:
        """The best trial when best-of selection is on, else the first."""
        return self.best if self.best_of else self.solutions[0]


def solve(instance: Instance, spec: FairnessSpec, config: FairSolveConfig = FairSolveConfig()) -> SolveReport:
    """Route by (alpha, cap), run ``config.trials`` independent trials, audit."""
    algorithm = route(spec)
    prep = _prepare(instance, spec, algorithm, config.lazy_fill)
    solver = get_solver(config.solver)
    inner = _inner_call(solver, config)
    f = instance.objective
    calls_before = f.calls
    t0 = time.perf_counter()
    cached = None
    solutions = []
    violations = 0
    for t in range(config.trials):
        rng = trial_rng(config.seed, t)
        if solver.deterministic and cached is not None:
            relaxed = cached
        else:
            relaxed = inner(prep.oracle, prep.matroid, rng)
            if not prep.matroid.is_independent(relaxed):
                raise RuntimeError(f"inner solver {solver.name} returned a dependent set")
            cached = relaxed
        members = _finish(prep, instance, relaxed, rng)
        if not is_fair(instance, spec, members):
            violations += 1
        solutions.append(Solution(members, f.value(members)))
    return SolveReport(
        algorithm=algorithm,
        branch=BRANCHES[algorithm],
        solver=solver.name,
        declared_gamma=solver.declared_gamma,
        alpha=spec.alpha,
        beta=spec.beta,
        cap=spec.cap,
        seed=config.seed,
        solutions=solutions,
        feasible=violations == 0,
        violations=violations,
        oracle_calls=f.calls - calls_before,
        wall_time=time.perf_counter() - t0,
        notes=list(prep.notes),
        best_of=config.best_of,
    )


def relaxed_problem(instance: Instance, spec: FairnessSpec) -> tuple[SubmodularOracle, GroupMatroid]:
    """The oracle and matroid the routed algorithm hands to its inner solver."""
    prep = _prepare(instance, spec, route(spec))
    return prep.oracle, prep.matroid
