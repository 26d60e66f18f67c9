"""End-to-end verification checks run by ``fairsub verify``."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .fair import relaxed_problem, route
from .files import generate_instance
from .inner import exact_solve
from .matroids import FairReductionMatroid, PartitionMatroid, check_matroid_axioms
from .model import FairnessSpec, Instance, feasibility_preconditions, group_bounds
from .objectives import EXHAUSTIVE_LIMIT, TABLE_LIMIT, VALUE_TOL, ComplementOracle, validate_submodular
from .verification import (
    FAIR,
    FLIPPED,
    FLIPPED_RELAXED,
    RELAXED,
    brute_force,
    check_backup_probability,
    check_theorem_bound,
)

AXIOM_LIMIT = 10
BRUTE_FORCE_BUDGET = 16


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def default_specs(instance: Instance) -> list[FairnessSpec]:
    """A small grid touching all four algorithms (caps only where feasible)."""
    out = []
    for a in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
        out.append(FairnessSpec(a, Fraction(1)))
        need = sum(group_bounds(instance, FairnessSpec(a, Fraction(1))).lower)
        cap = max(need, (instance.n + need) // 2)
        out.append(FairnessSpec(a, Fraction(1), cap))
    return out


def _spec_label(spec: FairnessSpec) -> str:
    cap = "" if spec.cap is None else f", c={spec.cap}"
    return f"alpha={spec.alpha}, beta={spec.beta}{cap}"


def objective_checks(instance: Instance, seed: int = 0) -> list[CheckResult]:
    f = instance.objective
    mode = "exhaustive" if f.n <= EXHAUSTIVE_LIMIT else "sampled"
    out = []
    for name, oracle in (("submodular f", f), ("submodular complement g", ComplementOracle(f))):
        res = validate_submodular(oracle, mode=mode, seed=seed)
        detail = f"{mode}, {res.checked} checks" if res.ok else f"violating (X, Y, e) = {_fmt(res.witness)}"
        out.append(CheckResult(name, res.ok, detail))
    return out


def _fmt(witness) -> str:
    if witness is None:
        return "-"
    return "(" + ", ".join(sorted_repr(w) for w in witness) + ")"


def sorted_repr(x) -> str:
    if isinstance(x, frozenset):
        return "{" + ", ".join(map(str, sorted(x))) + "}"
    return str(x)


def spec_checks(instance: Instance, spec: FairnessSpec, trials: int = 1000, seed: int = 0) -> list[CheckResult]:
    label = _spec_label(spec)
    if not feasibility_preconditions(instance, spec).feasible:
        return [CheckResult(f"[{label}] feasible spec", False, "lower bounds exceed the cap")]
    out = []
    b = group_bounds(instance, spec)
    sizes = instance.group_sizes
    if instance.n <= AXIOM_LIMIT:
        matroids = [("group caps", PartitionMatroid(instance.group_of, b.upper)),
                    ("complement caps", PartitionMatroid(instance.group_of, [s - lo for s, lo in zip(sizes, b.lower)]))]
        if spec.cap is not None:
            matroids.append(("fair-reduction", FairReductionMatroid(instance.group_of, b.upper, b.lower, spec.cap)))
        for name, m in matroids:
            res = check_matroid_axioms(m)
            detail = "axioms hold" if res.ok else f"{res.axiom} fails at {_fmt(res.witness)}"
            out.append(CheckResult(f"[{label}] matroid {name}", res.ok, detail))

    fair = brute_force(instance, spec, FAIR)
    flipped = brute_force(instance, spec, FLIPPED)
    relaxed = brute_force(instance, spec, RELAXED)
    flipped_relaxed = brute_force(instance, spec, FLIPPED_RELAXED)
    out.append(CheckResult(
        f"[{label}] complement duality", fair.opt_value == flipped.opt_value,
        f"OPT={fair.opt_value:g}, flipped OPT={flipped.opt_value:g}"))
    out.append(CheckResult(
        f"[{label}] relaxation dominance", relaxed.opt_value >= fair.opt_value - VALUE_TOL,
        f"relaxed {relaxed.opt_value:g} >= OPT {fair.opt_value:g}"))
    out.append(CheckResult(
        f"[{label}] flipped relaxation dominance", flipped_relaxed.opt_value >= flipped.opt_value - VALUE_TOL,
        f"{flipped_relaxed.opt_value:g} >= {flipped.opt_value:g}"))

    ratio = check_theorem_bound(instance, spec, trials=trials, seed=seed)
    out.append(CheckResult(
        f"[{label}] expected value bound (algorithm {route(spec)})", bool(ratio.passed),
        f"mean {ratio.mean:.4g} vs {ratio.bound:.4g}*OPT={ratio.bound * ratio.opt_value:.4g}, "
        f"stderr {ratio.stderr:.3g}, margin {ratio.margin:.4g}"))

    relaxed_solution = exact_solve(*relaxed_problem(instance, spec))
    prob = check_backup_probability(instance, spec, relaxed_solution, trials=max(trials, 2000), seed=seed)
    out.append(CheckResult(
        f"[{label}] backup inclusion probability", prob.passed,
        f"max frequency {prob.max_frequency:.4f} vs bound {prob.bound}"))
    return out


def verify_instance(
    instance: Instance, specs: Iterable[FairnessSpec] | None = None, trials: int = 1000, seed: int = 0,
    budget: int = BRUTE_FORCE_BUDGET,
) -> list[CheckResult]:
    if instance.n > min(budget, TABLE_LIMIT):
        raise ValueError(f"instance has n={instance.n}; verification budget is n <= {budget}")
    results = objective_checks(instance, seed)
    for spec in specs if specs is not None else default_specs(instance):
        results.extend(spec_checks(instance, spec, trials=trials, seed=seed))
    return results


def random_suite(count: int, nmax: int, seed: int, trials: int = 300) -> list[CheckResult]:
    """Seeded random instances, each verified under one spec per algorithm."""
    rng = np.random.default_rng(seed)
    results = []
    for k in range(count):
        m = int(rng.choice([2, 3]))
        n = int(rng.integers(max(2 * m, 4), nmax + 1))
        kind = "cut" if k % 2 == 0 else "table"
        inst = generate_instance(kind, n, m, float(rng.uniform(0.3, 0.8)), seed=int(rng.integers(2**31)))
        alpha_lo = Fraction(int(rng.integers(0, 3)), 4)
        alpha_hi = Fraction(int(rng.integers(3, 5)), 4)
        specs = []
        for a in (alpha_lo, alpha_hi):
            beta = max(a, Fraction(int(rng.integers(2, 5)), 4))
            specs.append(FairnessSpec(a, beta))
            need = sum(group_bounds(inst, FairnessSpec(a, beta)).lower)
            specs.append(FairnessSpec(a, beta, int(rng.integers(need, n + 1))))
        for r in verify_instance(inst, specs, trials=trials, seed=seed + k):
            results.append(CheckResult(f"#{k} {kind} n={n} {r.name}", r.passed, r.detail))
    return results
