"""Instances, fairness bounds and feasibility bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Iterable, Sequence

from .objectives import ComplementOracle, SubmodularOracle


class InfeasibleSpecError(ValueError):
    """Raised when no set satisfies the fairness bounds and the global cap."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def parse_fraction(text) -> Fraction:
    """Exact rational from ``"p/q"``, a decimal literal, an int or a Fraction.

    Floats are converted through their shortest repr, so ``0.3`` becomes
    ``3/10`` rather than the binary expansion.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise TypeError("booleans are not fractions")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(repr(text))
    return Fraction(str(text).strip())


def format_fraction(x: Fraction) -> str:
    return str(Fraction(x))


@dataclass(frozen=True)
class Instance:
    """Ground set ``0..n-1`` partitioned into ``m`` groups, plus an objective."""

    group_of: tuple[int, ...]
    objective: SubmodularOracle = field(compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "group_of", tuple(int(g) for g in self.group_of))
        n = len(self.group_of)
        if self.objective.n != n:
            raise ValueError(f"objective ground set has {self.objective.n} items, expected {n}")
        if n and min(self.group_of) < 0:
            raise ValueError("group indices must be nonnegative")
        m = max(self.group_of) + 1 if n else 0
        present = set(self.group_of)
        missing = [i for i in range(m) if i not in present]
        if missing:
            raise ValueError(f"groups {missing} are empty")

    @classmethod
    def from_groups(cls, groups: Sequence[Iterable[int]], objective: SubmodularOracle) -> "Instance":
        groups = [list(g) for g in groups]
        n = sum(len(g) for g in groups)
        group_of = [-1] * n
        for i, g in enumerate(groups):
            if not g:
                raise ValueError(f"group {i} is empty")
            for e in g:
                if not 0 <= e < n:
                    raise ValueError(f"item {e} out of range for n={n}")
                if group_of[e] != -1:
                    raise ValueError(f"item {e} appears in more than one group")
                group_of[e] = i
        return cls(tuple(group_of), objective)

    @property
    def n(self) -> int:
        return len(self.group_of)

    @property
    def m(self) -> int:
        return max(self.group_of) + 1 if self.group_of else 0

    @cached_property
    def groups(self) -> tuple[frozenset[int], ...]:
        out: list[list[int]] = [[] for _ in range(self.m)]
        for e, g in enumerate(self.group_of):
            out[g].append(e)
        return tuple(frozenset(g) for g in out)

    @cached_property
    def group_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.m
        for g in self.group_of:
            sizes[g] += 1
        return tuple(sizes)

    def counts(self, items: Iterable[int]) -> list[int]:
        c = [0] * self.m
        for e in items:
            c[self.group_of[e]] += 1
        return c


@dataclass(frozen=True)
class FairnessSpec:
    alpha: Fraction
    beta: Fraction
    cap: int | None = None

    def __post_init__(self):
        a, b = parse_fraction(self.alpha), parse_fraction(self.beta)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)
        if not (0 <= a <= 1 and 0 <= b <= 1):
            raise ValueError("alpha and beta must lie in [0, 1]")
        if a > b:
            raise ValueError(f"alpha={a} exceeds beta={b}")
        if self.cap is not None:
            if int(self.cap) != self.cap or self.cap < 0:
                raise ValueError("cap must be a nonnegative integer")
            object.__setattr__(self, "cap", int(self.cap))

    @property
    def high_alpha(self) -> bool:
        return self.alpha > Fraction(1, 2)

    def check_against(self, instance: Instance) -> None:
        if self.cap is not None and self.cap > instance.n:
            raise ValueError(f"cap {self.cap} exceeds n={instance.n}")


@dataclass(frozen=True)
class GroupBounds:
    lower: tuple[int, ...]
    upper: tuple[int, ...]

    def admits(self, counts: Sequence[int]) -> bool:
        return all(lo <= c <= hi for lo, c, hi in zip(self.lower, counts, self.upper))


@dataclass(frozen=True)
class Solution:
    members: frozenset[int]
    value: float


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    reason: str


def _floor_times(x: Fraction, k: int) -> int:
    # Fraction arithmetic keeps floor(x * k) exact.
    return (x.numerator * k) // x.denominator


@lru_cache(maxsize=1024)
def _bounds(sizes: tuple[int, ...], alpha: Fraction, beta: Fraction) -> GroupBounds:
    return GroupBounds(
        lower=tuple(_floor_times(alpha, s) for s in sizes),
        upper=tuple(_floor_times(beta, s) for s in sizes),
    )


def group_bounds(instance: Instance, spec: FairnessSpec) -> GroupBounds:
    return _bounds(instance.group_sizes, spec.alpha, spec.beta)


def flip(bounds: GroupBounds, sizes: Sequence[int]) -> GroupBounds:
    return GroupBounds(
        lower=tuple(s - u for s, u in zip(sizes, bounds.upper)),
        upper=tuple(s - lo for s, lo in zip(sizes, bounds.lower)),
    )


def flip_bounds(instance: Instance, spec: FairnessSpec) -> GroupBounds:
    """Per-group bounds a complement ``V \\ S`` must satisfy for ``S`` to be fair."""
    return flip(group_bounds(instance, spec), instance.group_sizes)


def is_fair(instance: Instance, spec: FairnessSpec, items: Iterable[int]) -> bool:
    items = set(items)
    if any(not 0 <= e < instance.n for e in items):
        raise ValueError("set contains items outside the ground set")
    if spec.cap is not None and len(items) > spec.cap:
        return False
    return group_bounds(instance, spec).admits(instance.counts(items))


def complement_oracle(objective: SubmodularOracle) -> ComplementOracle:
    return ComplementOracle(objective)


def feasibility_preconditions(instance: Instance, spec: FairnessSpec) -> Feasibility:
    if spec.cap is None:
        return Feasibility(True, "no global cap; taking each group's lower bound is feasible")
    need = sum(group_bounds(instance, spec).lower)
    if need > spec.cap:
        return Feasibility(False, f"group lower bounds need {need} items but cap is {spec.cap}")
    return Feasibility(True, f"group lower bounds need {need} <= cap {spec.cap}")


def require_feasible(instance: Instance, spec: FairnessSpec) -> None:
    spec.check_against(instance)
    check = feasibility_preconditions(instance, spec)
    if not check.feasible:
        raise InfeasibleSpecError(check.reason)
