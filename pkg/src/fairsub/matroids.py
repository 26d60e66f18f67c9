"""Group-structured matroids and an exhaustive axiom checker.

Both matroid families here are defined through per-group counts
``|S & V_i|``, so independence tests, vectorized enumeration and the
"which groups can still grow" query all work on count vectors.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .objectives import all_masks, from_mask, to_mask


class GroupMatroid:
    """Shared machinery for matroids defined by per-group counts."""

    def __init__(self, group_of: Sequence[int], m: int | None = None):
        self.group_of = np.asarray(group_of, dtype=np.int64)
        self.n = int(self.group_of.shape[0])
        self.m = int(m if m is not None else (self.group_of.max() + 1 if self.n else 0))
        self.group_sizes = np.bincount(self.group_of, minlength=self.m)
        self._group_masks = np.array(
            [to_mask(np.flatnonzero(self.group_of == i)) for i in range(self.m)], dtype=np.int64
        )
        self._rank: int | None = None

    def counts(self, items: Iterable[int]) -> np.ndarray:
        idx = np.fromiter((int(e) for e in items), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= self.n):
            raise ValueError("set contains items outside the ground set")
        return np.bincount(self.group_of[idx], minlength=self.m)

    def is_independent(self, items: Iterable[int]) -> bool:
        return bool(self.admits_counts(self.counts(items)))

    def admits_counts(self, counts: np.ndarray) -> bool:
        raise NotImplementedError

    def growable_groups(self, counts: np.ndarray) -> np.ndarray:
        """Boolean per group: can one more item of that group be added?"""
        raise NotImplementedError

    def addable(self, x: np.ndarray) -> np.ndarray:
        """Items outside the indicator ``x`` whose addition stays independent."""
        counts = np.bincount(self.group_of[x], minlength=self.m)
        return self.growable_groups(counts)[self.group_of] & ~x

    def _admits_count_matrix(self, counts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def independent_masks(self, masks: np.ndarray) -> np.ndarray:
        counts = np.stack([np.bitwise_count(masks & gm) for gm in self._group_masks], axis=-1)
        return self._admits_count_matrix(counts.astype(np.int64))

    def rank(self) -> int:
        if self._rank is None:
            self._rank = len(self.extend_to_basis(()))
        return self._rank

    def extend_to_basis(self, items: Iterable[int]) -> frozenset[int]:
        """Greedily extend an independent set in index order."""
        x = np.zeros(self.n, dtype=bool)
        x[list(items)] = True
        counts = np.bincount(self.group_of[x], minlength=self.m)
        if not self.admits_counts(counts):
            raise ValueError("starting set is not independent")
        for e in range(self.n):
            if not x[e] and self.growable_groups(counts)[self.group_of[e]]:
                x[e] = True
                counts[self.group_of[e]] += 1
        return frozenset(np.flatnonzero(x).tolist())


class PartitionMatroid(GroupMatroid):
    """``S`` independent iff ``|S & V_i| <= caps[i]`` for every group."""

    def __init__(self, group_of: Sequence[int], caps: Sequence[int]):
        super().__init__(group_of, m=len(caps))
        self.caps = np.asarray(caps, dtype=np.int64)
        if np.any(self.caps < 0):
            raise ValueError("caps must be nonnegative")

    def admits_counts(self, counts):
        return bool(np.all(counts <= self.caps))

    def growable_groups(self, counts):
        return counts < self.caps

    def _admits_count_matrix(self, counts):
        return np.all(counts <= self.caps, axis=-1)

    def rank(self) -> int:
        return int(np.minimum(self.caps, self.group_sizes).sum())

    def __repr__(self):
        return f"PartitionMatroid(caps={self.caps.tolist()})"


class FairReductionMatroid(GroupMatroid):
    """Per-group caps plus a global budget in which every group reserves its
    floor: ``sum_i max(lower_i, |S & V_i|) <= cap``.
    """

    def __init__(self, group_of: Sequence[int], upper: Sequence[int], lower: Sequence[int], cap: int):
        super().__init__(group_of, m=len(upper))
        self.upper = np.asarray(upper, dtype=np.int64)
        self.lower = np.asarray(lower, dtype=np.int64)
        self.cap = int(cap)
        if self.lower.shape != self.upper.shape:
            raise ValueError("lower and upper must have one entry per group")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound exceeds upper bound")
        # Without this the empty set is dependent and the system is not a matroid.
        if int(self.lower.sum()) > self.cap:
            raise ValueError(f"sum of lower bounds {int(self.lower.sum())} exceeds cap {self.cap}")

    def _reserved(self, counts):
        return np.maximum(self.lower, counts).sum(axis=-1)

    def admits_counts(self, counts):
        return bool(np.all(counts <= self.upper) and self._reserved(counts) <= self.cap)

    def growable_groups(self, counts):
        slack = self.cap - int(self._reserved(counts))
        return (counts < self.upper) & ((counts < self.lower) | (slack >= 1))

    def _admits_count_matrix(self, counts):
        return np.all(counts <= self.upper, axis=-1) & (self._reserved(counts) <= self.cap)

    def __repr__(self):
        return (
            f"FairReductionMatroid(upper={self.upper.tolist()}, lower={self.lower.tolist()}, "
            f"cap={self.cap})"
        )


class SetSystem:
    """Arbitrary independence predicate; used to exercise the axiom checker."""

    def __init__(self, n: int, predicate: Callable[[frozenset[int]], bool]):
        self.n = n
        self.predicate = predicate

    def is_independent(self, items):
        return bool(self.predicate(frozenset(items)))


@dataclass(frozen=True)
class AxiomCheck:
    ok: bool
    axiom: str | None = None
    witness: tuple[frozenset[int], ...] | None = None


def check_matroid_axioms(matroid, n: int | None = None) -> AxiomCheck:
    """Exhaustively test the matroid axioms on a ground set of ``n <= 10``.

    Exchange is tested on every pair of independent sets with
    ``|Y| = |X| + 1``; together with downward closure this implies the
    general exchange property. The exchange failure is reported first.
    """
    n = matroid.n if n is None else n
    if n > 10:
        raise ValueError("exhaustive axiom check supports n <= 10")
    masks = all_masks(n)
    if isinstance(matroid, GroupMatroid):
        indep = matroid.independent_masks(masks)
    else:
        indep = np.array([matroid.is_independent(from_mask(int(m))) for m in masks], dtype=bool)
    if not indep[0]:
        return AxiomCheck(False, "empty-set", (frozenset(),))
    sizes = np.bitwise_count(masks)
    ind_masks = masks[indep]
    ind_sizes = sizes[indep]
    ind_set = np.zeros(masks.shape[0], dtype=bool)
    ind_set[ind_masks] = True
    bits = np.int64(1) << np.arange(n, dtype=np.int64)

    for x in ind_masks:
        k = int(np.bitwise_count(x))
        ys = ind_masks[ind_sizes == k + 1]
        if ys.size == 0:
            continue
        # items whose addition to x stays independent
        ext = 0
        for b in bits:
            if not x & b and ind_set[x | b]:
                ext |= int(b)
        bad = ((ys & ~x) & ext) == 0
        if np.any(bad):
            y = int(ys[np.flatnonzero(bad)[0]])
            return AxiomCheck(False, "exchange", (from_mask(int(x)), from_mask(y)))

    for y in ind_masks:
        for b in bits:
            if y & b and not ind_set[y & ~b]:
                return AxiomCheck(False, "downward-closure", (from_mask(int(y)), from_mask(int(y & ~b))))
    return AxiomCheck(True)
