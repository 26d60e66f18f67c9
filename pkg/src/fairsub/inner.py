"""Solvers for submodular maximization under a single group matroid.

These play the role of the black-box inner algorithm the fairness wrappers
call. ``exact`` enumerates (approximation ratio 1, small n only);
``local-search`` and ``random-greedy`` are heuristics for larger instances.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .matroids import GroupMatroid
from .objectives import TABLE_LIMIT, VALUE_TOL, SubmodularOracle, all_masks, from_mask, to_mask

# Gains closer than this are treated as ties and broken by item index.
TIE_TOL = 1e-12


def _lexicographic_min(masks: np.ndarray) -> int:
    """Mask whose sorted item tuple is lexicographically smallest."""
    prefix = 0
    cands = masks
    while True:
        if np.any(cands == prefix):
            return prefix
        rest = cands & ~np.int64(prefix)
        low = rest & -rest
        nxt = low.min()
        cands = cands[low == nxt]
        prefix |= int(nxt)


def exact_solve(oracle: SubmodularOracle, matroid: GroupMatroid, rng=None) -> frozenset[int]:
    """Maximize over every independent set; ties go to the lexicographically
    smallest maximizer."""
    n = oracle.n
    if n > TABLE_LIMIT:
        raise ValueError(f"exact solver enumerates 2**n sets; n={n} exceeds {TABLE_LIMIT}")
    masks = all_masks(n)
    indep = matroid.independent_masks(masks)
    cand = masks[indep]
    vals = oracle.table()[cand]
    best = vals.max()
    return from_mask(_lexicographic_min(cand[vals >= best - VALUE_TOL]))


def local_search_solve(
    oracle: SubmodularOracle,
    matroid: GroupMatroid,
    rng: np.random.Generator | None = None,
    epsilon: float = 1e-4,
) -> frozenset[int]:
    """Approximate local optimum under add, drop and swap moves.

    Starts from the best addable singleton (ties broken by a random order) and
    applies the best move while it improves the value by more than a factor
    ``1 + epsilon``.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    rng = np.random.default_rng() if rng is None else rng
    n = oracle.n
    x = np.zeros(n, dtype=bool)
    current = oracle.value_mask(0)

    order = rng.permutation(n)
    gains = oracle.marginals(x)
    addable = matroid.addable(x)
    start, start_val = -1, current
    for e in order:
        if addable[e] and current + gains[e] > start_val + TIE_TOL:
            start, start_val = int(e), current + gains[e]
    if start >= 0:
        x[start] = True
        current = oracle.value_mask(1 << start)

    while True:
        threshold = (1.0 + epsilon) * current + TIE_TOL
        best_val, best_move = threshold, None
        m = oracle.marginals(x)
        addable = matroid.addable(x)
        for e in np.flatnonzero(addable):
            if current + m[e] > best_val:
                best_val, best_move = current + m[e], (None, int(e))
        for e in np.flatnonzero(x):
            if current - m[e] > best_val:
                best_val, best_move = current - m[e], (int(e), None)
        mask = to_mask(np.flatnonzero(x))
        counts = np.bincount(matroid.group_of[x], minlength=matroid.m)
        for a in np.flatnonzero(x):
            counts[matroid.group_of[a]] -= 1
            grow = matroid.growable_groups(counts)
            base = mask & ~(1 << int(a))
            for b in np.flatnonzero(~x):
                if not grow[matroid.group_of[b]]:
                    continue
                v = oracle.value_mask(base | (1 << int(b)))
                if v > best_val:
                    best_val, best_move = v, (int(a), int(b))
            counts[matroid.group_of[a]] += 1
        if best_move is None:
            break
        drop, add = best_move
        if drop is not None:
            x[drop] = False
        if add is not None:
            x[add] = True
        current = oracle.value_mask(to_mask(np.flatnonzero(x)))
    return frozenset(np.flatnonzero(x).tolist())


def random_greedy_solve(
    oracle: SubmodularOracle,
    matroid: GroupMatroid,
    rng: np.random.Generator | None = None,
) -> frozenset[int]:
    """Randomized greedy: repeatedly add an item drawn uniformly from the
    ``k`` best positive-gain feasible additions, ``k`` being the remaining
    rank budget (at least 1)."""
    rng = np.random.default_rng() if rng is None else rng
    n = oracle.n
    x = np.zeros(n, dtype=bool)
    rank = matroid.rank()
    idx = np.arange(n)
    group_of = matroid.group_of
    counts = np.zeros(matroid.m, dtype=np.int64)
    size = 0
    while True:
        gains = oracle.marginals(x)
        ok = matroid.growable_groups(counts)[group_of] & ~x & (gains > TIE_TOL)
        cand = idx[ok]
        if cand.size == 0:
            break
        # sort by gain (snapped to the tie tolerance) descending, then index
        key = np.rint(gains[cand] / TIE_TOL)
        order = cand[np.lexsort((cand, -key))]
        k = max(1, rank - size)
        pick = order[int(rng.integers(min(k, order.size)))]
        x[pick] = True
        counts[group_of[pick]] += 1
        size += 1
    return frozenset(np.flatnonzero(x).tolist())


@dataclass(frozen=True)
class InnerSolver:
    name: str
    declared_gamma: float | None  # None for heuristics without a proven ratio
    deterministic: bool
    solve: Callable[..., frozenset[int]]


SOLVERS: dict[str, InnerSolver] = {
    "exact": InnerSolver("exact", 1.0, True, exact_solve),
    "local-search": InnerSolver("local-search", None, False, local_search_solve),
    "random-greedy": InnerSolver("random-greedy", None, False, random_greedy_solve),
}


def get_solver(name: str) -> InnerSolver:
    try:
        return SOLVERS[name]
    except KeyError:
        raise ValueError(f"unknown inner solver {name!r}; choose from {sorted(SOLVERS)}") from None
