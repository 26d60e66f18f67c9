"""Set-function oracles.

Subsets are passed around as iterables of item indices and stored internally
as integer bitmasks (item ``k`` <-> bit ``k``). Every oracle keeps a query
counter so reports can expose how many evaluations a run needed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

# Absolute tolerance used when comparing objective values.
VALUE_TOL = 1e-9

EXHAUSTIVE_LIMIT = 12
TABLE_LIMIT = 20


def to_mask(items: Iterable[int]) -> int:
    mask = 0
    for e in items:
        mask |= 1 << int(e)
    return mask


def from_mask(mask: int) -> frozenset[int]:
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return frozenset(out)


def mask_to_indicator(mask: int, n: int) -> np.ndarray:
    return ((mask >> np.arange(n)) & 1).astype(bool)


def all_masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


class SubmodularOracle:
    """Base class for nonnegative set functions over items ``0..n-1``.

    Subclasses implement ``_value(mask)``; they may override ``_marginals``
    and ``_table`` with vectorized versions.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("ground set size must be nonnegative")
        self.n = n
        self.calls = 0
        self._table_cache: np.ndarray | None = None

    @property
    def ground_mask(self) -> int:
        return (1 << self.n) - 1

    def _tick(self, k: int = 1) -> None:
        self.calls += k

    def reset_calls(self) -> None:
        self.calls = 0

    def value(self, items: Iterable[int]) -> float:
        self._tick()
        return float(self._value(to_mask(items)))

    __call__ = value

    def value_mask(self, mask: int) -> float:
        self._tick()
        return float(self._value(mask))

    def marginal(self, e: int, items: Iterable[int]) -> float:
        """``f(S + e) - f(S)``."""
        mask = to_mask(items)
        return self.value_mask(mask | (1 << e)) - self.value_mask(mask)

    def marginals(self, x: np.ndarray) -> np.ndarray:
        """Per-item ``f(S + e) - f(S - e)`` for the set with indicator ``x``.

        For ``e`` outside S this is the gain of adding ``e``; for ``e`` inside
        S it is the loss incurred by dropping it. Counts as one query per item.
        """
        self._tick(self.n)
        return self._marginals(np.asarray(x, dtype=bool))

    def _marginals(self, x: np.ndarray) -> np.ndarray:
        mask = to_mask(np.flatnonzero(x))
        out = np.empty(self.n)
        for e in range(self.n):
            bit = 1 << e
            out[e] = self._value(mask | bit) - self._value(mask & ~bit)
        return out

    def table(self) -> np.ndarray:
        """Values of all ``2**n`` subsets indexed by bitmask (cached)."""
        if self.n > TABLE_LIMIT:
            raise ValueError(f"table enumeration needs n <= {TABLE_LIMIT}, got {self.n}")
        if self._table_cache is None:
            self._tick(1 << self.n)
            t = np.asarray(self._table(), dtype=float)
            t.setflags(write=False)
            self._table_cache = t
        return self._table_cache

    def _table(self) -> np.ndarray:
        return np.array([self._value(m) for m in range(1 << self.n)])

    def _value(self, mask: int) -> float:
        raise NotImplementedError


class CutOracle(SubmodularOracle):
    """Weighted cut function of an undirected graph."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]]):
        super().__init__(n)
        edge_list = []
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if not w >= 0:
                raise ValueError(f"negative edge weight {w}")
            edge_list.append((u, v, w))
        self.edges: tuple[tuple[int, int, float], ...] = tuple(edge_list)
        W = np.zeros((n, n))
        for u, v, w in edge_list:
            W[u, v] += w
            W[v, u] += w
        self._W = W
        self._deg = W.sum(axis=1)

    def _value(self, mask: int) -> float:
        total = 0.0
        for u, v, w in self.edges:
            if ((mask >> u) ^ (mask >> v)) & 1:
                total += w
        return total

    def _marginals(self, x: np.ndarray) -> np.ndarray:
        return self._deg - 2.0 * (self._W @ x.astype(float))

    def _table(self) -> np.ndarray:
        masks = all_masks(self.n)
        out = np.zeros(masks.shape[0])
        for u, v in zip(*np.nonzero(np.triu(self._W))):
            out += self._W[u, v] * (((masks >> u) ^ (masks >> v)) & 1)
        return out


class TableOracle(SubmodularOracle):
    """Set function given explicitly by its value on every bitmask."""

    def __init__(self, values, validate: bool = True, seed: int = 0):
        arr = np.asarray(values, dtype=float)
        n = int(arr.shape[0]).bit_length() - 1
        if arr.ndim != 1 or arr.shape[0] != 1 << n:
            raise ValueError("table length must be a power of two")
        if n > TABLE_LIMIT:
            raise ValueError(f"table oracles support n <= {TABLE_LIMIT}")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("table values must be finite and nonnegative")
        super().__init__(n)
        arr = arr.copy()
        arr.setflags(write=False)
        self.values = arr
        if validate:
            mode = "exhaustive" if n <= EXHAUSTIVE_LIMIT else "sampled"
            check = validate_submodular(self, mode=mode, seed=seed)
            self.calls = 0
            if not check.ok:
                raise ValueError(f"table is not submodular: {check.witness}")

    @classmethod
    def from_function(cls, n: int, fn: Callable[[frozenset[int]], float], **kwargs) -> "TableOracle":
        return cls([fn(from_mask(m)) for m in range(1 << n)], **kwargs)

    def _value(self, mask: int) -> float:
        return self.values[mask]

    def _marginals(self, x: np.ndarray) -> np.ndarray:
        mask = to_mask(np.flatnonzero(x))
        bits = np.int64(1) << np.arange(self.n, dtype=np.int64)
        return self.values[mask | bits] - self.values[mask & ~bits]

    def _table(self) -> np.ndarray:
        return self.values


class ComplementOracle(SubmodularOracle):
    """``g(T) = f(U \\ T)`` for a base oracle ``f`` and universe ``U``.

    With the default universe (the whole ground set) this is the plain
    complement. Items outside ``U`` do not affect ``g``. Queries are counted
    on the base oracle.
    """

    def __init__(self, base: SubmodularOracle, universe: Iterable[int] | None = None):
        self.base = base
        self.n = base.n
        self._table_cache = None
        self.universe_mask = base.ground_mask if universe is None else to_mask(universe)
        self._in_universe = mask_to_indicator(self.universe_mask, self.n)

    @property
    def calls(self) -> int:
        return self.base.calls

    @calls.setter
    def calls(self, value: int) -> None:
        self.base.calls = value

    def _tick(self, k: int = 1) -> None:
        self.base._tick(k)

    def _value(self, mask: int) -> float:
        return self.base._value(self.universe_mask & ~mask)

    def _marginals(self, x: np.ndarray) -> np.ndarray:
        rest = self._in_universe & ~x
        return np.where(self._in_universe, -self.base._marginals(rest), 0.0)

    def _table(self) -> np.ndarray:
        masks = all_masks(self.n)
        return self.base.table()[self.universe_mask & ~masks]


@dataclass(frozen=True)
class SubmodularityCheck:
    ok: bool
    witness: tuple[frozenset[int], frozenset[int], int] | None = None
    checked: int = 0


def validate_submodular(
    oracle: SubmodularOracle,
    mode: str = "exhaustive",
    trials: int = 2000,
    seed: int = 0,
    tol: float = VALUE_TOL,
) -> SubmodularityCheck:
    """Search for a triple ``(X, Y, e)`` with ``X <= Y``, ``e not in Y`` and
    ``f(e|Y) > f(e|X)``.

    Exhaustive mode uses the equivalent pairwise form
    ``f(S+i) + f(S+j) >= f(S+i+j) + f(S)``, which holds for all ``S`` and
    ``i, j not in S`` iff ``f`` is submodular; a violation there is reported as
    the triple ``(S, S+j, i)``. Sampled mode draws random triples directly.
    """
    n = oracle.n
    if mode == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise ValueError(f"exhaustive check needs n <= {EXHAUSTIVE_LIMIT}")
        t = oracle.table()
        masks = all_masks(n)
        checked = 0
        for i in range(n):
            bi = 1 << i
            for j in range(n):
                if j == i:
                    continue
                bj = 1 << j
                base = masks[(masks & (bi | bj)) == 0]
                checked += base.shape[0]
                gap = t[base | bi] + t[base | bj] - t[base | bi | bj] - t[base]
                bad = np.flatnonzero(gap < -tol)
                if bad.size:
                    s = int(base[bad[0]])
                    return SubmodularityCheck(False, (from_mask(s), from_mask(s | bj), i), checked)
        return SubmodularityCheck(True, None, checked)
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if n < 2:
        return SubmodularityCheck(True, None, 0)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        e = int(rng.integers(n))
        y = rng.random(n) < rng.random()
        y[e] = False
        x = y & (rng.random(n) < rng.random())
        xm, ym = to_mask(np.flatnonzero(x)), to_mask(np.flatnonzero(y))
        bit = 1 << e
        gain_y = oracle.value_mask(ym | bit) - oracle.value_mask(ym)
        gain_x = oracle.value_mask(xm | bit) - oracle.value_mask(xm)
        if gain_y > gain_x + tol:
            return SubmodularityCheck(False, (from_mask(xm), from_mask(ym), e), trials)
    return SubmodularityCheck(True, None, trials)


def make_random_cut_instance(
    n: int,
    edge_probability: float,
    weight_range: tuple[float, float] = (1.0, 1.0),
    seed: int | None = None,
) -> CutOracle:
    """Erdos-Renyi graph with uniform edge weights in ``weight_range``."""
    if n < 2:
        raise ValueError("need at least two nodes")
    if not 0.0 <= edge_probability <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    lo, hi = weight_range
    if lo < 0 or hi < lo:
        raise ValueError("weight range must satisfy 0 <= lo <= hi")
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < edge_probability:
                w = lo if hi == lo else float(rng.uniform(lo, hi))
                edges.append((u, v, w))
    return CutOracle(n, edges)


def make_random_table_oracle(n: int, seed: int | None = None, offset: float = 1.0) -> TableOracle:
    """Random non-monotone submodular table with ``f(empty) >= offset``.

    Weighted coverage minus a modular cost, shifted so the minimum equals
    ``offset``.
    """
    rng = np.random.default_rng(seed)
    universe = max(2 * n, 4)
    weights = rng.uniform(0.5, 2.0, size=universe)
    covers = rng.random((n, universe)) < 0.3
    costs = rng.uniform(0.0, 1.5, size=n)
    masks = all_masks(n)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(bool)
    covered = (bits.astype(np.int64) @ covers.astype(np.int64)) > 0
    raw = covered.astype(float) @ weights - bits.astype(float) @ costs
    raw = raw - raw.min() + offset
    return TableOracle(raw, validate=False)


def make_coverage_oracle(n: int, seed: int | None = None) -> TableOracle:
    """Random weighted coverage function (monotone submodular)."""
    rng = np.random.default_rng(seed)
    universe = max(2 * n, 4)
    weights = rng.uniform(0.5, 2.0, size=universe)
    covers = rng.random((n, universe)) < 0.3
    masks = all_masks(n)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)
    covered = (bits @ covers.astype(np.int64)) > 0
    return TableOracle(covered.astype(float) @ weights, validate=False)
