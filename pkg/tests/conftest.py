import itertools
from fractions import Fraction
from math import floor

import pytest

from fairsub.model import Instance
from fairsub.objectives import CutOracle

REF_EDGES = [(0, 2, 1.0), (1, 3, 1.0), (0, 1, 2.0)]
REF_GROUPS = [[0, 1], [2, 3]]


def naive_cut(edges, S):
    """Independent cut evaluation: walk the edge list."""
    S = set(S)
    return sum(w for u, v, w in edges if (u in S) != (v in S))


def all_subsets(n):
    for k in range(n + 1):
        for c in itertools.combinations(range(n), k):
            yield frozenset(c)


def naive_bounds(groups, alpha, beta):
    alpha, beta = Fraction(alpha), Fraction(beta)
    return ([floor(alpha * len(g)) for g in groups], [floor(beta * len(g)) for g in groups])


def naive_is_fair(groups, alpha, beta, S, cap=None):
    lo, hi = naive_bounds(groups, alpha, beta)
    if cap is not None and len(S) > cap:
        return False
    return all(lo[i] <= len(set(S) & set(g)) <= hi[i] for i, g in enumerate(groups))


def naive_opt(value, groups, alpha, beta, cap=None):
    """Best value over fair subsets by plain enumeration."""
    n = sum(len(g) for g in groups)
    best = None
    for S in all_subsets(n):
        if naive_is_fair(groups, alpha, beta, S, cap):
            v = value(S)
            if best is None or v > best:
                best = v
    return best


@pytest.fixture
def ref_oracle():
    return CutOracle(4, REF_EDGES)


@pytest.fixture
def ref_instance(ref_oracle):
    return Instance.from_groups(REF_GROUPS, ref_oracle)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
