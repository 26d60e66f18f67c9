from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairsub.model import (
    FairnessSpec,
    GroupBounds,
    InfeasibleSpecError,
    Instance,
    complement_oracle,
    feasibility_preconditions,
    flip,
    flip_bounds,
    format_fraction,
    group_bounds,
    is_fair,
    parse_fraction,
    require_feasible,
)
from fairsub.objectives import CutOracle, TableOracle

from .conftest import REF_EDGES, all_subsets, naive_bounds, naive_cut


def _zero_instance(sizes):
    groups, k = [], 0
    for s in sizes:
        groups.append(list(range(k, k + s)))
        k += s
    return Instance.from_groups(groups, CutOracle(k, []))


@pytest.mark.parametrize(
    "alpha, beta, size, lower, upper",
    [
        (Fraction(1, 2), Fraction(1), 5, 2, 5),
        (Fraction(0), Fraction(1), 7, 0, 7),
        (Fraction(1, 3), Fraction(1, 3), 6, 2, 2),
        (Fraction(51, 100), Fraction(3, 4), 4, 2, 3),
    ],
)
def test_group_bounds_examples(alpha, beta, size, lower, upper):
    b = group_bounds(_zero_instance([size]), FairnessSpec(alpha, beta))
    assert b == GroupBounds((lower,), (upper,))


def test_bounds_are_exact_at_float_edges():
    # 0.1 * 30 is 3.0000000000000004 in floats and 0.7 * 10 is 7.000000000000001
    inst = _zero_instance([30, 10])
    assert group_bounds(inst, FairnessSpec(parse_fraction("0.1"), Fraction(1))).lower == (3, 1)
    assert group_bounds(inst, FairnessSpec(parse_fraction("0.7"), Fraction(1))).lower == (21, 7)


@given(
    st.lists(st.integers(1, 9), min_size=1, max_size=4),
    st.fractions(0, 1, max_denominator=12),
    st.fractions(0, 1, max_denominator=12),
)
def test_bounds_match_naive_floor(sizes, a, b):
    alpha, beta = min(a, b), max(a, b)
    inst = _zero_instance(sizes)
    lo, hi = naive_bounds([list(g) for g in inst.groups], alpha, beta)
    got = group_bounds(inst, FairnessSpec(alpha, beta))
    assert list(got.lower) == lo and list(got.upper) == hi
    assert all(l <= u for l, u in zip(got.lower, got.upper))


def test_is_fair_examples(ref_instance):
    spec = FairnessSpec(Fraction(1, 2), Fraction(1))
    assert is_fair(ref_instance, spec, {0, 2})
    assert not is_fair(ref_instance, spec, {0, 1})
    assert not is_fair(ref_instance, FairnessSpec(Fraction(1, 2), Fraction(1), cap=1), {0, 2})


def test_flip_examples():
    assert flip(GroupBounds((2,), (5,)), (5,)) == GroupBounds((0,), (3,))
    assert flip(GroupBounds((4,), (4,)), (4,)) == GroupBounds((0,), (0,))


@given(st.lists(st.integers(1, 9), min_size=1, max_size=4), st.fractions(0, 1, max_denominator=10))
def test_flip_is_involution(sizes, alpha):
    inst = _zero_instance(sizes)
    spec = FairnessSpec(alpha, Fraction(1))
    b = group_bounds(inst, spec)
    assert flip(flip(b, inst.group_sizes), inst.group_sizes) == b
    assert flip_bounds(inst, spec) == flip(b, inst.group_sizes)


@pytest.mark.parametrize(
    "alpha, beta",
    [(Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(3, 4)), (Fraction(3, 5), Fraction(1)), (0, 1)],
)
def test_fair_iff_complement_flipped_feasible(alpha, beta):
    # every subset of a 2+3+4 partition: S fair exactly when V \ S meets the flipped bounds
    inst = _zero_instance([2, 3, 4])
    spec = FairnessSpec(Fraction(alpha), Fraction(beta))
    fb = flip_bounds(inst, spec)
    V = frozenset(range(inst.n))
    for S in all_subsets(inst.n):
        assert is_fair(inst, spec, S) == fb.admits(inst.counts(V - S))


def test_reference_biconditional(ref_instance):
    spec = FairnessSpec(Fraction(1, 2), Fraction(1, 2))
    V = frozenset(range(4))
    fb = flip_bounds(ref_instance, spec)
    assert is_fair(ref_instance, spec, {0, 2}) and fb.admits(ref_instance.counts(V - {0, 2}))
    agree = sum(is_fair(ref_instance, spec, S) == fb.admits(ref_instance.counts(V - S)) for S in all_subsets(4))
    assert agree == 16


def test_complement_oracle_examples(ref_oracle):
    g = complement_oracle(ref_oracle)
    V = range(4)
    assert g.value([]) == ref_oracle.value(V)
    assert g.value(V) == ref_oracle.value([])
    assert g.value({1, 3}) == naive_cut(REF_EDGES, {0, 2}) == 2


@pytest.mark.parametrize("cap, feasible", [(3, False), (4, True), (None, True)])
def test_feasibility_preconditions(cap, feasible):
    inst = _zero_instance([4, 4])
    spec = FairnessSpec(Fraction(1, 2), Fraction(1), cap)
    res = feasibility_preconditions(inst, spec)
    assert res.feasible is feasible
    if not feasible:
        assert "4" in res.reason and "3" in res.reason
        with pytest.raises(InfeasibleSpecError):
            require_feasible(inst, spec)


@pytest.mark.parametrize(
    "kwargs",
    [dict(alpha=Fraction(3, 4), beta=Fraction(1, 2)), dict(alpha=Fraction(-1, 2), beta=Fraction(1)),
     dict(alpha=Fraction(0), beta=Fraction(3, 2)), dict(alpha=Fraction(0), beta=Fraction(1), cap=-1)],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        FairnessSpec(**kwargs)


def test_cap_beyond_n_rejected(ref_instance):
    with pytest.raises(ValueError):
        FairnessSpec(Fraction(0), Fraction(1), cap=5).check_against(ref_instance)


def test_instance_validation():
    with pytest.raises(ValueError):
        Instance((0, 2), CutOracle(2, []))  # group 1 empty
    with pytest.raises(ValueError):
        Instance((0, 0, 1), CutOracle(2, []))  # size mismatch
    inst = Instance.from_groups([[1, 3], [0, 2]], TableOracle([0.0] * 16))
    assert inst.group_of == (1, 0, 1, 0) and inst.m == 2


@pytest.mark.parametrize(
    "text, value",
    [("0.5", Fraction(1, 2)), ("1/3", Fraction(1, 3)), ("0.51", Fraction(51, 100)), (0.1, Fraction(1, 10)), ("1", 1)],
)
def test_parse_fraction(text, value):
    assert parse_fraction(text) == value


def test_format_fraction():
    assert format_fraction(Fraction(1, 3)) == "1/3"
    assert format_fraction(Fraction(1)) == "1"
