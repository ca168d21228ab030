import pytest
from hypothesis import given, settings, strategies as st

from unraveling.payoff import (
    Closed,
    ClosedSpec,
    ClosedUnion,
    Open,
    closed_spec_from_decided,
    complement_spec,
    decided_by_depth,
    meets_payoff,
    realize,
)
from unraveling.randgen import random_closed_spec, random_tree, rng_for

import oracles


def leaves_with(tree, predicate):
    return frozenset(l for l in tree.full_depth_plays() if predicate(l))


# ---------------------------------------------------------------- realize


def test_realize_single_generator(ex1):
    assert realize(ex1, Closed(ClosedSpec([(1,)]))) == leaves_with(ex1, lambda l: l[0] == 0)


def test_realize_empty_generators_is_everything(ex1, ex2):
    for tree in (ex1, ex2):
        assert realize(tree, Closed(ClosedSpec())) == frozenset(tree.full_depth_plays())


def test_realize_union_of_complementary_halves(ex1):
    union = ClosedUnion([ClosedSpec([(1,)]), ClosedSpec([(0,)])])
    assert realize(ex1, union) == frozenset(ex1.full_depth_plays())
    assert len(realize(ex1, union)) == 16


def test_realize_rejects_bad_generators(ex1, ex2):
    with pytest.raises(ValueError, match="not in tree"):
        realize(ex1, Closed(ClosedSpec([(5,)])))
    with pytest.raises(ValueError, match="depth range"):
        realize(ex1, Closed(ClosedSpec([(0, 0, 0, 0)])))
    with pytest.raises(ValueError, match="terminal"):
        realize(ex2, Closed(ClosedSpec([(0, 0)])))


def test_closed_open_partition(ex1):
    spec = ClosedSpec([(1,)])
    closed, opened = realize(ex1, Closed(spec)), realize(ex1, Open(spec))
    assert closed | opened == frozenset(ex1.full_depth_plays())
    assert not closed & opened
    assert len(closed) == len(opened) == 8


# ----------------------------------------------------------- complement


def test_complement_spec_flips_and_involutes(ex1):
    spec = Closed(ClosedSpec([(1,)]))
    assert complement_spec(spec) == Open(ClosedSpec([(1,)]))
    assert complement_spec(complement_spec(spec)) == spec
    empty = Closed(ClosedSpec())
    assert realize(ex1, complement_spec(empty)) == frozenset()


def test_complement_spec_rejects_union():
    with pytest.raises(ValueError, match="not representable"):
        complement_spec(ClosedUnion([ClosedSpec()]))


# ---------------------------------------------------------- meets_payoff


def test_meets_payoff_examples(ex1):
    payoff = leaves_with(ex1, lambda l: l[0] == 0)
    assert meets_payoff(ex1, (0,), payoff)
    assert not meets_payoff(ex1, (1,), payoff)
    everything = frozenset(ex1.full_depth_plays())
    for position in ex1.positions():
        assert meets_payoff(ex1, position, everything)


def test_meets_payoff_vacuous_below_taboo(ex2):
    assert not meets_payoff(ex2, (0, 0), frozenset(ex2.full_depth_plays()))


@given(st.integers(0, 500))
@settings(max_examples=50, deadline=None)
def test_meets_payoff_matches_leaf_walk_oracle(seed):
    rng = rng_for(f"meets:{seed}")
    tree = random_tree(rng, depth=4, branching=3, taboos=2)
    payoff = realize(tree, Closed(random_closed_spec(rng, tree)))
    for position in tree.positions():
        assert meets_payoff(tree, position, payoff) == oracles.meets_by_leaf_walk(
            tree, position, payoff
        )


# -------------------------------------------------------- decided_by_depth


def test_decided_trivial_cases(ex1):
    everything = frozenset(ex1.full_depth_plays())
    assert decided_by_depth(ex1, everything, 0)
    assert decided_by_depth(ex1, leaves_with(ex1, lambda l: l[0] == 0), 1)
    assert not decided_by_depth(ex1, leaves_with(ex1, lambda l: l[3] == 0), 2)


@given(st.integers(0, 300))
@settings(max_examples=40, deadline=None)
def test_decided_monotone_in_depth(seed):
    rng = rng_for(f"mono:{seed}")
    tree = random_tree(rng, depth=4, branching=2, taboos=2)
    payoff = realize(tree, Closed(random_closed_spec(rng, tree)))
    decided_from = [d for d in range(tree.depth + 1) if decided_by_depth(tree, payoff, d)]
    assert decided_from, "every set is decided at full depth"
    first = decided_from[0]
    assert decided_from == list(range(first, tree.depth + 1))


# ------------------------------------------- closed_spec_from_decided


def test_decided_conversion_examples(ex1):
    half = leaves_with(ex1, lambda l: l[0] == 0)
    spec = closed_spec_from_decided(ex1, half, 1)
    assert spec == ClosedSpec([(0,)])
    assert realize(ex1, Closed(spec)) == leaves_with(ex1, lambda l: l[0] == 1)

    assert closed_spec_from_decided(ex1, frozenset(), 1) == ClosedSpec()
    full = closed_spec_from_decided(ex1, frozenset(ex1.full_depth_plays()), 1)
    assert full == ClosedSpec([(0,), (1,)])
    assert realize(ex1, Closed(full)) == frozenset()


def test_decided_conversion_round_trip(ex1):
    for d in (1, 2):
        for pick in (lambda l: l[0] == 0, lambda l: l[:2] == (1, 0), lambda l: False):
            payoff = leaves_with(ex1, pick)
            if not decided_by_depth(ex1, payoff, d):
                continue
            spec = closed_spec_from_decided(ex1, payoff, d)
            assert realize(ex1, Closed(spec)) == frozenset(ex1.full_depth_plays()) - payoff


def test_decided_conversion_preconditions(ex1, ex2):
    with pytest.raises(ValueError, match="not decided"):
        closed_spec_from_decided(ex1, leaves_with(ex1, lambda l: l[3] == 0), 1)
    with pytest.raises(ValueError, match="below the depth bound"):
        closed_spec_from_decided(ex1, frozenset(), 4)
    with pytest.raises(ValueError, match="terminal position"):
        closed_spec_from_decided(ex2, frozenset(ex2.full_depth_plays()), 2)


# ------------------------------------------------------------- error paths


def test_union_must_be_non_empty():
    with pytest.raises(ValueError, match="at least one"):
        ClosedUnion([])


def test_realize_rejects_non_payoff(ex1):
    with pytest.raises(TypeError, match="not a payoff spec"):
        realize(ex1, ClosedSpec())


def test_decided_depth_range(ex1):
    with pytest.raises(ValueError, match="out of range"):
        decided_by_depth(ex1, frozenset(), 5)


def test_meets_payoff_unknown_position(ex1):
    with pytest.raises(ValueError, match="unknown position"):
        meets_payoff(ex1, (9,), frozenset())
