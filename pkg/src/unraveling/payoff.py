"""Symbolic payoff sets over the full-depth plays of a game tree.

Closedness is structural, never inferred: a closed set is given by the
generators of its open complement, i.e. the full-depth plays that avoid
every generator.  At finite depth every set of plays is trivially clopen,
so the generator representation is what carries the topological content;
generators are restricted to non-terminal positions strictly between the
root and the depth bound.

"Decided by depth d" is the finite rendering of clopen: membership of a
full-depth play depends only on its length-``d`` prefix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    GameTree,
    Position,
    format_position,
    is_prefix,
    position_key,
)


@dataclass(frozen=True)
class ClosedSpec:
    """Generator set of an open complement; realizes to a closed set."""

    generators: tuple[Position, ...]

    def __init__(self, generators=()):
        ordered = tuple(sorted({tuple(g) for g in generators}, key=position_key))
        object.__setattr__(self, "generators", ordered)


@dataclass(frozen=True)
class Closed:
    spec: ClosedSpec


@dataclass(frozen=True)
class Open:
    spec: ClosedSpec


@dataclass(frozen=True)
class ClosedUnion:
    parts: tuple[ClosedSpec, ...]

    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise ValueError("union payoff must have at least one member")
        object.__setattr__(self, "parts", parts)


PayoffSpec = Closed | Open | ClosedUnion


def check_generators(tree: GameTree, spec: ClosedSpec) -> None:
    """Generators must be non-terminal tree positions of depth 1..depth-1."""
    for generator in spec.generators:
        if generator not in tree:
            raise ValueError(f"generator {format_position(generator)} not in tree")
        if not 1 <= len(generator) < tree.depth:
            raise ValueError(
                f"generator {format_position(generator)} outside depth range 1..{tree.depth - 1}"
            )
        if tree.is_terminal(generator):
            raise ValueError(f"generator {format_position(generator)} is terminal")


def _closed_leaves(tree: GameTree, spec: ClosedSpec) -> frozenset:
    check_generators(tree, spec)
    return frozenset(
        leaf
        for leaf in tree.full_depth_plays()
        if not any(is_prefix(g, leaf) for g in spec.generators)
    )


def realize(tree: GameTree, payoff: PayoffSpec) -> frozenset:
    """The explicit set of full-depth plays a payoff spec denotes."""
    if isinstance(payoff, Closed):
        return _closed_leaves(tree, payoff.spec)
    if isinstance(payoff, Open):
        return frozenset(tree.full_depth_plays()) - _closed_leaves(tree, payoff.spec)
    if isinstance(payoff, ClosedUnion):
        out: frozenset = frozenset()
        for part in payoff.parts:
            out |= _closed_leaves(tree, part)
        return out
    raise TypeError(f"not a payoff spec: {payoff!r}")


def complement_spec(payoff: PayoffSpec) -> PayoffSpec:
    """Swap Closed and Open; an involution that commutes with realization."""
    if isinstance(payoff, Closed):
        return Open(payoff.spec)
    if isinstance(payoff, Open):
        return Closed(payoff.spec)
    raise ValueError("complement of a union of closed sets is not representable")


def meets_payoff(tree: GameTree, position: Position, payoff_leaves) -> bool:
    """True iff some full-depth play extending ``position`` lies in the set."""
    if position not in tree:
        raise ValueError(f"unknown position {format_position(position)}")
    return any(is_prefix(position, leaf) for leaf in payoff_leaves)


def decided_by_depth(tree: GameTree, leaves, depth: int) -> bool:
    """True iff membership depends only on the length-``depth`` prefix."""
    if not 0 <= depth <= tree.depth:
        raise ValueError("depth out of range")
    verdict_by_prefix: dict[Position, bool] = {}
    for leaf in tree.full_depth_plays():
        prefix = leaf[:depth]
        verdict = leaf in leaves
        if verdict_by_prefix.setdefault(prefix, verdict) != verdict:
            return False
    return True


def _complement_generators(tree: GameTree, leaves, depth: int, strict: bool):
    generators = []
    for position in tree.positions():
        if len(position) != depth:
            continue
        if tree.is_terminal(position):
            if strict:
                raise ValueError(
                    f"terminal position {format_position(position)} at depth {depth}"
                )
            continue
        below = [leaf for leaf in tree.full_depth_plays() if is_prefix(position, leaf)]
        if not strict and not below:
            continue  # excludes nothing; would be a vacuous generator
        if all(leaf in leaves for leaf in below):
            generators.append(position)
    return ClosedSpec(generators)


def closed_spec_from_decided(tree: GameTree, leaves, depth: int) -> ClosedSpec:
    """Generators (at ``depth``) whose closed realization is the complement.

    Requires the set to be decided by ``depth`` and every depth-``depth``
    position to be non-terminal; then ``realize(Closed(result))`` equals the
    full-depth plays outside ``leaves``, exactly.
    """
    if not depth < tree.depth:
        raise ValueError("conversion depth must be below the depth bound")
    if not decided_by_depth(tree, leaves, depth):
        raise ValueError(f"set is not decided by depth {depth}")
    return _complement_generators(tree, leaves, depth, strict=True)
