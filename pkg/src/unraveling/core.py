"""Finite two-player game trees with taboo-tagged early terminals.

A game is played on a prefix-closed arena of positions with a fixed even
depth bound.  Plays that reach the depth bound stand in for infinite plays;
every play that stops earlier is a *taboo*, i.e. an unconditional loss for
the player it is tagged with, independent of any payoff set.

Positions are tuples of move labels.  Labels are small non-negative
integers in base games; derived games (see :mod:`unraveling.unravel`) use
structured labels that provide their own ``sort_key``.  Sibling order is
always the canonical label order, which makes "lexicographically least"
tie-breaking well defined everywhere.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Protocol, Union


class InternalInvariantError(RuntimeError):
    """A structural fact the implementation relies on failed to hold."""


class ResourceLimitError(RuntimeError):
    """A configurable size cap was exceeded; nothing was silently truncated."""


class Player(enum.Enum):
    I = "I"
    II = "II"

    @property
    def opponent(self) -> "Player":
        return Player.II if self is Player.I else Player.I

    @staticmethod
    def to_move(position: "Position") -> "Player":
        """Player I moves at even-length positions, player II at odd."""
        return Player.I if len(position) % 2 == 0 else Player.II

    def __str__(self) -> str:
        return self.value


class PlayOutcome(enum.Enum):
    FULL_DEPTH = "full-depth"   # models an infinite play
    TABOO_I = "taboo-I"         # early terminal, loss for player I
    TABOO_II = "taboo-II"       # early terminal, loss for player II


class StructuredLabel(Protocol):
    def sort_key(self) -> tuple: ...


Label = Union[int, StructuredLabel]
Position = tuple


def label_key(label: Label) -> tuple:
    """Total order on move labels; plain integers sort before structured ones."""
    if isinstance(label, int):
        return (0, label)
    return label.sort_key()


def position_key(position: Position) -> tuple:
    """Lexicographic key; a proper prefix sorts before its extensions."""
    return tuple(label_key(label) for label in position)


def is_prefix(p: Position, q: Position) -> bool:
    return len(p) <= len(q) and q[: len(p)] == p


def format_label(label: Label) -> str:
    return str(label)


def format_position(position: Position) -> str:
    """Slash path, ``-`` for the root (matches the game-file syntax)."""
    if not position:
        return "-"
    return "/".join(format_label(label) for label in position)


class GameTree:
    """Immutable finite game arena with a depth bound and taboo tags.

    ``children`` maps every position to its ordered child labels; terminal
    positions map to the empty tuple.  ``taboo`` tags exactly the terminals
    of depth less than the bound, partitioning the early plays into losses
    for player I and player II.
    """

    def __init__(
        self,
        depth: int,
        children: Mapping[Position, Iterable[Label]],
        taboo: Mapping[Position, Player] = {},
    ):
        if depth < 2 or depth % 2 != 0:
            raise ValueError("depth bound must be an even integer >= 2")
        normalized: dict[Position, tuple[Label, ...]] = {}
        for position, labels in children.items():
            ordered = tuple(sorted(labels, key=label_key))
            if len(set(ordered)) != len(ordered):
                raise ValueError(f"duplicate sibling labels under {format_position(position)}")
            normalized[position] = ordered
        if () not in normalized:
            raise ValueError("missing root position")
        # Prefix closure: every child named by a position must itself be stored,
        # and everything stored must be reachable from the root.
        reachable = 1
        for position, labels in normalized.items():
            if len(position) > depth:
                raise ValueError(f"position {format_position(position)} exceeds depth bound")
            if len(position) == depth and labels:
                raise ValueError(f"position {format_position(position)} at full depth has children")
            for label in labels:
                if position + (label,) not in normalized:
                    raise ValueError(
                        f"child {format_position(position + (label,))} not stored (prefix closure)"
                    )
                reachable += 1
        if reachable != len(normalized):
            raise ValueError("unreachable positions stored (prefix closure)")
        for position, owner in taboo.items():
            if position not in normalized:
                raise ValueError(f"taboo tag on unknown position {format_position(position)}")
            if normalized[position]:
                raise ValueError(f"taboo tag on non-terminal position {format_position(position)}")
            if len(position) == depth:
                raise ValueError(f"taboo at full depth: {format_position(position)}")
            if not isinstance(owner, Player):
                raise ValueError("taboo tag must name a player")
        for position, labels in normalized.items():
            if not labels and len(position) < depth and position not in taboo:
                raise ValueError(
                    f"early terminal {format_position(position)} lacks a taboo tag (partition)"
                )
        self.depth = depth
        self._children = normalized
        self._taboo = dict(taboo)
        self._ordered = sorted(normalized, key=lambda p: (len(p), position_key(p)))

    @classmethod
    def from_nodes(
        cls,
        depth: int,
        nodes: Iterable[Position],
        taboo: Mapping[Position, Player] = {},
    ) -> "GameTree":
        """Build from the set of positions; child labels are inferred."""
        stored = {(): set()} | {tuple(p): set() for p in nodes}
        for position in list(stored):
            if position:
                parent = position[:-1]
                if parent not in stored:
                    raise ValueError(
                        f"missing parent of {format_position(position)} (prefix closure)"
                    )
                stored[parent].add(position[-1])
        return cls(depth, stored, taboo)

    @classmethod
    def complete(cls, depth: int, branching: int) -> "GameTree":
        """Complete ``branching``-ary tree of the given depth, no early terminals."""
        children: dict[Position, list[int]] = {}

        def fill(position: Position) -> None:
            if len(position) == depth:
                children[position] = []
                return
            children[position] = list(range(branching))
            for label in range(branching):
                fill(position + (label,))

        fill(())
        return cls(depth, children)

    def positions(self) -> Iterator[Position]:
        """All positions in canonical order (by length, then lexicographic)."""
        return iter(self._ordered)

    @property
    def node_count(self) -> int:
        return len(self._children)

    def __contains__(self, position: Position) -> bool:
        return position in self._children

    def children_of(self, position: Position) -> tuple[Label, ...]:
        try:
            return self._children[position]
        except KeyError:
            raise ValueError(f"unknown position {format_position(position)}") from None

    def is_terminal(self, position: Position) -> bool:
        return not self.children_of(position)

    def taboo_owner(self, position: Position) -> Player | None:
        """The player for whom this early terminal is a loss, if tagged."""
        if position not in self._children:
            raise ValueError(f"unknown position {format_position(position)}")
        return self._taboo.get(position)

    def taboo_items(self) -> Iterator[tuple[Position, Player]]:
        for position in self._ordered:
            owner = self._taboo.get(position)
            if owner is not None:
                yield position, owner

    def plays(self) -> Iterator[Position]:
        """All terminal positions (the plays), canonical order."""
        return (p for p in self._ordered if not self._children[p])

    def full_depth_plays(self) -> Iterator[Position]:
        """The depth-bound plays, i.e. the stand-ins for infinite plays."""
        return (p for p in self._ordered if len(p) == self.depth)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GameTree):
            return NotImplemented
        return (
            self.depth == other.depth
            and self._children == other._children
            and self._taboo == other._taboo
        )

    __hash__ = None  # compared by value, never hashed

    def __repr__(self) -> str:
        return f"GameTree(depth={self.depth}, nodes={self.node_count})"


@dataclass(frozen=True, eq=True)
class Strategy:
    """Total choice function for one player.

    ``choices`` maps every non-terminal position of the owner's parity to
    the label of the chosen child.  Totality keeps consistency checks and
    play enumeration decidable; unreachable positions simply carry a
    default choice.
    """

    owner: Player
    choices: Mapping[Position, Label]

    def move_at(self, position: Position) -> Label:
        try:
            return self.choices[position]
        except KeyError:
            raise ValueError(
                f"strategy has no choice at {format_position(position)} (not total)"
            ) from None


def strategy_from(
    tree: GameTree,
    owner: Player,
    choose: Callable[[Position, tuple[Label, ...]], Label],
) -> Strategy:
    """Total strategy built by calling ``choose`` at each decision position."""
    choices = {}
    for position in tree.positions():
        labels = tree.children_of(position)
        if labels and Player.to_move(position) is owner:
            choice = choose(position, labels)
            if choice not in labels:
                raise ValueError(f"illegal choice at {format_position(position)}")
            choices[position] = choice
    return Strategy(owner, choices)


def least_strategy(tree: GameTree, owner: Player) -> Strategy:
    """The lexicographic default: always the least available move."""
    return strategy_from(tree, owner, lambda _, labels: labels[0])


def random_strategy(rng: random.Random, tree: GameTree, owner: Player) -> Strategy:
    return strategy_from(tree, owner, lambda _, labels: rng.choice(labels))


def subtree_at(tree: GameTree, position: Position) -> GameTree:
    """The game subtree: the chain up to ``position`` plus everything below it.

    Positions above keep only the single child leading toward ``position``,
    so every play of the subtree passes through it.  The depth bound and
    the taboo tags of surviving terminals are unchanged.
    """
    if position not in tree:
        raise ValueError(f"unknown position {format_position(position)}")
    children: dict[Position, tuple[Label, ...]] = {}
    taboo: dict[Position, Player] = {}
    for k in range(len(position)):
        children[position[:k]] = (position[k],)
    stack = [position]
    while stack:
        current = stack.pop()
        labels = tree.children_of(current)
        children[current] = labels
        owner = tree.taboo_owner(current)
        if owner is not None:
            taboo[current] = owner
        stack.extend(current + (label,) for label in labels)
    return GameTree(tree.depth, children, taboo)


def classify_play(tree: GameTree, play: Position) -> PlayOutcome:
    """Full-depth or the taboo tag; only defined on terminal positions."""
    if not tree.is_terminal(play):
        raise ValueError(f"{format_position(play)} is not a play (non-terminal)")
    if len(play) == tree.depth:
        return PlayOutcome.FULL_DEPTH
    owner = tree.taboo_owner(play)
    if owner is None:
        raise InternalInvariantError("untagged early terminal")
    return PlayOutcome.TABOO_I if owner is Player.I else PlayOutcome.TABOO_II


def is_consistent(position: Position, strategy: Strategy) -> bool:
    """True iff the owner's moves along ``position`` all follow the strategy."""
    start = 0 if strategy.owner is Player.I else 1
    for k in range(start, len(position), 2):
        if strategy.choices.get(position[:k]) != position[k]:
            return False
    return True


def consistent_plays(tree: GameTree, strategy: Strategy) -> tuple[Position, ...]:
    """All plays consistent with the strategy, branching only over the opponent.

    Never empty: the tree is finite and the strategy total, so following it
    always terminates.
    """
    out: list[Position] = []
    stack: list[Position] = [()]
    while stack:
        position = stack.pop()
        labels = tree.children_of(position)
        if not labels:
            out.append(position)
        elif Player.to_move(position) is strategy.owner:
            stack.append(position + (strategy.move_at(position),))
        else:
            stack.extend(position + (label,) for label in reversed(labels))
    return tuple(out)


def _check_payoff(tree: GameTree, payoff: Iterable[Position]) -> None:
    for member in payoff:
        if len(member) != tree.depth:
            raise ValueError(
                f"payoff member {format_position(member)} is not a full-depth play"
            )


def evaluate_play(tree: GameTree, play: Position, payoff: frozenset | set) -> Player:
    """Winner of one play: I iff it lies in the payoff set or is taboo for II."""
    _check_payoff(tree, payoff)
    return _evaluate(tree, play, payoff)


def _evaluate(tree: GameTree, play: Position, payoff) -> Player:
    outcome = classify_play(tree, play)
    if outcome is PlayOutcome.TABOO_II:
        return Player.I
    if outcome is PlayOutcome.TABOO_I:
        return Player.II
    return Player.I if play in payoff else Player.II


def is_winning_strategy(tree: GameTree, payoff, strategy: Strategy) -> bool:
    """True iff every play consistent with the strategy is a win for its owner."""
    _check_payoff(tree, payoff)
    return all(
        _evaluate(tree, play, payoff) is strategy.owner
        for play in consistent_plays(tree, strategy)
    )
