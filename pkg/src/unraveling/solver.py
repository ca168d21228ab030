"""Brute-force ground truth: backward induction and taboo-pruning.

Every finite game with taboos is determined; ``solve`` labels each node
with its winner and extracts a verified winning strategy, tie-breaking by
the lexicographically least move so results are reproducible.

``prune`` removes from the tree every position from which some player can
force every play into a taboo against the opponent.  The removed region is
the upward closure of the taboo-determined positions: a taboo-determined
position can have descendants that are not themselves taboo-determined
(the unchosen branches of the forcing player), so closing upward is what
makes the remainder a prefix-closed tree.  The remainder has no early
terminals, and solving it decides the original game; ``transfer_from_pruned``
turns a winning strategy on the remainder into one on the full tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import (
    GameTree,
    InternalInvariantError,
    Player,
    Position,
    Strategy,
    _check_payoff,
    _evaluate,
    format_position,
    subtree_at,
)


@dataclass(frozen=True)
class Solution:
    """Winner, a verified winning strategy for them, and the node labeling."""

    winner: Player
    strategy: Strategy
    values: Mapping[Position, Player]


def solve(tree: GameTree, payoff) -> Solution:
    """Backward induction over the whole arena.

    Leaves evaluate by payoff membership and taboo tags; an internal node
    is a win for its mover iff some child is.  The returned strategy picks
    the least winning child where the winner is to move (the least child
    where they are already lost).
    """
    _check_payoff(tree, payoff)
    values: dict[Position, Player] = {}
    for position in sorted(tree.positions(), key=len, reverse=True):
        labels = tree.children_of(position)
        if not labels:
            values[position] = _evaluate(tree, position, payoff)
            continue
        mover = Player.to_move(position)
        child_values = [values[position + (label,)] for label in labels]
        values[position] = mover if mover in child_values else mover.opponent
    winner = values[()]
    choices = {}
    for position in tree.positions():
        labels = tree.children_of(position)
        if not labels or Player.to_move(position) is not winner:
            continue
        winning = [label for label in labels if values[position + (label,)] is winner]
        choices[position] = winning[0] if winning else labels[0]
    return Solution(winner, Strategy(winner, choices), values)


def taboo_strategy(tree: GameTree, position: Position, player: Player) -> Strategy | None:
    """A strategy in the subtree at ``position`` forcing every play into a
    taboo for the opponent, if one exists.

    Computed by solving the subtree with the payoff "only opponent-taboo
    plays win": the empty set for player I, every full-depth play for II.
    """
    subtree = subtree_at(tree, position)
    payoff = frozenset() if player is Player.I else frozenset(subtree.full_depth_plays())
    solution = solve(subtree, payoff)
    return solution.strategy if solution.winner is player else None


@dataclass(frozen=True)
class PruneResult:
    """Outcome of taboo-pruning.

    ``determined`` maps each taboo-determined position to the forcing
    player; ``removed`` is its upward closure, the positions actually cut;
    ``witnesses`` holds a forcing strategy at each minimal removed position
    so transfer never has to re-solve.  If the root itself is determined
    there is no remainder tree and ``root_determined`` names the player who
    wins the original game outright, whatever the payoff.
    """

    tree: GameTree | None
    root_determined: Player | None
    determined: Mapping[Position, Player]
    removed: frozenset
    witnesses: Mapping[Position, Strategy]


def _taboo_values(tree: GameTree, player: Player) -> dict[Position, bool]:
    """Per position: can ``player`` force every play below into opponent taboos."""
    values: dict[Position, bool] = {}
    for position in sorted(tree.positions(), key=len, reverse=True):
        labels = tree.children_of(position)
        if not labels:
            values[position] = tree.taboo_owner(position) is player.opponent
        elif Player.to_move(position) is player:
            values[position] = any(values[position + (label,)] for label in labels)
        else:
            values[position] = all(values[position + (label,)] for label in labels)
    return values


def _forcing_witness(
    tree: GameTree, root: Position, player: Player, can_force: Mapping[Position, bool]
) -> Strategy:
    """Forcing strategy on the subtree at ``root``, total via least-move fill."""
    subtree = subtree_at(tree, root)
    choices = {}
    for position in subtree.positions():
        labels = subtree.children_of(position)
        if not labels or Player.to_move(position) is not player:
            continue
        forcing = [
            label
            for label in labels
            if len(position) >= len(root) and can_force.get(position + (label,))
        ]
        choices[position] = forcing[0] if forcing else labels[0]
    return Strategy(player, choices)


def prune(tree: GameTree) -> PruneResult:
    can_force = {Player.I: _taboo_values(tree, Player.I), Player.II: _taboo_values(tree, Player.II)}
    determined: dict[Position, Player] = {}
    for position in tree.positions():
        for_i, for_ii = can_force[Player.I][position], can_force[Player.II][position]
        if for_i and for_ii:
            raise InternalInvariantError(
                f"{format_position(position)} taboo-determined for both players"
            )
        if for_i:
            determined[position] = Player.I
        elif for_ii:
            determined[position] = Player.II

    removed: set[Position] = set()
    minimal: list[Position] = []
    for position in tree.positions():  # parents precede children
        if position and position[:-1] in removed:
            removed.add(position)
        elif position in determined:
            removed.add(position)
            minimal.append(position)

    witnesses = {
        position: _forcing_witness(
            tree, position, determined[position], can_force[determined[position]]
        )
        for position in minimal
    }

    if () in determined:
        return PruneResult(None, determined[()], determined, frozenset(removed), witnesses)

    children = {}
    taboo = {}
    for position in tree.positions():
        if position in removed:
            continue
        kept = tuple(l for l in tree.children_of(position) if position + (l,) not in removed)
        if not kept and len(position) < tree.depth:
            # Every early terminal is trivially determined, and a position
            # whose children are all determined is determined itself.
            raise InternalInvariantError(
                f"pruning left a new early terminal at {format_position(position)}"
            )
        children[position] = kept
        owner = tree.taboo_owner(position)
        if owner is not None:
            taboo[position] = owner
    if taboo:
        raise InternalInvariantError("pruned tree retains taboo tags")
    return PruneResult(
        GameTree(tree.depth, children), None, determined, frozenset(removed), witnesses
    )


def transfer_from_pruned(tree: GameTree, pruned: PruneResult, strategy: Strategy) -> Strategy:
    """Extend a winning strategy on the pruned remainder to the full tree.

    Inside the remainder the strategy is followed unchanged.  The first
    position of a removed region that the opponent can enter is always
    taboo-determined for the strategy's owner (were it determined for the
    opponent, its parent would be too and would already have been removed);
    from there the stored forcing witness takes over.  Positions only the
    owner could steer into get the lexicographic default.
    """
    if pruned.tree is None:
        raise ValueError("no pruned tree: the root is taboo-determined")
    owner = strategy.owner
    for entry in pruned.witnesses:
        if Player.to_move(entry[:-1]) is owner.opponent:
            if pruned.determined[entry] is not owner:
                raise InternalInvariantError(
                    f"opponent enters {format_position(entry)} determined against the owner"
                )

    choices: dict[Position, object] = {}
    for position in tree.positions():
        labels = tree.children_of(position)
        if not labels or Player.to_move(position) is not owner:
            continue
        if position not in pruned.removed:
            choices[position] = strategy.move_at(position)
            continue
        entry = position
        while entry[:-1] in pruned.removed:
            entry = entry[:-1]
        witness = pruned.witnesses[entry]
        if pruned.determined[entry] is owner:
            choices[position] = witness.move_at(position)
        else:
            choices[position] = labels[0]
    return Strategy(owner, choices)
