"""Closed-set unraveling: decorated claim games and iterated coverings.

Given a structurally closed payoff set, the base construction builds a
covering whose pulled-back payoff is decided two levels past the covering's
identity level.  At the first decorated level the first player augments a
move with a *claimed* subset of the move's frontier; the second player
either accepts (play continues normally but stops with a taboo verdict the
moment a frontier position is reached) or challenges one claimed position
(play is then confined to its subtree).

The *frontier* of a move is the antichain of minimal non-terminal
extensions from whose subtrees the payoff set is unreachable: the claimed
subset is exactly the part of the frontier the first player asserts they
can still win through taboos.

``unravel_union`` iterates the construction over a finite list of closed
specs, pulling each one through the composite built so far at climbing
identity levels, and finishes with one more base covering over the (now
prefix-decided) complement of the pulled-back union.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .core import (
    GameTree,
    InternalInvariantError,
    Label,
    Player,
    Position,
    ResourceLimitError,
    Strategy,
    format_label,
    format_position,
    label_key,
    position_key,
)
from .covering import Covering, compose, identity_covering, pullback, pullback_closed_spec
from .payoff import (
    Closed,
    ClosedSpec,
    ClosedUnion,
    _complement_generators,
    check_generators,
    decided_by_depth,
    realize,
)

DEFAULT_FRONTIER_MAX = 10
DEFAULT_NODE_MAX = 200_000


@dataclass(frozen=True)
class Claim:
    """First player's decorated move: a base move plus the claimed frontier part."""

    move: Label
    claimed: tuple[Position, ...]

    def sort_key(self) -> tuple:
        return (1, label_key(self.move), tuple(position_key(q) for q in self.claimed))

    def __str__(self) -> str:
        inner = ",".join(format_position(q) for q in self.claimed)
        return f"{format_label(self.move)}[{inner}]"


@dataclass(frozen=True)
class Accept:
    """Second player accepts the claim and plays a base move."""

    move: Label

    def sort_key(self) -> tuple:
        return (2, label_key(self.move))

    def __str__(self) -> str:
        return f"acc({format_label(self.move)})"


@dataclass(frozen=True)
class Challenge:
    """Second player challenges one claimed position; the move toward it is forced."""

    target: Position
    move: Label

    def sort_key(self) -> tuple:
        return (3, position_key(self.target), label_key(self.move))

    def __str__(self) -> str:
        return f"chal({format_position(self.target)})"


def _subsets_counter(items: tuple) -> Iterator[tuple]:
    """All subsets of an ordered tuple, in binary-counter order."""
    for mask in range(1 << len(items)):
        yield tuple(item for i, item in enumerate(items) if mask >> i & 1)


def _generator_floor(k: int, depth: int) -> int:
    """Minimum generator depth for a level-``k`` base covering.

    Frontier truncation happens at level ``k + 2``.  While that lies below
    the depth bound, a play reaching full depth under any generator would
    pass a non-terminal level-``k + 2`` position of a payoff-free subtree,
    which is itself a frontier member, so the play is truncated first: any
    generator depth is sound.  When ``k + 2`` equals the bound the would-be
    frontier positions are terminal and excluded, truncation never happens,
    and only generators too deep to exist would keep the accept branch
    honest.
    """
    return 1 if k + 2 < depth else k + 2


def frontier(tree: GameTree, payoff_leaves, prefix: Position, move: Label):
    """Minimal non-terminal extensions of ``prefix + (move,)`` from whose
    subtrees the payoff set is unreachable; always an antichain.

    Minimality means every position strictly in between still meets the
    payoff set, so the walk descends only through meeting positions.
    """
    start = prefix + (move,)
    if start not in tree:
        raise ValueError(f"unknown position {format_position(start)}")
    if tree.is_terminal(start):
        raise ValueError(f"{format_position(start)} is terminal")
    meets = {leaf[:i] for leaf in payoff_leaves for i in range(tree.depth + 1)}
    return _frontier(tree, meets, start)


def _frontier(tree: GameTree, meets: set, start: Position) -> tuple[Position, ...]:
    out = []
    stack = [start + (label,) for label in tree.children_of(start)]
    while stack:
        position = stack.pop()
        if position in meets:
            stack.extend(position + (label,) for label in tree.children_of(position))
        elif not tree.is_terminal(position):
            out.append(position)
    return tuple(sorted(out, key=position_key))


@dataclass(frozen=True)
class BaseCovering(Covering):
    """A base-construction covering plus its per-move frontier tables."""

    frontiers: Mapping[tuple[Position, Label], tuple[Position, ...]]


def build_base_covering(
    tree: GameTree,
    spec: ClosedSpec,
    level: int,
    *,
    frontier_max: int = DEFAULT_FRONTIER_MAX,
    node_max: int = DEFAULT_NODE_MAX,
) -> BaseCovering:
    """The base covering unraveling the closed set realized by ``spec``.

    An odd level is rounded up (a deeper identity level is a fortiori also
    the shallower covering).  Any full-depth play with no frontier prefix
    avoids every generator (see ``_generator_floor``), so the pulled-back
    payoff is exactly the accept-branch full-depth plays and is decided at
    ``level + 2``; the same certificate covers the complement.
    """
    k = level + level % 2
    if k + 2 > tree.depth:
        raise ValueError(f"level {k} needs depth {k + 2}, bound is {tree.depth}")
    check_generators(tree, spec)
    floor = _generator_floor(k, tree.depth)
    for generator in spec.generators:
        if len(generator) < floor:
            raise ValueError(
                f"generator {format_position(generator)} too shallow for level {k}"
                f" (need depth >= {floor})"
            )
    payoff = realize(tree, Closed(spec))
    meets = {leaf[:i] for leaf in payoff for i in range(tree.depth + 1)}

    children: dict[Position, list] = {}
    taboo: dict[Position, Player] = {}
    table: dict[Position, Position] = {}
    frontiers: dict[tuple[Position, Label], tuple[Position, ...]] = {}

    def add(node: Position, image: Position, tag: Player | None) -> None:
        children[node] = []
        table[node] = image
        if tag is not None:
            taboo[node] = tag
        if len(children) > node_max:
            raise ResourceLimitError(f"covering source exceeds {node_max} nodes")

    def copy_accept(node, image, claimed_set, frontier_set):
        if image in frontier_set:
            # Claim verdict: claimed frontier positions are losses for the
            # second player, unclaimed ones concessions by the first.
            add(node, image, Player.II if image in claimed_set else Player.I)
            return
        add(node, image, tree.taboo_owner(image))
        for label in tree.children_of(image):
            children[node].append(label)
            copy_accept(node + (label,), image + (label,), claimed_set, frontier_set)

    def copy_challenge(node, image, challenged):
        add(node, image, tree.taboo_owner(image))
        if len(image) < len(challenged):
            if tree.is_terminal(image):
                raise InternalInvariantError(
                    f"terminal position {format_position(image)} on a challenged chain"
                )
            label = challenged[len(image)]
            children[node].append(label)
            copy_challenge(node + (label,), image + (label,), challenged)
        else:
            for label in tree.children_of(image):
                children[node].append(label)
                copy_challenge(node + (label,), image + (label,), challenged)

    for position in tree.positions():
        if len(position) > k:
            break
        add(position, position, tree.taboo_owner(position))
        if len(position) < k:
            children[position] = list(tree.children_of(position))

    for p in tree.positions():
        if len(p) != k:
            continue
        for a in tree.children_of(p):
            base_child = p + (a,)
            child_tag = tree.taboo_owner(base_child)
            if tree.is_terminal(base_child):
                front: tuple[Position, ...] = ()
            else:
                front = _frontier(tree, meets, base_child)
                if len(front) > frontier_max:
                    raise ResourceLimitError(
                        f"frontier size {len(front)} exceeds cap {frontier_max}"
                        f" at {format_position(base_child)}"
                    )
            frontiers[(p, a)] = front
            frontier_set = frozenset(front)
            for claimed in _subsets_counter(front):
                move = Claim(a, claimed)
                node = p + (move,)
                children[p].append(move)
                add(node, base_child, child_tag)
                if child_tag is not None:
                    continue
                claimed_set = frozenset(claimed)
                for b in tree.children_of(base_child):
                    reply: Label = Accept(b)
                    children[node].append(reply)
                    copy_accept(node + (reply,), base_child + (b,), claimed_set, frontier_set)
                for challenged in claimed:
                    reply = Challenge(challenged, challenged[k + 1])
                    children[node].append(reply)
                    copy_challenge(
                        node + (reply,), base_child + (challenged[k + 1],), challenged
                    )

    source = GameTree(tree.depth, children, taboo)
    transform, lift = _strategy_maps(tree, source, k, frontiers)
    return BaseCovering(source, tree, k, table, transform, lift, frontiers)


def _strategy_maps(tree: GameTree, source: GameTree, k: int, frontiers):
    """The strategy map and the constructive lift of a base covering."""
    frontier_sets = {key: frozenset(front) for key, front in frontiers.items()}

    def frontier_prefix(x: Position, key) -> Position | None:
        hits = frontier_sets[key]
        for end in range(k + 2, len(x) + 1):
            if x[:end] in hits:
                return x[:end]  # the frontier is an antichain: first hit is the only one
        return None

    def unchallenged(strategy: Strategy, p: Position, a: Label) -> tuple[Position, ...]:
        """Frontier positions this second-player strategy never challenges,
        whatever the claimed set."""
        front = frontiers[(p, a)]
        if source.is_terminal(p + (Claim(a, ()),)):
            return front
        challenged = set()
        for claimed in _subsets_counter(front):
            reply = strategy.choices[p + (Claim(a, claimed),)]
            if isinstance(reply, Challenge):
                challenged.add(reply.target)
        return tuple(q for q in front if q not in challenged)

    def least_challenging_claim(strategy, p, a, target_position) -> Claim:
        """First claimed set (binary-counter order) the strategy answers by
        challenging the given position."""
        for claimed in _subsets_counter(frontiers[(p, a)]):
            if target_position not in claimed:
                continue
            reply = strategy.choices[p + (Claim(a, claimed),)]
            if isinstance(reply, Challenge) and reply.target == target_position:
                return Claim(a, claimed)
        raise InternalInvariantError("no claimed set challenges the position")

    def transform(strategy: Strategy) -> Strategy:
        owner = strategy.owner
        never_cache: dict = {}
        claim_cache: dict = {}

        def never(p, a):
            if (p, a) not in never_cache:
                never_cache[(p, a)] = unchallenged(strategy, p, a)
            return never_cache[(p, a)]

        def rebased_claim(p, a, target_position):
            key = (p, a, target_position)
            if key not in claim_cache:
                claim_cache[key] = least_challenging_claim(strategy, p, a, target_position)
            return claim_cache[key]

        def choice_first(x: Position) -> Label:
            if len(x) < k:
                return strategy.choices[x]
            if len(x) == k:
                return strategy.choices[x].move
            p, a = x[:k], x[k]
            claim = strategy.choices[p]
            if claim.move != a:
                return tree.children_of(x)[0]  # off the described play
            hit = frontier_prefix(x, (p, a))
            if hit is None:
                node = p + (claim, Accept(x[k + 1])) + x[k + 2 :]
            elif hit in claim.claimed:
                node = p + (claim, Challenge(hit, hit[k + 1])) + x[k + 2 :]
            else:
                return tree.children_of(x)[0]  # conceded region
            return strategy.choices[node]

        def choice_second(x: Position) -> Label:
            if len(x) < k:
                return strategy.choices[x]
            p, a = x[:k], x[k]
            quiet = never(p, a)
            if len(x) == k + 1:
                reply = strategy.choices[p + (Claim(a, quiet),)]
                if not isinstance(reply, Accept):
                    raise InternalInvariantError(
                        "reply to the never-challenged claim must be an accept"
                    )
                return reply.move
            hit = frontier_prefix(x, (p, a))
            if hit is None:
                node = p + (Claim(a, quiet), Accept(x[k + 1])) + x[k + 2 :]
            elif hit in quiet:
                return tree.children_of(x)[0]  # conceded region
            else:
                claim = rebased_claim(p, a, hit)
                node = p + (claim, Challenge(hit, hit[k + 1])) + x[k + 2 :]
            return strategy.choices[node]

        chooser = choice_first if owner is Player.I else choice_second
        choices = {}
        for x in tree.positions():
            if tree.children_of(x) and Player.to_move(x) is owner:
                choices[x] = chooser(x)
        return Strategy(owner, choices)

    def lift(strategy: Strategy, x: Position) -> Position:
        if len(x) <= k:
            return x
        p, a = x[:k], x[k]
        if strategy.owner is Player.I:
            claim = strategy.choices[p]
            if len(x) == k + 1:
                return p + (claim,)
            hit = frontier_prefix(x, (p, a))
            if hit is None:
                return p + (claim, Accept(x[k + 1])) + x[k + 2 :]
            if hit in claim.claimed:
                return p + (claim, Challenge(hit, hit[k + 1])) + x[k + 2 :]
            return p + (claim, Accept(x[k + 1])) + hit[k + 2 :]
        quiet = unchallenged(strategy, p, a)
        claim = Claim(a, quiet)
        if len(x) == k + 1:
            return p + (claim,)
        hit = frontier_prefix(x, (p, a))
        if hit is None:
            return p + (claim, Accept(x[k + 1])) + x[k + 2 :]
        if hit in quiet:
            return p + (claim, Accept(x[k + 1])) + hit[k + 2 :]
        rebased = least_challenging_claim(strategy, p, a, hit)
        return p + (rebased, Challenge(hit, hit[k + 1])) + x[k + 2 :]

    return transform, lift


def unravel_union(
    tree: GameTree,
    specs: Iterable[ClosedSpec],
    level: int,
    *,
    frontier_max: int = DEFAULT_FRONTIER_MAX,
    node_max: int = DEFAULT_NODE_MAX,
) -> tuple[Covering, int]:
    """Covering unraveling a finite union of closed sets, plus the depth at
    which the pulled-back union is decided.

    Stage ``n`` base-covers the current source at the smallest even level
    at least ``level + n``, unraveling the pullback of the n-th spec.  Once
    every part is decided, the complement of the pulled-back union is again
    structurally closed (its generators sit at the deepest stage level plus
    two), so one more base covering at the original level finishes the job.
    """
    k = level + level % 2
    specs = list(specs)
    if not specs:
        return identity_covering(tree), 0

    composite: Covering | None = None
    current = tree
    deepest = k
    for n, spec in enumerate(specs):
        stage = k + n
        stage += stage % 2
        if stage + 2 > tree.depth:
            raise ValueError(
                f"stage {n}: level {stage} needs depth {stage + 2}, bound is {tree.depth}"
            )
        pulled = spec if composite is None else pullback_closed_spec(composite, spec)
        floor = _generator_floor(stage, tree.depth)
        for generator in pulled.generators:
            if len(generator) < floor:
                raise ValueError(
                    f"stage {n}: generator {format_position(generator)} too shallow"
                    f" for level {stage} (need depth >= {floor})"
                )
        built = build_base_covering(
            current, pulled, stage, frontier_max=frontier_max, node_max=node_max
        )
        composite = built if composite is None else compose(composite, built)
        current = composite.source
        deepest = max(deepest, stage)

    if len(specs) == 1:
        return composite, k + 2

    union_leaves = pullback(composite, realize(tree, ClosedUnion(specs)))
    if not decided_by_depth(current, union_leaves, deepest + 2):
        raise InternalInvariantError("pulled-back union not decided at the stage depth")
    # Vacuous generators (positions without full-depth descendants) are
    # dropped: they exclude nothing and may be terminal in a taboo tree.
    complement = _complement_generators(current, union_leaves, deepest + 2, strict=False)
    finishing = build_base_covering(
        current, complement, k, frontier_max=frontier_max, node_max=node_max
    )
    return compose(composite, finishing), k + 2
