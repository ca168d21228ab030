"""Seeded random games for fuzzing and property suites.

All generation is driven by string-seeded ``random.Random`` instances, so
identical seeds reproduce identical games on any platform or run.
"""

from __future__ import annotations

import random

from .core import GameTree, Player, Position, is_prefix
from .payoff import ClosedSpec


def rng_for(seed) -> random.Random:
    return random.Random(f"unraveling:{seed}")


def random_tree(
    rng: random.Random,
    *,
    depth: int = 4,
    branching: int = 2,
    taboos: int = 2,
) -> GameTree:
    """Random arena: grow a full tree, then cut an antichain into taboos."""
    children: dict[Position, list[int]] = {}

    def grow(position: Position) -> None:
        if len(position) == depth:
            children[position] = []
            return
        width = rng.randint(1, branching)
        children[position] = list(range(width))
        for label in range(width):
            grow(position + (label,))

    grow(())

    candidates = [p for p in children if 0 < len(p) < depth]
    rng.shuffle(candidates)
    chosen: list[Position] = []
    wanted = rng.randint(0, taboos)
    for candidate in candidates:
        if len(chosen) >= wanted:
            break
        if any(is_prefix(c, candidate) or is_prefix(candidate, c) for c in chosen):
            continue
        chosen.append(candidate)

    taboo: dict[Position, Player] = {}
    for position in chosen:
        for other in [q for q in children if is_prefix(position, q) and q != position]:
            del children[other]
        children[position] = []
        taboo[position] = rng.choice([Player.I, Player.II])
    return GameTree(depth, children, taboo)


def random_closed_spec(
    rng: random.Random,
    tree: GameTree,
    *,
    max_generators: int = 3,
    min_depth: int = 1,
    min_generators: int = 0,
) -> ClosedSpec:
    candidates = [
        p
        for p in tree.positions()
        if min_depth <= len(p) < tree.depth and not tree.is_terminal(p)
    ]
    if not candidates:
        return ClosedSpec()
    count = rng.randint(min(min_generators, len(candidates)), min(max_generators, len(candidates)))
    return ClosedSpec(rng.sample(candidates, count))


def random_game(
    seed,
    *,
    depth: int = 4,
    branching: int = 2,
    taboos: int = 2,
    generators: int = 3,
    min_generator_depth: int = 1,
) -> tuple[GameTree, ClosedSpec]:
    rng = rng_for(seed)
    tree = random_tree(rng, depth=depth, branching=branching, taboos=taboos)
    spec = random_closed_spec(
        rng, tree, max_generators=generators, min_depth=min_generator_depth
    )
    return tree, spec


def random_union_instance(
    seed,
    *,
    depth: int = 6,
    branching: int = 2,
    taboos: int = 2,
    parts: int = 2,
    level: int = 0,
    max_generators: int = 2,
) -> tuple[GameTree, list[ClosedSpec]]:
    """Tree plus closed specs whose generators are deep enough per stage."""
    rng = rng_for(seed)
    tree = random_tree(rng, depth=depth, branching=branching, taboos=taboos)
    specs = []
    for n in range(parts):
        stage = level + n
        stage += stage % 2
        specs.append(
            random_closed_spec(
                rng,
                tree,
                max_generators=max_generators,
                min_depth=stage + 2,
                min_generators=1,
            )
        )
    return tree, specs
