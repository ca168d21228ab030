"""Graphviz DOT export for game trees and coverings.

Node ordering follows the canonical position order, so output is
deterministic and diff-friendly.  Taboo terminals render as boxes tagged
with the losing player, payoff members as doubled circles.  A covering
export places source and target in two clusters and draws dashed links
from the decorated levels (the covering's identity level plus one and two)
to their images.
"""

from __future__ import annotations

from .core import GameTree, ResourceLimitError, format_position
from .covering import Covering

_QUOTE = str.maketrans({'"': '\\"', "\\": "\\\\"})


def _quoted(text: str) -> str:
    return '"' + text.translate(_QUOTE) + '"'


def _node_lines(tree: GameTree, payoff_leaves, prefix: str) -> list[str]:
    lines = []
    for position in tree.positions():
        name = _quoted(prefix + format_position(position))
        label = format_position(position)
        owner = tree.taboo_owner(position)
        attrs = [f"label={_quoted(label)}"]
        if owner is not None:
            attrs.append("shape=box")
            attrs.append(f"xlabel={_quoted(f'taboo:{owner}')}")
        elif payoff_leaves is not None and position in payoff_leaves:
            attrs.append("shape=doublecircle")
        else:
            attrs.append("shape=ellipse")
        lines.append(f"  {name} [{', '.join(attrs)}];")
    for position in tree.positions():
        for move in tree.children_of(position):
            child = position + (move,)
            lines.append(
                f"  {_quoted(prefix + format_position(position))} ->"
                f" {_quoted(prefix + format_position(child))};"
            )
    return lines


def _check_size(count: int, node_max: int) -> None:
    if count > node_max:
        raise ResourceLimitError(f"{count} nodes exceed the export cap {node_max}")


def tree_dot(tree: GameTree, payoff_leaves=None, *, node_max: int = 200_000) -> str:
    _check_size(tree.node_count, node_max)
    lines = ["digraph game {", "  rankdir=TB;"]
    lines.extend(_node_lines(tree, payoff_leaves, ""))
    lines.append("}")
    return "\n".join(lines) + "\n"


def covering_dot(covering: Covering, payoff_leaves=None, *, node_max: int = 200_000) -> str:
    """Both trees plus dashed position-map links from the decorated levels."""
    _check_size(covering.source.node_count + covering.target.node_count, node_max)
    lines = ["digraph covering {", "  rankdir=TB;"]
    lines.append("  subgraph cluster_source {")
    lines.append('    label="source";')
    lines.extend("  " + line for line in _node_lines(covering.source, None, "s:"))
    lines.append("  }")
    lines.append("  subgraph cluster_target {")
    lines.append('    label="target";')
    lines.extend("  " + line for line in _node_lines(covering.target, payoff_leaves, "t:"))
    lines.append("  }")
    for position in covering.source.positions():
        if covering.level < len(position) <= covering.level + 2:
            image = covering.position_map[position]
            lines.append(
                f"  {_quoted('s:' + format_position(position))} ->"
                f" {_quoted('t:' + format_position(image))}"
                " [style=dashed, constraint=false];"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
