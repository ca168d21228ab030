"""Batch command-line interface.

Commands parse a game document, run the corresponding library operation,
and print a deterministic report to standard output (timing goes to
standard error so reports compare byte for byte across runs).

Exit codes: 0 success or verified, 1 usage or parse errors, 2 property
violation (the report then carries a counterexample).  The environment
variable ``UNRAVEL_NODE_MAX`` overrides the node cap used by tree
construction and DOT export.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, field

from .core import (
    InternalInvariantError,
    Player,
    ResourceLimitError,
    Strategy,
    consistent_plays,
    format_label,
    format_position,
    is_winning_strategy,
    position_key,
    random_strategy,
)
from .covering import (
    check_position_map,
    check_strategy_locality,
    check_winning_transfer,
    pullback,
    solve_via_covering,
    verify_lift,
)
from .dot import covering_dot, tree_dot
from .gamedoc import GameDocError, build_arena, format_game, parse_game_bytes, to_document
from .payoff import Closed, ClosedUnion, Open, decided_by_depth, realize
from .randgen import random_game, rng_for
from .solver import prune, solve, transfer_from_pruned
from .unravel import (
    Accept,
    BaseCovering,
    DEFAULT_FRONTIER_MAX,
    DEFAULT_NODE_MAX,
    build_base_covering,
    unravel_union,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VIOLATION = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        raise _UsageError(message)


@dataclass
class Report:
    command: str
    fields: list[tuple[str, str]] = field(default_factory=list)
    checks: list[tuple[str, bool, str]] = field(default_factory=list)
    counterexample: str | None = None

    def add(self, name: str, value) -> None:
        self.fields.append((name, str(value)))

    def check(self, name: str, ok: bool, detail: str = "") -> bool:
        self.checks.append((name, bool(ok), detail))
        return bool(ok)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def render(self) -> str:
        lines = [f"command: {self.command}"]
        lines.extend(f"{name}: {value}" for name, value in self.fields)
        for name, ok, detail in self.checks:
            verdict = "ok" if ok else "FAIL"
            lines.append(f"check {name}: {verdict}" + (f" ({detail})" if detail else ""))
        if self.counterexample is not None:
            lines.append("counterexample:")
            lines.extend("  " + row for row in self.counterexample.splitlines())
        if self.checks:
            lines.append(f"result: {'verified' if self.ok else 'VIOLATION'}")
        return "\n".join(lines) + "\n"


def _node_max() -> int:
    value = os.environ.get("UNRAVEL_NODE_MAX")
    return int(value) if value else DEFAULT_NODE_MAX


def _strategy_lines(strategy: Strategy) -> list[str]:
    rows = sorted(strategy.choices.items(), key=lambda kv: (len(kv[0]), position_key(kv[0])))
    return [f"  {format_position(p)} -> {format_label(move)}" for p, move in rows]


def _load(path: str):
    with open(path, "rb") as handle:
        data = handle.read()
    document = parse_game_bytes(data)
    tree, payoff = build_arena(document)
    return document, tree, payoff


def cmd_solve(args) -> int:
    _, tree, payoff = _load(args.file)
    leaves = realize(tree, payoff)
    solution = solve(tree, leaves)
    report = Report("solve")
    report.add("file", args.file)
    report.add("winner", solution.winner)
    report.check("winning-strategy", is_winning_strategy(tree, leaves, solution.strategy))
    print(report.render(), end="")
    print("strategy:")
    print("\n".join(_strategy_lines(solution.strategy)))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_prune(args) -> int:
    _, tree, payoff = _load(args.file)
    leaves = realize(tree, payoff)
    result = prune(tree)
    report = Report("prune")
    report.add("file", args.file)
    report.add("taboo-determined", len(result.determined))
    report.add("removed", len(result.removed))
    if result.tree is None:
        report.add("root-determined", result.root_determined)
        witness = result.witnesses[()]
        report.check("witness-wins-outright", is_winning_strategy(tree, leaves, witness))
        print(report.render(), end="")
        return EXIT_OK if report.ok else EXIT_VIOLATION
    report.add("remainder-nodes", result.tree.node_count)
    remainder_leaves = leaves & frozenset(result.tree.full_depth_plays())
    solution = solve(result.tree, remainder_leaves)
    direct = solve(tree, leaves)
    report.add("winner", solution.winner)
    report.check("winner-matches-direct-solve", solution.winner is direct.winner)
    transferred = transfer_from_pruned(tree, result, solution.strategy)
    report.check("transferred-strategy-wins", is_winning_strategy(tree, leaves, transferred))
    print(report.render(), end="")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _covering_for(tree, payoff, level, *, union: bool, node_max: int):
    """Build the covering a document's payoff calls for.

    Open payoffs reuse the covering of their closed complement (a covering
    unravels a set iff it unravels the complement); unions go through the
    iterated construction.
    """
    if isinstance(payoff, ClosedUnion):
        if not union:
            raise _UsageError("union payoff requires --union")
        return unravel_union(tree, payoff.parts, level, node_max=node_max)
    if union:
        return unravel_union(tree, [payoff.spec], level, node_max=node_max)
    covering = build_base_covering(tree, payoff.spec, level, node_max=node_max)
    return covering, covering.level + 2


def cmd_unravel(args) -> int:
    _, tree, payoff = _load(args.file)
    leaves = realize(tree, payoff)
    covering, decided_depth = _covering_for(
        tree, payoff, args.k, union=args.union, node_max=_node_max()
    )
    report = Report("unravel")
    report.add("file", args.file)
    report.add("k", covering.level)
    if isinstance(covering, BaseCovering):
        sizes = " ".join(
            f"{format_position(p + (a,))}={len(front)}"
            for (p, a), front in sorted(
                covering.frontiers.items(),
                key=lambda kv: (len(kv[0][0]), format_position(kv[0][0] + (kv[0][1],))),
            )
        )
        report.add("frontier-sizes", sizes if sizes else "none")
        claim_moves = sum(1 << len(front) for front in covering.frontiers.values())
        report.add("claim-moves", claim_moves)
    report.add("source-nodes", covering.source.node_count)
    report.add("decided-at", decided_depth)
    report.check(
        "certificate", decided_by_depth(covering.source, pullback(covering, leaves), decided_depth)
    )
    solution = solve_via_covering(covering, leaves, decided_depth)
    report.add("winner", solution.winner)
    report.check(
        "transferred-strategy-wins", is_winning_strategy(tree, leaves, solution.strategy)
    )
    print(report.render(), end="")
    print("strategy:")
    print("\n".join(_strategy_lines(solution.strategy)))
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _run_covering_checks(
    report, tree, leaves, closed_leaves, covering, decided_depth, samples, seed
) -> None:
    report.check("position-map", *_split(check_position_map(covering)))
    report.check("strategy-locality", *_split(check_strategy_locality(covering, samples, seed)))
    pulled = pullback(covering, leaves)
    report.check("certificate", decided_by_depth(covering.source, pulled, decided_depth))
    if isinstance(covering, BaseCovering):
        # The accept branch realizes the closed orientation of the payoff,
        # whichever orientation the document asked to solve for.
        accepts = frozenset(
            leaf
            for leaf in covering.source.full_depth_plays()
            if isinstance(leaf[covering.level + 1], Accept)
        )
        report.check("pullback-is-accept-set", pullback(covering, closed_leaves) == accepts)
        complement = frozenset(tree.full_depth_plays()) - leaves
        report.check(
            "complement-certificate",
            decided_by_depth(covering.source, pullback(covering, complement), decided_depth),
        )
    rng = rng_for(f"verify:{seed}")
    lift_failures = 0
    plays_checked = 0
    for owner in (Player.I, Player.II):
        for _ in range(max(1, samples // 2)):
            candidate = random_strategy(rng, covering.source, owner)
            mapped = covering.strategy_transform(candidate)
            for play in consistent_plays(covering.target, mapped):
                plays_checked += 1
                if not verify_lift(covering, candidate, play).ok:
                    lift_failures += 1
    report.check("lift", lift_failures == 0, f"{plays_checked} plays")
    transfer = check_winning_transfer(covering, leaves, samples, seed)
    report.check("winning-transfer", *_split(transfer))


def _split(result) -> tuple[bool, str]:
    return bool(result), result.detail or ""


def cmd_verify(args) -> int:
    _, tree, payoff = _load(args.file)
    leaves = realize(tree, payoff)
    closed_leaves = leaves
    if isinstance(payoff, Open):
        closed_leaves = frozenset(tree.full_depth_plays()) - leaves
    covering, decided_depth = _covering_for(
        tree, payoff, args.k, union=isinstance(payoff, ClosedUnion), node_max=_node_max()
    )
    report = Report("verify")
    report.add("file", args.file)
    report.add("k", covering.level)
    report.add("samples", args.samples)
    report.add("seed", args.seed)
    _run_covering_checks(
        report, tree, leaves, closed_leaves, covering, decided_depth, args.samples, args.seed
    )
    print(report.render(), end="")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_fuzz(args) -> int:
    report = Report("fuzz")
    report.add("samples", args.samples)
    report.add("seed", args.seed)
    report.add("depth", args.depth)
    report.add("branch", args.branch)
    passed = 0
    for index in range(args.samples):
        tree, spec = random_game(
            f"{args.seed}:{index}",
            depth=args.depth,
            branching=args.branch,
            taboos=3,
            generators=3,
        )
        leaves = realize(tree, Closed(spec))
        failure = _fuzz_one(tree, spec, leaves, args)
        if failure is not None:
            report.check(f"sample-{index}", False, failure)
            document = to_document(tree, Closed(spec))
            report.counterexample = format_game(document)
            print(report.render(), end="")
            return EXIT_VIOLATION
        passed += 1
    report.check("all-samples", True, f"{passed}/{args.samples}")
    print(report.render(), end="")
    return EXIT_OK


def _fuzz_one(tree, spec, leaves, args) -> str | None:
    solution = solve(tree, leaves)
    if not is_winning_strategy(tree, leaves, solution.strategy):
        return "solver strategy does not win"
    result = prune(tree)
    if result.tree is None:
        if result.root_determined is not solution.winner:
            return "root determination disagrees with solve"
        if not is_winning_strategy(tree, leaves, result.witnesses[()]):
            return "root witness does not win"
    else:
        remainder = leaves & frozenset(result.tree.full_depth_plays())
        pruned_solution = solve(result.tree, remainder)
        if pruned_solution.winner is not solution.winner:
            return "pruned winner differs"
        transferred = transfer_from_pruned(tree, result, pruned_solution.strategy)
        if not is_winning_strategy(tree, leaves, transferred):
            return "transferred strategy does not win"
    try:
        covering = build_base_covering(
            tree, spec, 0, frontier_max=args.zmax, node_max=_node_max()
        )
    except ResourceLimitError:
        return None  # over the caps: nothing to check
    if not check_position_map(covering):
        return "position map axioms fail"
    pulled = pullback(covering, leaves)
    if not decided_by_depth(covering.source, pulled, 2):
        return "pullback not decided at level 2"
    via = solve_via_covering(covering, leaves, 2)
    if via.winner is not solution.winner:
        return "covering winner differs"
    return None


def cmd_export_dot(args) -> int:
    _, tree, payoff = _load(args.file)
    leaves = realize(tree, payoff)
    if args.covering:
        covering, _ = _covering_for(tree, payoff, args.k, union=False, node_max=_node_max())
        text = covering_dot(covering, leaves, node_max=_node_max())
    else:
        text = tree_dot(tree, leaves, node_max=_node_max())
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="unraveling", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="backward-induction solve a game file")
    p.add_argument("file")
    p.set_defaults(run=cmd_solve)

    p = sub.add_parser("prune", help="taboo-prune, solve the remainder, transfer back")
    p.add_argument("file")
    p.set_defaults(run=cmd_prune)

    p = sub.add_parser("unravel", help="build the covering and solve through it")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--union", action="store_true")
    p.set_defaults(run=cmd_unravel)

    p = sub.add_parser("verify", help="run every covering check on a game file")
    p.add_argument("file")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("fuzz", help="random games through the whole pipeline")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--branch", type=int, default=2)
    p.add_argument("--zmax", type=int, default=DEFAULT_FRONTIER_MAX)
    p.set_defaults(run=cmd_fuzz)

    p = sub.add_parser("export-dot", help="graphviz export of a game or covering")
    p.add_argument("file")
    p.add_argument("--covering", action="store_true")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--output")
    p.set_defaults(run=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    started = time.monotonic()
    try:
        args = parser.parse_args(argv)
        code = args.run(args)
    except _UsageError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except GameDocError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ResourceLimitError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_USAGE
    except InternalInvariantError as error:
        print(f"internal invariant violated: {error}", file=sys.stderr)
        return EXIT_VIOLATION
    print(f"time: {time.monotonic() - started:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
