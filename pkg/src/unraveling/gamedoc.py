"""Line-oriented game-description format.

A document has four fixed sections introduced by bare headers::

    GAME v1
    ALPHABET 2
    DEPTH 4
    NODES
    0
    0/0
    1
    TABOOS
    0/0 II
    PAYOFF closed
    1

Positions are slash paths of labels (``-`` is the root); every non-root
position is listed under NODES and must come with its parent.  TABOOS tags
early terminals with the player they are a loss for; the tags must cover
exactly the terminals above full depth.  PAYOFF is ``closed`` or ``open``
followed by generator paths, or ``union`` followed by ``CLOSED`` blocks.

Blank lines and full-line ``#`` comments are accepted on input; the
canonical printer emits neither, and parse/print round-trips canonically
formatted text byte for byte.  Every parse error carries a line (and where
sensible a column) number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .core import GameTree, Player, Position, format_position, position_key
from .payoff import Closed, ClosedSpec, ClosedUnion, Open, PayoffSpec, check_generators

VERSION = "v1"


class GameDocError(ValueError):
    """Parse or validation failure, annotated with its position in the text."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}: " if col is None else f"line {line}, col {col}: "
        super().__init__(where + message)


@dataclass(frozen=True)
class GameDocument:
    version: str
    alphabet: int
    depth: int
    nodes: tuple[Position, ...]
    taboos: tuple[tuple[Position, Player], ...]
    payoff: PayoffSpec


_TOKEN = re.compile(r"\S+")


class _Lines:
    def __init__(self, text: str):
        self.rows: list[tuple[int, list[tuple[int, str]]]] = []
        for number, raw in enumerate(text.splitlines(), start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            tokens = [(m.start() + 1, m.group()) for m in _TOKEN.finditer(raw)]
            self.rows.append((number, tokens))
        self.cursor = 0

    def peek(self):
        return self.rows[self.cursor] if self.cursor < len(self.rows) else None

    def take(self):
        row = self.peek()
        if row is not None:
            self.cursor += 1
        return row

    @property
    def last_line(self) -> int:
        return self.rows[-1][0] if self.rows else 1


def _parse_path(token: str, line: int, col: int, alphabet: int) -> Position:
    if token == "-":
        return ()
    labels = []
    for part in token.split("/"):
        if not part.isdigit():
            raise GameDocError(f"bad path component {part!r}", line, col)
        label = int(part)
        if label >= alphabet:
            raise GameDocError(f"label {label} outside alphabet 0..{alphabet - 1}", line, col)
        labels.append(label)
    return tuple(labels)


def _expect_header(lines: _Lines, keyword: str, argc: int):
    row = lines.take()
    if row is None:
        raise GameDocError(f"missing {keyword} section", lines.last_line)
    line, tokens = row
    if not tokens or tokens[0][1] != keyword:
        raise GameDocError(f"expected {keyword!r}, got {tokens[0][1]!r}", line, tokens[0][0])
    if len(tokens) != 1 + argc:
        raise GameDocError(f"{keyword} takes {argc} argument(s)", line)
    return line, tokens[1:]


def _int_arg(keyword: str, line: int, col: int, token: str) -> int:
    if not token.isdigit():
        raise GameDocError(f"{keyword} must be a non-negative integer", line, col)
    return int(token)


def parse_game(text: str) -> GameDocument:
    """Parse and fully validate a document; the result always builds a
    legal game tree and payoff spec."""
    lines = _Lines(text)

    line, args = _expect_header(lines, "GAME", 1)
    version = args[0][1]
    if version != VERSION:
        raise GameDocError(f"unsupported version {version!r}", line, args[0][0])
    line, args = _expect_header(lines, "ALPHABET", 1)
    alphabet = _int_arg("ALPHABET", line, args[0][0], args[0][1])
    if alphabet < 1:
        raise GameDocError("ALPHABET must be at least 1", line)
    line, args = _expect_header(lines, "DEPTH", 1)
    depth = _int_arg("DEPTH", line, args[0][0], args[0][1])
    if depth < 2 or depth % 2 != 0:
        raise GameDocError("DEPTH must be an even integer >= 2", line)

    _expect_header(lines, "NODES", 0)
    node_lines: dict[Position, int] = {(): 0}
    while True:
        row = lines.peek()
        if row is None:
            raise GameDocError("missing TABOOS section", lines.last_line)
        line, tokens = row
        if tokens[0][1] == "TABOOS":
            break
        if len(tokens) != 1:
            raise GameDocError("node lines carry a single path", line, tokens[1][0])
        col, token = tokens[0]
        position = _parse_path(token, line, col, alphabet)
        if not position:
            raise GameDocError("the root is implicit and not listed", line, col)
        if position in node_lines:
            raise GameDocError(f"duplicate node {token}", line, col)
        if len(position) > depth:
            raise GameDocError(f"node {token} exceeds depth {depth}", line, col)
        node_lines[position] = line
        lines.take()
    for position, line in node_lines.items():
        if position and position[:-1] not in node_lines:
            raise GameDocError(
                f"missing parent of {format_position(position)} (prefix closure)", line
            )

    _expect_header(lines, "TABOOS", 0)
    children = {p: set() for p in node_lines}
    for position in node_lines:
        if position:
            children[position[:-1]].add(position[-1])
    taboos: dict[Position, Player] = {}
    taboo_lines: dict[Position, int] = {}
    while True:
        row = lines.peek()
        if row is None:
            raise GameDocError("missing PAYOFF section", lines.last_line)
        line, tokens = row
        if tokens[0][1] == "PAYOFF":
            break
        if len(tokens) != 2:
            raise GameDocError("taboo lines carry a path and a player", line)
        col, token = tokens[0]
        position = _parse_path(token, line, col, alphabet)
        owner_col, owner_token = tokens[1]
        if owner_token not in ("I", "II"):
            raise GameDocError(f"player must be I or II, got {owner_token!r}", line, owner_col)
        if position not in node_lines:
            raise GameDocError(f"taboo on unknown node {token}", line, col)
        if position in taboos:
            raise GameDocError(f"duplicate taboo for {token}", line, col)
        if children[position]:
            raise GameDocError(f"taboo on non-terminal node {token}", line, col)
        if len(position) == depth:
            raise GameDocError(f"taboo at full depth: {token}", line, col)
        taboos[position] = Player(owner_token)
        taboo_lines[position] = line
        lines.take()

    for position, line in node_lines.items():
        if not children[position] and len(position) < depth and position not in taboos:
            raise GameDocError(
                f"early terminal {format_position(position)} lacks a taboo tag (partition)",
                line or 1,
            )

    header_line, args = _expect_header(lines, "PAYOFF", 1)
    kind_col, kind = args[0]
    if kind not in ("closed", "open", "union"):
        raise GameDocError(f"payoff kind must be closed, open or union, got {kind!r}",
                           header_line, kind_col)

    def read_generators() -> ClosedSpec:
        generators = []
        while True:
            row = lines.peek()
            if row is None:
                break
            line, tokens = row
            if tokens[0][1] == "CLOSED":
                break
            if len(tokens) != 1:
                raise GameDocError("generator lines carry a single path", line, tokens[1][0])
            col, token = tokens[0]
            position = _parse_path(token, line, col, alphabet)
            if position not in node_lines:
                raise GameDocError(f"generator on unknown node {token}", line, col)
            if not 1 <= len(position) < depth:
                raise GameDocError(
                    f"generator {token} outside depth range 1..{depth - 1}", line, col
                )
            if not children[position]:
                raise GameDocError(f"generator {token} is terminal", line, col)
            generators.append(position)
            lines.take()
        return ClosedSpec(generators)

    payoff: PayoffSpec
    if kind in ("closed", "open"):
        spec = read_generators()
        if lines.peek() is not None:
            line, tokens = lines.peek()
            raise GameDocError(f"unexpected {tokens[0][1]!r}", line, tokens[0][0])
        payoff = Closed(spec) if kind == "closed" else Open(spec)
    else:
        parts = []
        row = lines.peek()
        if row is None:
            raise GameDocError("union payoff needs at least one CLOSED block", header_line)
        while lines.peek() is not None:
            line, tokens = lines.peek()
            if tokens[0][1] != "CLOSED":
                raise GameDocError(f"expected 'CLOSED', got {tokens[0][1]!r}", line, tokens[0][0])
            if len(tokens) != 1:
                raise GameDocError("CLOSED takes no arguments", line)
            lines.take()
            parts.append(read_generators())
        payoff = ClosedUnion(parts)

    document = GameDocument(
        version=version,
        alphabet=alphabet,
        depth=depth,
        nodes=tuple(sorted((p for p in node_lines if p), key=lambda p: (len(p), position_key(p)))),
        taboos=tuple(
            sorted(taboos.items(), key=lambda item: (len(item[0]), position_key(item[0])))
        ),
        payoff=payoff,
    )
    try:
        build_arena(document)
    except ValueError as error:  # pragma: no cover - all invariants checked above
        raise GameDocError(str(error)) from error
    return document


def parse_game_bytes(data: bytes) -> GameDocument:
    """Decode UTF-8 and parse; decoding failures become annotated errors."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as error:
        line = data[: error.start].count(b"\n") + 1
        raise GameDocError("not valid UTF-8", line) from error
    return parse_game(text)


def build_arena(document: GameDocument) -> tuple[GameTree, PayoffSpec]:
    tree = GameTree.from_nodes(document.depth, document.nodes, dict(document.taboos))
    payoff = document.payoff
    specs = payoff.parts if isinstance(payoff, ClosedUnion) else (payoff.spec,)
    for spec in specs:
        check_generators(tree, spec)
    return tree, payoff


def format_game(document: GameDocument) -> str:
    """Canonical form: sorted entries, no comments, one token of whitespace."""
    out = [f"GAME {document.version}",
           f"ALPHABET {document.alphabet}",
           f"DEPTH {document.depth}",
           "NODES"]
    ordered_nodes = sorted(document.nodes, key=lambda p: (len(p), position_key(p)))
    out.extend(format_position(p) for p in ordered_nodes)
    out.append("TABOOS")
    out.extend(
        f"{format_position(p)} {owner}"
        for p, owner in sorted(document.taboos, key=lambda item: (len(item[0]), position_key(item[0])))
    )
    payoff = document.payoff
    if isinstance(payoff, Closed):
        out.append("PAYOFF closed")
        out.extend(format_position(g) for g in payoff.spec.generators)
    elif isinstance(payoff, Open):
        out.append("PAYOFF open")
        out.extend(format_position(g) for g in payoff.spec.generators)
    else:
        out.append("PAYOFF union")
        for part in payoff.parts:
            out.append("CLOSED")
            out.extend(format_position(g) for g in part.generators)
    return "\n".join(out) + "\n"


def to_document(tree: GameTree, payoff: PayoffSpec) -> GameDocument:
    """Serialize a base game (integer labels only)."""
    labels = [label for p in tree.positions() for label in p]
    if any(not isinstance(label, int) for label in labels):
        raise ValueError("only base games with integer labels are serializable")
    alphabet = max(labels, default=0) + 1
    return GameDocument(
        version=VERSION,
        alphabet=alphabet,
        depth=tree.depth,
        nodes=tuple(p for p in tree.positions() if p),
        taboos=tuple(tree.taboo_items()),
        payoff=payoff,
    )
