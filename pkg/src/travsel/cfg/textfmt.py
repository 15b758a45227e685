"""Line-oriented CFG file format.

::

    graph <name> [loop] [branch]
    node <id> <entry|exit|normal> [def=a,b] [use=c] [expr=a+b] [label="..."]
    edge <src> <dst>

``#`` starts a comment.  Node lines may appear in any order but ids must be
dense.  Declared flags, when present, fix the cyclicity class.
"""

from __future__ import annotations

import re
import shlex

from .model import Cfg, CfgError, Stmt, StmtKind, build_cfg

_KINDS = {k.value: k for k in StmtKind}
_ATTR = re.compile(r"(def|use|expr|label)=(.*)")


def _strip_comment(line: str) -> str:
    out = []
    quoted = escaped = False
    for ch in line:
        if escaped:
            escaped = False
        elif ch == "\\" and quoted:
            escaped = True
        elif ch == '"':
            quoted = not quoted
        elif ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out)


def _names(value: str, lineno: int, col: int) -> frozenset[str]:
    items = [v.strip() for v in value.split(",")]
    if not all(items):
        raise CfgError(f"empty name in {value!r}", lineno, col)
    return frozenset(items)


def parse_cfg(text: str) -> Cfg:
    name = None
    flags: set[str] = set()
    stmts: dict[int, Stmt] = {}
    edges: list[tuple[int, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        try:
            words = shlex.split(line, posix=True)
        except ValueError as exc:
            raise CfgError(str(exc), lineno, col) from None
        head, args = words[0], words[1:]

        if head == "graph":
            if name is not None:
                raise CfgError("duplicate graph header", lineno, col)
            if not args:
                raise CfgError("graph header needs a name", lineno, col)
            name = args[0]
            for flag in args[1:]:
                if flag not in ("loop", "branch"):
                    raise CfgError(f"unknown graph flag {flag!r}", lineno, col)
                flags.add(flag)
        elif head == "node":
            if len(args) < 2:
                raise CfgError("node line needs an id and a kind", lineno, col)
            nid = _int(args[0], lineno, col)
            if nid in stmts:
                raise CfgError(f"duplicate node id {nid}", lineno, col)
            if args[1] not in _KINDS:
                raise CfgError(f"unknown node kind {args[1]!r}", lineno, col)
            fields: dict[str, object] = {}
            for attr in args[2:]:
                m = _ATTR.fullmatch(attr)
                if not m:
                    raise CfgError(f"malformed node attribute {attr!r}", lineno, col)
                key, value = m.groups()
                if key in fields:
                    raise CfgError(f"repeated attribute {key!r}", lineno, col)
                fields[key] = value if key == "label" else _names(value, lineno, col)
            try:
                stmts[nid] = Stmt(
                    _KINDS[args[1]],
                    fields.get("def", frozenset()),
                    fields.get("use", frozenset()),
                    fields.get("expr", frozenset()),
                    fields.get("label"),
                )
            except CfgError as exc:
                raise CfgError(str(exc), lineno, col) from None
        elif head == "edge":
            if len(args) != 2:
                raise CfgError("edge line needs exactly two ids", lineno, col)
            edges.append((_int(args[0], lineno, col), _int(args[1], lineno, col)))
        else:
            raise CfgError(f"unknown directive {head!r}", lineno, col)

    if name is None:
        raise CfgError("missing graph header")
    ids = sorted(stmts)
    if ids != list(range(len(ids))):
        raise CfgError(f"node ids must be 0..N-1 without gaps, got {ids}")
    declared = ("loop" in flags, "branch" in flags) if flags else None
    return build_cfg(name, [stmts[i] for i in ids], edges, declared=declared)


def _int(word: str, lineno: int, col: int) -> int:
    if not word.isdigit():
        raise CfgError(f"expected a non-negative integer, got {word!r}", lineno, col)
    return int(word)


def format_cfg(g: Cfg, declare_flags: bool = False) -> str:
    header = f"graph {g.name}"
    if declare_flags:
        if g.cyclicity.has_loop:
            header += " loop"
        if g.cyclicity.has_branch:
            header += " branch"
    lines = [header]
    for node in g.nodes:
        parts = [f"node {node.id} {node.kind.value}"]
        for key, values in (("def", node.defs), ("use", node.uses), ("expr", node.exprs)):
            if values:
                parts.append(f"{key}={','.join(sorted(values))}")
        if node.stmt.label is not None:
            escaped = node.stmt.label.replace("\\", "\\\\").replace('"', '\\"')
            parts.append(f'label="{escaped}"')
        lines.append(" ".join(parts))
    for u, v in g.edges:
        lines.append(f"edge {u} {v}")
    return "\n".join(lines) + "\n"
