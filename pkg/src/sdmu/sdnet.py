"""Reading and writing the line-oriented ``.sdnet`` network format.

Each non-blank line holds one declaration (``#`` starts a comment)::

    T 1 2 3          optional taxon ordering (superset of used labels)
    L x 1            node x is a leaf labeled 1
    D u v [id]       directed edge u -> v
    U u v [id]       undirected edge u - v

Repeated ``D``/``U`` lines create parallel edges.  The optional trailing
edge id is kept verbatim; edges without one are numbered ``e1, e2, ...``.
"""

from __future__ import annotations

from pathlib import Path

from .net import Network, NetworkError, build_network, iter_edges_sorted


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _tokens(raw: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with 1-based column numbers."""
    out = []
    i = 0
    while i < len(raw):
        if raw[i].isspace():
            i += 1
            continue
        j = i
        while j < len(raw) and not raw[j].isspace():
            j += 1
        out.append((raw[i:j], i + 1))
        i = j
    return out


def parse_sdnet(text: str) -> Network:
    nodes: list[str] = []
    edges: list[tuple] = []
    leaves: list[tuple[str, str]] = []
    taxa: list[str] | None = None
    seen_labels: set[str] = set()
    seen_ids: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        toks = _tokens(raw)
        if not toks:
            continue
        (kw, col), args = toks[0], toks[1:]
        if kw == "T":
            if taxa is not None:
                raise ParseError("taxon ordering given twice", lineno, col)
            taxa = [t for t, _ in args]
        elif kw == "L":
            if len(args) != 2:
                raise ParseError("expected 'L <node> <label>'", lineno, col)
            if args[1][0] in seen_labels:
                raise ParseError(f"duplicate label {args[1][0]!r}", lineno, args[1][1])
            seen_labels.add(args[1][0])
            leaves.append((args[0][0], args[1][0]))
            nodes.append(args[0][0])
        elif kw in ("D", "U"):
            if len(args) not in (2, 3):
                raise ParseError(f"expected '{kw} <u> <v> [id]'", lineno, col)
            u, v = args[0][0], args[1][0]
            eid = args[2][0] if len(args) == 3 else None
            if eid is not None:
                if eid in seen_ids:
                    raise ParseError(f"duplicate edge id {eid!r}", lineno, args[2][1])
                seen_ids.add(eid)
            edges.append((u, v, kw == "D", eid))
            nodes += [u, v]
        else:
            raise ParseError(f"unknown declaration {kw!r}", lineno, col)
    try:
        return build_network(nodes, edges, leaves, taxa)
    except NetworkError as exc:
        raise ParseError(str(exc), 1) from exc


def read_sdnet(path: str | Path) -> Network:
    return parse_sdnet(Path(path).read_text(encoding="utf-8"))


def format_sdnet(net: Network) -> str:
    """Deterministic text form: taxa, leaves in taxon order, edges by id."""
    lines = ["T " + " ".join(net.taxa)] if net.taxa else []
    for lab in net.taxa:
        node = net.node_of_label.get(lab)
        if node is not None:
            lines.append(f"L {node} {lab}")
    for e in iter_edges_sorted(net):
        lines.append(f"{e.kind} {e.u} {e.v} {e.id}")
    # unlabeled isolated nodes cannot be expressed; validation rejects them anyway
    return "\n".join(lines) + "\n"


def write_sdnet(net: Network, path: str | Path) -> None:
    Path(path).write_text(format_sdnet(net), encoding="utf-8")


__all__ = [
    "ParseError",
    "format_sdnet",
    "parse_sdnet",
    "read_sdnet",
    "write_sdnet",
]
