"""Edge-based mu-representations and their canonical text form.

Every edge and every root component of a network contributes one mu-entry:
a multiset of one or two tagged mu-vectors.  A mu-vector has ``n + 1``
coordinates; coordinate 0 counts paths to hybrid nodes and coordinate ``i``
counts paths to the leaf carrying the ``i``-th taxon.

Tags are ordered ``t < h < r < i`` and tagged vectors compare by
``(vector, tag)``.  Entries and representations are stored sorted, so equal
multisets have equal Python values and equal serializations.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .net import Network, NetworkError, RootComponent, root_components, unresolved_admissible
from .paths import path_vectors

Vector = tuple[int, ...]


class Tag(enum.IntEnum):
    T = 0
    H = 1
    R = 2
    I = 3  # noqa: E741

    @property
    def letter(self) -> str:
        return self.name.lower()

    @classmethod
    def from_letter(cls, letter: str) -> Tag:
        return cls[letter.upper()]


class TaggedVector(NamedTuple):
    vector: Vector
    tag: Tag

    def __str__(self) -> str:
        return ",".join(map(str, self.vector)) + ":" + self.tag.letter


MuEntry = tuple[TaggedVector, ...]


def make_entry(*items: tuple[Vector, Tag]) -> MuEntry:
    if not 1 <= len(items) <= 2:
        raise ValueError("a mu-entry holds one or two tagged vectors")
    return tuple(sorted(TaggedVector(tuple(v), Tag(t)) for v, t in items))


def format_entry(entry: MuEntry) -> str:
    return ";".join(str(tv) for tv in entry)


def delta(n: int, *coords: int) -> Vector:
    """Indicator vector of ``coords`` in ``{0, ..., n}``."""
    vec = [0] * (n + 1)
    for c in coords:
        vec[c] = 1
    return tuple(vec)


@dataclass(frozen=True)
class MuRepresentation:
    taxa: tuple[str, ...]
    entries: tuple[MuEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "taxa", tuple(self.taxa))
        entries = tuple(sorted(tuple(sorted(e)) for e in self.entries))
        width = len(self.taxa) + 1
        for e in entries:
            if not 1 <= len(e) <= 2:
                raise ValueError("a mu-entry holds one or two tagged vectors")
            for tv in e:
                if len(tv.vector) != width:
                    raise ValueError(f"mu-vector {tv.vector} does not have {width} coordinates")
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return len(self.taxa)

    def __len__(self) -> int:
        return len(self.entries)

    def counts(self) -> Counter:
        return Counter(self.entries)

    def coordinate(self, label: str) -> int:
        return self.taxa.index(label) + 1

    def delta(self, *labels: str | int) -> Vector:
        """``delta`` over labels; the integer 0 stands for the hybrid coordinate."""
        return delta(self.n, *(0 if x == 0 else self.coordinate(x) for x in labels))

    def without_tag(self, tag: Tag) -> Counter:
        """Multiset of entries after dropping every vector carrying ``tag``."""
        out: Counter = Counter()
        for e in self.entries:
            kept = tuple(tv for tv in e if tv.tag != tag)
            if kept:
                out[kept] += 1
        return out

    def __str__(self) -> str:
        return canonical_serialize(self)


# ---------------------------------------------------------------------------
# computing mu(N)


class _Vectors:
    """Path-count vectors for all edges and classes of one network."""

    def __init__(self, net: Network) -> None:
        self.net = net
        self.out, self.total = path_vectors(net)
        self.side: dict[tuple[str, str], Vector] = {}
        for members in net.class_members:
            if len(members) > 1:
                self._split_class(members)

    def _split_class(self, members: list[str]) -> None:
        # subtree sums over the undirected tree of one class
        net = self.net
        root = members[0]
        parent_edge: dict[str, str | None] = {root: None}
        order = []
        queue = deque([root])
        while queue:
            x = queue.popleft()
            order.append(x)
            for eid in net.undirected_edges(x):
                y = net.edges[eid].other(x)
                if y not in parent_edge:
                    parent_edge[y] = eid
                    queue.append(y)
        sub = {x: list(self.out[x]) for x in members}
        total = self.class_total(root)
        for x in reversed(order):
            eid = parent_edge[x]
            if eid is None:
                continue
            p = net.edges[eid].other(x)
            below = sub[x]
            self.side[(eid, x)] = tuple(below)
            self.side[(eid, p)] = tuple(t - b for t, b in zip(total, below))
            acc = sub[p]
            for k in range(len(acc)):
                acc[k] += below[k]

    def class_total(self, node: str) -> list[int]:
        return self.total[self.net.classes[node]]

    def from_end(self, edge_id: str, node: str) -> Vector:
        """mu(e, node): paths from ``node`` that avoid edge ``e``."""
        e = self.net.edges[edge_id]
        if not e.directed:
            return self.side[(edge_id, node)]
        head = self.class_total(e.v)
        if node == e.v:
            return tuple(head)
        if node == e.u:
            return tuple(t - h for t, h in zip(self.class_total(e.u), head))
        raise NetworkError(f"node {node!r} is not an endpoint of edge {edge_id!r}")


def _edge_entry(vecs: _Vectors, unresolved: dict[str, RootComponent], edge_id: str) -> MuEntry:
    net = vecs.net
    e = net.edges[edge_id]
    if not e.directed:
        return make_entry((vecs.from_end(e.id, e.v), Tag.T), (vecs.from_end(e.id, e.u), Tag.T))
    tag = Tag.H if net.is_hybrid(e.v) else Tag.T
    head = vecs.from_end(e.id, e.v)
    if e.id in unresolved:
        # the tail side equals mu(T) minus the head side
        return make_entry((head, tag), (vecs.from_end(e.id, e.u), Tag.I))
    return make_entry((head, tag))


def edge_mu_entry(net: Network, edge_id: str) -> MuEntry:
    if edge_id not in net.edges:
        raise NetworkError(f"unknown edge {edge_id!r}")
    return _edge_entry(_Vectors(net), unresolved_admissible(net), edge_id)


def root_mu_entry(net: Network, comp: RootComponent) -> MuEntry:
    if comp not in root_components(net):
        raise NetworkError("not a root component of this network")
    vecs = _Vectors(net)
    return make_entry((tuple(vecs.class_total(next(iter(comp.nodes)))), Tag.R))


def mu_representation(net: Network) -> MuRepresentation:
    vecs = _Vectors(net)
    entries: list[MuEntry] = []
    for comp in root_components(net):
        # an isolated labeled node totals to delta of its label
        entries.append(make_entry((tuple(vecs.class_total(next(iter(comp.nodes)))), Tag.R)))
    unresolved = unresolved_admissible(net)
    for eid in net.edges:
        entries.append(_edge_entry(vecs, unresolved, eid))
    return MuRepresentation(net.taxa, tuple(entries))


def is_trivial_forest(rep: MuRepresentation) -> frozenset[str] | None:
    """Taxa of the trivial forest ``rep`` encodes, or None if it is not one."""
    found: set[str] = set()
    for e in rep.entries:
        if len(e) != 1 or e[0].tag != Tag.R:
            return None
        vec = e[0].vector
        if vec[0] != 0 or sum(vec) != 1 or max(vec) != 1:
            return None
        label = rep.taxa[vec.index(1) - 1]
        if label in found:
            return None
        found.add(label)
    return frozenset(found)


# ---------------------------------------------------------------------------
# text form


class MuParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def canonical_serialize(rep: MuRepresentation) -> str:
    lines = [" ".join(["taxa", *rep.taxa])]
    lines += [format_entry(e) for e in rep.entries]
    return "\n".join(lines) + "\n"


def _parse_tagged(text: str, line: int, col: int, width: int) -> TaggedVector:
    if text.count(":") != 1:
        raise MuParseError("expected '<c0>,...,<cn>:<tag>'", line, col)
    coords, tag = text.split(":")
    if tag not in ("t", "h", "r", "i"):
        raise MuParseError(f"unknown tag {tag!r}", line, col + len(coords) + 1)
    values = []
    offset = col
    for piece in coords.split(","):
        if not piece.isdigit():
            raise MuParseError(f"bad coordinate {piece!r}", line, offset)
        values.append(int(piece))
        offset += len(piece) + 1
    if len(values) != width:
        raise MuParseError(f"expected {width} coordinates, got {len(values)}", line, col)
    return TaggedVector(tuple(values), Tag.from_letter(tag))


def parse_mu(text: str) -> MuRepresentation:
    taxa: tuple[str, ...] | None = None
    entries: list[MuEntry] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if taxa is None:
            head = stripped.split()
            if head[0] != "taxa":
                raise MuParseError("first line must be 'taxa <labels...>'", lineno)
            taxa = tuple(head[1:])
            if len(set(taxa)) != len(taxa):
                raise MuParseError("repeated taxon label", lineno)
            continue
        col = raw.index(stripped[0]) + 1
        parts = stripped.split(";")
        if len(parts) > 2:
            raise MuParseError("a mu-entry holds at most two tagged vectors", lineno, col)
        entry = []
        for part in parts:
            entry.append(_parse_tagged(part, lineno, col, len(taxa) + 1))
            col += len(part) + 1
        entries.append(tuple(sorted(entry)))
    if taxa is None:
        raise MuParseError("missing 'taxa' header", 1)
    return MuRepresentation(taxa, tuple(entries))


def entries_from_strings(taxa: Iterable[str], rows: Iterable[str]) -> MuRepresentation:
    """Build a representation from compact rows such as ``"200110t,100011t"``.

    Each row lists tagged vectors separated by commas; a vector is its
    single-digit coordinates followed by the tag letter.
    """
    entries = []
    for row in rows:
        items = []
        for tok in row.replace(" ", "").split(","):
            items.append((tuple(int(c) for c in tok[:-1]), Tag.from_letter(tok[-1])))
        entries.append(make_entry(*items))
    return MuRepresentation(tuple(taxa), tuple(entries))
