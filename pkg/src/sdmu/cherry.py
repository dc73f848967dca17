"""Tree and reticulate cherries on networks and on mu-representations.

A pair ``(a, b)`` of leaves is a tree cherry when both leaves hang from the
same parent, and a reticulate cherry when the parent of ``a`` is a hybrid
node fed by the parent of ``b``.  The type suffix records what sits at the
parent of ``b``: a resolved root (r2), an unresolved root (r3), an incoming
directed edge (d) or an undirected edge (u).

Every network operation here has a mu-level twin that works on the entries
alone, so that ``mu(reduce(N)) == reduce(mu(N))``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import NamedTuple

from .mu import MuEntry, MuRepresentation, Tag, TaggedVector, Vector
from .net import (
    EDGE_PREFIX,
    NODE_PREFIX,
    Code,
    Edge,
    Network,
    validate,
)


class CherryError(ValueError):
    pass


class CherryType(str, enum.Enum):
    T_R2 = "T(r2)"
    T_R3 = "T(r3)"
    T_D = "T(d)"
    T_U = "T(u)"
    R_R2 = "R(r2)"
    R_R3 = "R(r3)"
    R_D = "R(d)"
    R_U = "R(u)"

    def __str__(self) -> str:
        return self.value

    @property
    def is_tree(self) -> bool:
        return self.value[0] == "T"

    @property
    def position(self) -> str:
        """What sits at the parent of b: 'r2', 'r3', 'd' or 'u'."""
        return self.value[2:-1]

    @classmethod
    def make(cls, tree: bool, position: str) -> CherryType:
        return cls(f"{'T' if tree else 'R'}({position})")

    @classmethod
    def parse(cls, text: str) -> CherryType:
        try:
            return cls(text.strip())
        except ValueError:
            raise CherryError(f"unknown cherry type {text!r}") from None


@dataclass(frozen=True)
class Cherry:
    """An ordered leaf pair with its type.

    Only ``(a, b, ctype)`` take part in equality; the edge and entry fields
    are filled in by whichever detector produced the cherry.
    """

    a: str
    b: str
    ctype: CherryType
    internal_edge: str | None = field(default=None, compare=False)
    external_edge: str | None = field(default=None, compare=False)
    internal_entry: MuEntry | None = field(default=None, compare=False)
    external_entry: MuEntry | None = field(default=None, compare=False)

    @property
    def key(self) -> tuple[str, str, CherryType]:
        return (self.a, self.b, self.ctype)

    @property
    def is_tree(self) -> bool:
        return self.ctype.is_tree

    def __str__(self) -> str:
        return f"{self.a} {self.b} {self.ctype}"


def _order_key(taxa: tuple[str, ...]):
    pos = {t: i for i, t in enumerate(taxa)}
    return lambda c: (pos[c.a], pos[c.b], not c.is_tree)


# ---------------------------------------------------------------------------
# network level


def _require_binary(net: Network) -> None:
    report = validate(net)
    if Code.NOT_BINARY in report.codes():
        raise CherryError("cherry operations need a binary network")
    if not report.ok:
        raise CherryError(report.format())


def _is_resolved_root(net: Network, node: str) -> bool:
    return net.is_root(node) and net.degree(node) == 2


def _position(net: Network, pb: str, used: set[str]) -> str:
    if net.is_root(pb):
        return "r2" if net.degree(pb) == 2 else "r3"
    rest = [eid for eid in net.incident(pb) if eid not in used]
    if len(rest) != 1:
        raise CherryError(f"node {pb} is not binary")
    return "d" if net.edges[rest[0]].directed else "u"


def _leaf_parent_edge(net: Network, node: str) -> str | None:
    ins = net.in_edges(node)
    return ins[0] if len(ins) == 1 else None


def _classify_net(net: Network, a: str, b: str) -> Cherry | None:
    if a == b:
        return None
    xa, xb = net.node_of_label.get(a), net.node_of_label.get(b)
    if xa is None or xb is None:
        return None
    ea, eb = _leaf_parent_edge(net, xa), _leaf_parent_edge(net, xb)
    if ea is None or eb is None:
        return None
    pa, pb = net.edges[ea].u, net.edges[eb].u
    if pa == pb:
        ctype = CherryType.make(True, _position(net, pb, {ea, eb}))
        return Cherry(a, b, ctype)
    if not net.is_hybrid(pa):
        return None
    into = net.in_edges(pa)
    internal = [eid for eid in into if net.edges[eid].u == pb]
    if not internal:
        return None
    hi = internal[0]
    he = next(eid for eid in into if eid != hi)
    ctype = CherryType.make(False, _position(net, pb, {hi, eb}))
    return Cherry(a, b, ctype, internal_edge=hi, external_edge=he)


def find_cherries_net(net: Network) -> list[Cherry]:
    _require_binary(net)
    found: list[Cherry] = []
    for a in net.present_taxa():
        xa = net.node_of_label[a]
        ea = _leaf_parent_edge(net, xa)
        if ea is None:
            continue
        pa = net.edges[ea].u
        # leaves below p_a (tree cherries) or below a parent of p_a (reticulate)
        tops = [pa]
        if net.is_hybrid(pa):
            tops += list(dict.fromkeys(net.edges[eid].u for eid in net.in_edges(pa)))
        for top in tops:
            for eid in net.out_edges(top):
                y = net.edges[eid].v
                b = net.labels.get(y)
                if b is None or b == a:
                    continue
                c = _classify_net(net, a, b)
                if c is not None:
                    found.append(c)
    found.sort(key=_order_key(net.taxa))
    return found


class _Editor:
    """Mutable scratch copy of a network used while rewriting it."""

    def __init__(self, net: Network) -> None:
        self.nodes = dict.fromkeys(net.nodes)
        self.edges: dict[str, Edge] = dict(net.edges)
        self.labels = dict(net.labels)
        self.taxa = net.taxa
        self._node_k = _max_suffix(self.nodes, NODE_PREFIX)
        self._edge_k = _max_suffix(self.edges, EDGE_PREFIX)

    def new_node(self) -> str:
        self._node_k += 1
        x = f"{NODE_PREFIX}{self._node_k}"
        self.nodes[x] = None
        return x

    def add_edge(self, u: str, v: str, directed: bool) -> str:
        self._edge_k += 1
        eid = f"{EDGE_PREFIX}{self._edge_k}"
        self.edges[eid] = Edge(eid, u, v, directed)
        return eid

    def delete_edge(self, eid: str) -> None:
        del self.edges[eid]

    def delete_node(self, x: str) -> None:
        for eid in self.incident(x):
            del self.edges[eid]
        del self.nodes[x]
        self.labels.pop(x, None)

    def incident(self, x: str) -> list[str]:
        return [e.id for e in self.edges.values() if x in (e.u, e.v)]

    def network(self) -> Network:
        return Network(self.nodes, self.edges.values(), self.labels, self.taxa)

    def suppress_if_possible(self, x: str) -> bool:
        inc = [self.edges[eid] for eid in self.incident(x)]
        outgoing = [e for e in inc if e.directed and e.u == x]
        incoming = [e for e in inc if e.directed and e.v == x]
        undirected = [e for e in inc if not e.directed]
        if not outgoing and not undirected:
            return False  # a leaf
        is_root = not incoming and not undirected
        if len(inc) == 1 and is_root:
            if self._is_hybrid(outgoing[0].v):
                return False
            self.delete_node(x)
            return True
        if len(inc) != 2 or is_root:
            return False
        e1, e2 = inc
        n1, n2 = e1.other(x), e2.other(x)
        if outgoing:
            w = outgoing[0].v
            u = n2 if outgoing[0] is e1 else n1
            new = (u, w, True)
        elif incoming:
            u = incoming[0].u
            w = n2 if incoming[0] is e1 else n1
            new = (u, w, True)
        else:
            new = (n1, n2, False)
        self.delete_node(x)
        self.add_edge(*new)
        return True

    def _is_hybrid(self, x: str) -> bool:
        return sum(1 for e in self.edges.values() if e.directed and e.v == x) > 1


def _max_suffix(ids, prefix: str) -> int:
    pat = re.compile(re.escape(prefix) + r"(\d+)$")
    best = 0
    for x in ids:
        m = pat.match(x)
        if m:
            best = max(best, int(m.group(1)))
    return best


def reduce_cherry_net(net: Network, cherry: Cherry) -> Network:
    _require_binary(net)
    found = _classify_net(net, cherry.a, cherry.b)
    if found is None:
        raise CherryError(f"({cherry.a},{cherry.b}) is not a cherry")
    if found.ctype != cherry.ctype:
        raise CherryError(
            f"({cherry.a},{cherry.b}) has type {found.ctype}, not {cherry.ctype}"
        )
    ed = _Editor(net)
    xa = net.node_of_label[cherry.a]
    if found.is_tree:
        pa = net.edges[net.in_edges(xa)[0]].u
        ed.delete_node(xa)
        ed.suppress_if_possible(pa)
    else:
        hi = found.internal_edge
        pa, pb = net.edges[hi].v, net.edges[hi].u
        chosen = net.edges.get(cherry.internal_edge or "")
        if chosen is not None and chosen.directed and (chosen.u, chosen.v) == (pb, pa):
            # parallel internal/external edges are interchangeable
            hi = chosen.id
        ed.delete_edge(hi)
        ed.suppress_if_possible(pb)
        if not ed.suppress_if_possible(pa):
            raise CherryError(f"could not suppress {pa}")
    return ed.network()


class AddResult(NamedTuple):
    network: Network
    applied: bool


def _check_addition(net: Network, a: str, b: str, ctype: CherryType) -> None:
    if a == b:
        raise CherryError("a cherry needs two distinct taxa")
    if a not in net.coordinate or b not in net.coordinate:
        raise CherryError(f"taxa {a!r} and {b!r} must be in the taxon list")
    xb = net.node_of_label.get(b)
    if xb is None or not net.is_leaf(xb):
        raise CherryError(f"{b!r} is not a leaf")
    xa = net.node_of_label.get(a)
    if ctype.is_tree and xa is not None:
        raise CherryError(f"{a!r} is already in the network")
    if not ctype.is_tree and (xa is None or not net.is_leaf(xa)):
        raise CherryError(f"{a!r} is not a leaf")


def parent_side_applies(net: Network, b: str, ctype: CherryType) -> bool:
    """The part of an addition's case condition that looks only at ``b``."""
    xb = net.node_of_label[b]
    if net.is_isolated(xb):
        return ctype.position == "r2"
    w = net.edges[net.in_edges(xb)[0]].u
    pos = ctype.position
    if pos == "r2":
        return False
    if pos == "r3":
        return _is_resolved_root(net, w)
    if pos == "d":
        # a resolved root above p_b is allowed: reducing such a cherry leaves
        # b directly below that root
        return True
    # an undirected edge below an incoming edge would break completeness
    return not _is_resolved_root(net, w) and not net.in_edges(w)


def addition_applies(net: Network, a: str, b: str, ctype: CherryType) -> bool:
    """Whether the case conditions of an addition hold (preconditions assumed)."""
    if not ctype.is_tree and net.is_isolated(net.node_of_label[a]):
        return False
    return parent_side_applies(net, b, ctype)


def add_cherry_net(net: Network, a: str, b: str, ctype: CherryType | str) -> AddResult:
    """Add ``(a, b)`` with the given type; a no-op when the case does not apply.

    Tree additions need ``a`` absent and ``b`` a leaf, reticulate additions
    need both as leaves.  The directed variants apply whenever ``b`` has a
    parent; the undirected ones also need that parent to be neither a
    resolved root nor the head of any edge.
    """
    ctype = CherryType.parse(ctype) if isinstance(ctype, str) else ctype
    _check_addition(net, a, b, ctype)
    if not addition_applies(net, a, b, ctype):
        return AddResult(net, False)
    xa = net.node_of_label.get(a)
    xb = net.node_of_label[b]
    w = None if net.is_isolated(xb) else net.edges[net.in_edges(xb)[0]].u
    pos = ctype.position

    ed = _Editor(net)
    if ctype.is_tree:
        target = ed.new_node()
        ed.labels[target] = a
    else:
        # subdivide the edge into a; its new middle node becomes the hybrid
        ea = net.in_edges(xa)[0]
        x = net.edges[ea].u
        target = ed.new_node()
        ed.delete_edge(ea)
        ed.add_edge(x, target, True)
        ed.add_edge(target, xa, True)

    if pos == "r3":
        ed.add_edge(w, target, True)
    else:
        pb = ed.new_node()
        if pos != "r2":
            ed.delete_edge(net.in_edges(xb)[0])
            ed.add_edge(w, pb, pos == "d")
        ed.add_edge(pb, target, True)
        ed.add_edge(pb, xb, True)
    return AddResult(ed.network(), True)


# ---------------------------------------------------------------------------
# mu level


class _MuIndex:
    """Entries of a representation indexed by the simple vectors they contain."""

    def __init__(self, rep: MuRepresentation) -> None:
        self.rep = rep
        self.entries = rep.entries
        self.where: dict[Vector, list[int]] = {}
        for k, entry in enumerate(self.entries):
            for vec in dict.fromkeys(tv.vector for tv in entry):
                self.where.setdefault(vec, []).append(k)

    def multiplicity(self, vec: Vector) -> int:
        return len(self.where.get(vec, ()))

    def tagged(self, k: int, vec: Vector) -> TaggedVector:
        return next(tv for tv in self.entries[k] if tv.vector == vec)

    def inverse(self, k: int, vec: Vector) -> TaggedVector | None:
        entry = self.entries[k]
        if len(entry) == 1:
            return None
        return entry[1] if entry[0].vector == vec else entry[0]

    def _position(self, vec: Vector) -> str | None:
        """Type suffix read off a multiplicity-1 vector; None if impossible."""
        k = self.where[vec][0]
        tag = self.tagged(k, vec).tag
        if tag == Tag.R:
            return "r2"
        if tag == Tag.I:
            return "r3"
        if tag == Tag.T:
            inv = self.inverse(k, vec)
            return "d" if inv is None or inv.tag == Tag.I else "u"
        return None

    def classify(self, a: str, b: str) -> Cherry | None:
        rep = self.rep
        if a == b or a not in rep.taxa or b not in rep.taxa:
            return None
        dab = rep.delta(a, b)
        if self.multiplicity(dab) == 1:
            pos = self._position(dab)
            return None if pos is None else Cherry(a, b, CherryType.make(True, pos))

        d0a = rep.delta(0, a)
        d0ab = rep.delta(0, a, b)
        if self.multiplicity(d0a) != 2:
            return None
        mult = self.multiplicity(d0ab)
        if mult == 1:
            pos = self._position(d0ab)
            if pos is None:
                return None
        elif mult == 2 and all(
            self.tagged(k, d0ab).tag == Tag.I for k in self.where[d0ab]
        ):
            pos = "r3"
        else:
            return None
        internal = self.internal_entry(a, b)
        two = [self.entries[k] for k in self.where[d0a]]
        if two[0] == internal:
            external = two[1]
        elif two[1] == internal:
            external = two[0]
        else:
            external = None
        return Cherry(
            a,
            b,
            CherryType.make(False, pos),
            internal_entry=internal,
            external_entry=external,
        )

    def internal_entry(self, a: str, b: str) -> MuEntry:
        rep = self.rep
        d0a, d0ab = rep.delta(0, a), rep.delta(0, a, b)
        hybrid = TaggedVector(d0a, Tag.H)
        ks = self.where.get(d0ab, [])
        if len(ks) == 2:
            inv_vec = d0a
        elif len(ks) == 1:
            inv = self.inverse(ks[0], d0ab)
            if inv is None or inv.tag == Tag.I:
                return (hybrid,)
            inv_vec = inv.vector
        else:
            raise CherryError(f"delta_(0,{a},{b}) does not occur")
        other = tuple(x + y - z for x, y, z in zip(d0ab, inv_vec, d0a))
        return tuple(sorted((hybrid, TaggedVector(other, Tag.I))))


def find_cherries_mu(rep: MuRepresentation) -> list[Cherry]:
    idx = _MuIndex(rep)
    n = rep.n
    found: list[Cherry] = []
    for vec in idx.where:
        if any(x > 1 for x in vec):
            continue
        ones = [i for i in range(1, n + 1) if vec[i] == 1]
        if len(ones) != 2:
            continue
        x, y = rep.taxa[ones[0] - 1], rep.taxa[ones[1] - 1]
        if vec[0] == 0:
            pairs = [(x, y), (y, x)] if idx.multiplicity(vec) == 1 else []
        else:
            pairs = [(x, y), (y, x)]
        for a, b in pairs:
            c = idx.classify(a, b)
            if c is not None and c.is_tree == (vec[0] == 0):
                found.append(c)
    found.sort(key=_order_key(rep.taxa))
    return found


def internal_entry(rep: MuRepresentation, a: str, b: str) -> MuEntry:
    return _MuIndex(rep).internal_entry(a, b)


class _Work:
    """Entry list under edit for one mu-level reduction."""

    def __init__(self, rep: MuRepresentation) -> None:
        self.entries: list[list[TaggedVector] | None] = [list(e) for e in rep.entries]

    def containing(self, vec: Vector) -> list[int]:
        return [
            k
            for k, e in enumerate(self.entries)
            if e is not None and any(tv.vector == vec for tv in e)
        ]

    def the_entry(self, vec: Vector, what: str) -> int:
        ks = self.containing(vec)
        if len(ks) != 1:
            raise CherryError(f"{what} occurs {len(ks)} times, expected once")
        return ks[0]

    def remove_entry_of(self, vec: Vector, what: str) -> None:
        self.entries[self.the_entry(vec, what)] = None

    def _pos(self, k: int, vec: Vector) -> int:
        e = self.entries[k]
        return next(i for i, tv in enumerate(e) if tv.vector == vec)

    def remove_vector(self, k: int, vec: Vector, what: str) -> None:
        e = self.entries[k]
        if len(e) != 2:
            raise CherryError(f"cannot drop {what} from a single-vector entry")
        del e[self._pos(k, vec)]

    def remove_inverse(self, vec: Vector, what: str) -> None:
        k = self.the_entry(vec, what)
        e = self.entries[k]
        if len(e) != 2:
            raise CherryError(f"{what} has no inverse")
        del e[1 - self._pos(k, vec)]

    def retag_inverse(self, vec: Vector, tag: Tag, what: str) -> None:
        k = self.the_entry(vec, what)
        e = self.entries[k]
        if len(e) != 2:
            raise CherryError(f"{what} has no inverse")
        j = 1 - self._pos(k, vec)
        e[j] = TaggedVector(e[j].vector, tag)

    def remove_equal(self, entry: MuEntry, what: str) -> None:
        target = list(entry)
        for k, e in enumerate(self.entries):
            if e is not None and sorted(e) == target:
                self.entries[k] = None
                return
        raise CherryError(f"{what} not found")

    def finish(self, taxa: tuple[str, ...], remap) -> MuRepresentation:
        out = []
        for e in self.entries:
            if e is None:
                continue
            new = []
            for tv in e:
                vec = remap(list(tv.vector))
                if min(vec) < 0:
                    raise CherryError("reduction produced a negative path count")
                new.append(TaggedVector(tuple(vec), tv.tag))
            out.append(tuple(sorted(new)))
        return MuRepresentation(taxa, tuple(out))


def reduce_cherry_mu(rep: MuRepresentation, cherry: Cherry) -> MuRepresentation:
    idx = _MuIndex(rep)
    found = idx.classify(cherry.a, cherry.b)
    if found is None:
        raise CherryError(f"({cherry.a},{cherry.b}) is not a cherry")
    if found.ctype != cherry.ctype:
        raise CherryError(
            f"({cherry.a},{cherry.b}) has type {found.ctype}, not {cherry.ctype}"
        )
    a, b = cherry.a, cherry.b
    ia, ib = rep.coordinate(a), rep.coordinate(b)
    da, db = rep.delta(a), rep.delta(b)
    pos = found.ctype.position
    work = _Work(rep)

    if found.is_tree:
        dab = rep.delta(a, b)
        if pos in ("r2", "d"):
            work.remove_entry_of(db, "delta_b")
        elif pos == "r3":
            work.remove_inverse(db, "delta_b")
            work.remove_vector(work.the_entry(dab, "delta_ab"), dab, "delta_ab")
        else:
            work.remove_entry_of(db, "delta_b")
            work.retag_inverse(dab, Tag.I, "delta_ab")
        work.remove_entry_of(da, "delta_a")

        def remap(v: list[int]) -> list[int]:
            v[ia] = 0
            return v

        return work.finish(rep.taxa, remap)

    d0a, d0ab = rep.delta(0, a), rep.delta(0, a, b)
    internal = found.internal_entry
    if pos in ("r2", "d"):
        work.remove_entry_of(db, "delta_b")
    elif pos == "r3":
        work.remove_inverse(db, "delta_b")
        ks = [
            k
            for k in work.containing(d0ab)
            if work.entries[k][work._pos(k, d0ab)].tag == Tag.I
        ]
        if not ks:
            raise CherryError("no i-tagged delta_0ab to drop")
        work.remove_vector(ks[0], d0ab, "delta_0ab")
    else:
        work.remove_entry_of(db, "delta_b")
        work.retag_inverse(d0ab, Tag.I, "delta_0ab")
    work.remove_entry_of(da, "delta_a")
    work.remove_equal(internal, "internal entry")
    left = [
        k
        for k in work.containing(d0a)
        if work.entries[k][work._pos(k, d0a)].tag == Tag.H
    ]
    if len(left) != 1:
        raise CherryError(f"expected one remaining hybrid delta_0a, found {len(left)}")
    e = work.entries[left[0]]
    j = work._pos(left[0], d0a)
    e[j] = TaggedVector(d0a, Tag.T)

    def remap(v: list[int]) -> list[int]:
        # the zero-length path at b does not pass through p_b, so delta_b
        # (kept only by r3 reductions) is left as it is
        if tuple(v) == db:
            return v
        m0, ma, mb = v[0], v[ia], v[ib]
        v[0], v[ia], v[ib] = m0 - ma, ma - mb, mb
        return v

    return work.finish(rep.taxa, remap)


__all__ = [
    "AddResult",
    "Cherry",
    "CherryError",
    "CherryType",
    "add_cherry_net",
    "addition_applies",
    "parent_side_applies",
    "find_cherries_mu",
    "find_cherries_net",
    "internal_entry",
    "reduce_cherry_mu",
    "reduce_cherry_net",
]
