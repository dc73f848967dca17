"""Semidirected L-networks: data model, validation, contraction and root components.

A network is a multigraph whose edges are either directed (``u -> v``) or
undirected.  Leaves carry taxon labels drawn from a fixed, ordered taxon list;
the position of a label in that list is its coordinate in mu-vectors.

Networks are treated as immutable values.  Every operation that changes the
topology returns a new :class:`Network`.
"""

from __future__ import annotations

import enum
import re
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

# Generated ids never collide with user ids that avoid these prefixes.
NODE_PREFIX = "_r"
EDGE_PREFIX = "_e"


class NetworkError(ValueError):
    """Raised for malformed network declarations or misuse of a network."""


def label_key(label: str) -> tuple:
    """Natural sort key: digit runs compare by value, so ``e2 < e10`` and ``9 < 10 < a``."""
    parts = re.findall(r"\d+|\D+", label)
    return tuple((0, int(p), "") if p.isdigit() else (1, 0, p) for p in parts) + ((2, 0, label),)


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    directed: bool

    def __post_init__(self) -> None:
        if not self.directed and self.v < self.u:
            # undirected edges keep a canonical endpoint order
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    def other(self, node: str) -> str:
        if node == self.u:
            return self.v
        if node == self.v:
            return self.u
        raise NetworkError(f"node {node!r} is not an endpoint of edge {self.id!r}")

    @property
    def kind(self) -> str:
        return "D" if self.directed else "U"


class Network:
    """A semidirected network with labeled leaves over an ordered taxon set."""

    def __init__(
        self,
        nodes: Iterable[str],
        edges: Iterable[Edge],
        labels: Mapping[str, str],
        taxa: Iterable[str],
    ) -> None:
        self.nodes: tuple[str, ...] = tuple(dict.fromkeys(nodes))
        self.edges: dict[str, Edge] = {}
        for e in edges:
            if e.id in self.edges:
                raise NetworkError(f"duplicate edge id {e.id!r}")
            self.edges[e.id] = e
        self.labels: dict[str, str] = dict(labels)
        self.taxa: tuple[str, ...] = tuple(taxa)

    # -- basic structure -------------------------------------------------

    def __repr__(self) -> str:
        return (
            f"Network({len(self.nodes)} nodes, {len(self.edges)} edges, "
            f"taxa={list(self.taxa)})"
        )

    def _key(self) -> tuple:
        # declaration order is not part of the value
        return (
            frozenset(self.nodes),
            frozenset(self.edges.values()),
            frozenset(self.labels.items()),
            self.taxa,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Network):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    @cached_property
    def node_of_label(self) -> dict[str, str]:
        return {lab: node for node, lab in self.labels.items()}

    @cached_property
    def coordinate(self) -> dict[str, int]:
        """Map taxon label -> mu-vector coordinate (1-based)."""
        return {lab: i + 1 for i, lab in enumerate(self.taxa)}

    @cached_property
    def _incidence(self) -> tuple[dict, dict, dict]:
        ins: dict[str, list[str]] = {x: [] for x in self.nodes}
        outs: dict[str, list[str]] = {x: [] for x in self.nodes}
        und: dict[str, list[str]] = {x: [] for x in self.nodes}
        for e in self.edges.values():
            if e.directed:
                outs.setdefault(e.u, []).append(e.id)
                ins.setdefault(e.v, []).append(e.id)
            else:
                und.setdefault(e.u, []).append(e.id)
                und.setdefault(e.v, []).append(e.id)
        return ins, outs, und

    def in_edges(self, node: str) -> list[str]:
        return self._incidence[0].get(node, [])

    def out_edges(self, node: str) -> list[str]:
        return self._incidence[1].get(node, [])

    def undirected_edges(self, node: str) -> list[str]:
        return self._incidence[2].get(node, [])

    def incident(self, node: str) -> list[str]:
        return self.in_edges(node) + self.out_edges(node) + self.undirected_edges(node)

    def degree(self, node: str) -> int:
        return len(self.in_edges(node)) + len(self.out_edges(node)) + len(
            self.undirected_edges(node)
        )

    def is_root(self, node: str) -> bool:
        return not self.in_edges(node) and not self.undirected_edges(node)

    def is_leaf(self, node: str) -> bool:
        return not self.out_edges(node) and not self.undirected_edges(node)

    def is_hybrid(self, node: str) -> bool:
        return len(self.in_edges(node)) > 1

    def is_isolated(self, node: str) -> bool:
        return self.degree(node) == 0

    def parent(self, node: str) -> str | None:
        """The unique parent of a tree node, or None for a root."""
        ins = self.in_edges(node)
        if not ins:
            return None
        if len(ins) > 1:
            raise NetworkError(f"node {node!r} is hybrid and has several parents")
        return self.edges[ins[0]].u

    @property
    def leaves(self) -> list[str]:
        return [x for x in self.nodes if self.is_leaf(x)]

    @property
    def hybrids(self) -> list[str]:
        return [x for x in self.nodes if self.is_hybrid(x)]

    def present_taxa(self) -> list[str]:
        """Labels in use, in taxon order."""
        return [t for t in self.taxa if t in self.node_of_label]

    # -- undirected classes and contraction --------------------------------

    @cached_property
    def classes(self) -> dict[str, int]:
        """Map node -> index of its undirected-connectivity class."""
        cls: dict[str, int] = {}
        k = 0
        for start in self.nodes:
            if start in cls:
                continue
            cls[start] = k
            stack = [start]
            while stack:
                x = stack.pop()
                for eid in self.undirected_edges(x):
                    y = self.edges[eid].other(x)
                    if y not in cls:
                        cls[y] = k
                        stack.append(y)
            k += 1
        return cls

    @cached_property
    def class_members(self) -> list[list[str]]:
        members: list[list[str]] = [[] for _ in range(max(self.classes.values(), default=-1) + 1)]
        for x in self.nodes:
            members[self.classes[x]].append(x)
        return members

    # -- derived networks --------------------------------------------------

    def replace(self, **changes) -> Network:
        fields = {
            "nodes": self.nodes,
            "edges": self.edges.values(),
            "labels": self.labels,
            "taxa": self.taxa,
        }
        fields.update(changes)
        return Network(**fields)

    def without_edge(self, edge_id: str) -> Network:
        if edge_id not in self.edges:
            raise NetworkError(f"unknown edge {edge_id!r}")
        return self.replace(edges=[e for e in self.edges.values() if e.id != edge_id])

    def with_taxa(self, taxa: Iterable[str]) -> Network:
        taxa = tuple(taxa)
        missing = set(self.labels.values()) - set(taxa)
        if missing:
            raise NetworkError(f"taxon list lacks labels {sorted(missing, key=label_key)}")
        return self.replace(taxa=taxa)

    def relabeled(self, mapping: Mapping[str, str]) -> Network:
        """Apply a permutation of taxon labels (taxon order is unchanged)."""
        labels = {node: mapping.get(lab, lab) for node, lab in self.labels.items()}
        return self.replace(labels=labels)

    def renamed(self, mapping: Mapping[str, str]) -> Network:
        """Rename nodes; unmapped nodes keep their ids."""
        r = lambda x: mapping.get(x, x)  # noqa: E731
        return Network(
            [r(x) for x in self.nodes],
            [Edge(e.id, r(e.u), r(e.v), e.directed) for e in self.edges.values()],
            {r(x): lab for x, lab in self.labels.items()},
            self.taxa,
        )


# ---------------------------------------------------------------------------
# construction


def build_network(
    node_decls: Iterable[str] | None,
    edge_decls: Iterable[tuple],
    leaf_decls: Iterable[tuple[str, str]],
    taxa_order: Iterable[str] | None = None,
) -> Network:
    """Assemble an (unvalidated) network from declarations.

    ``edge_decls`` holds ``(u, v, directed)`` or ``(u, v, directed, edge_id)``
    tuples.  When ``node_decls`` is None the node set is inferred from edges
    and leaf declarations; otherwise edges may reference undeclared nodes and
    :func:`validate` reports them as dangling.
    """
    leaf_decls = list(leaf_decls)
    labels: dict[str, str] = {}
    seen_labels: set[str] = set()
    for node, lab in leaf_decls:
        if lab in seen_labels:
            raise NetworkError(f"duplicate label {lab!r}")
        if node in labels:
            raise NetworkError(f"node {node!r} labeled twice")
        seen_labels.add(lab)
        labels[node] = lab

    edge_decls = list(edge_decls)
    used_ids = {d[3] for d in edge_decls if len(d) > 3 and d[3] is not None}
    edges: list[Edge] = []
    seen_ids: set[str] = set()
    k = 0
    for decl in edge_decls:
        u, v, directed = decl[0], decl[1], bool(decl[2])
        eid = decl[3] if len(decl) > 3 else None
        if eid is None:
            k += 1
            while f"e{k}" in used_ids:
                k += 1
            eid = f"e{k}"
        if eid in seen_ids:
            raise NetworkError(f"duplicate edge id {eid!r}")
        seen_ids.add(eid)
        edges.append(Edge(eid, u, v, directed))

    if node_decls is None:
        nodes: list[str] = []
        for e in edges:
            nodes += [e.u, e.v]
        nodes += [node for node, _ in leaf_decls]
    else:
        nodes = list(node_decls)
        known = set(nodes)
        for node in labels:
            if node not in known:
                raise NetworkError(f"label on unknown node {node!r}")

    if taxa_order is None:
        taxa = sorted(seen_labels, key=label_key)
    else:
        taxa = list(taxa_order)
        if len(set(taxa)) != len(taxa):
            raise NetworkError("taxon ordering repeats a label")
        missing = seen_labels - set(taxa)
        if missing:
            raise NetworkError(
                f"taxon ordering lacks labels {sorted(missing, key=label_key)}"
            )
    return Network(nodes, edges, labels, taxa)


# ---------------------------------------------------------------------------
# validation


class Code(str, enum.Enum):
    UNDIRECTED_CYCLE = "UndirectedCycle"
    DIRECTED_CYCLE = "DirectedCycleInContraction"
    NOT_COMPLETE = "NotComplete"
    NOT_BINARY = "NotBinary"
    LABEL_REUSE = "LabelReuse"
    DANGLING_EDGE = "DanglingEdge"
    UNLABELED_LEAF = "UnlabeledLeaf"
    UNKNOWN_LABEL = "UnknownLabel"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Violation:
    code: Code
    message: str
    ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[Code]:
        return {v.code for v in self.violations}

    def format(self) -> str:
        if self.ok:
            return "ok"
        lines = ["invalid"]
        for v in self.violations:
            ids = " ".join(v.ids)
            lines.append(f"{v.code}: {v.message}" + (f" [{ids}]" if ids else ""))
        return "\n".join(lines)


def _contraction_order(net: Network) -> list[int] | None:
    """Topological order of the contraction's classes, or None if it has a cycle."""
    cls = net.classes
    n = len(net.class_members)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for e in net.edges.values():
        if e.directed and e.u in cls and e.v in cls:
            a, b = cls[e.u], cls[e.v]
            succ[a].append(b)
            indeg[b] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    order = []
    while queue:
        i = queue.popleft()
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    return order if len(order) == n else None


def validate(net: Network, allow_nonbinary: bool = False) -> ValidationReport:
    out: list[Violation] = []
    known = set(net.nodes)

    for e in net.edges.values():
        missing = [x for x in (e.u, e.v) if x not in known]
        if missing:
            out.append(Violation(Code.DANGLING_EDGE, f"edge {e.id} references unknown node", (e.id, *missing)))
    if out:
        # structural checks below assume every endpoint is known
        return ValidationReport(tuple(out))

    by_label: dict[str, list[str]] = defaultdict(list)
    for node, lab in net.labels.items():
        by_label[lab].append(node)
    for lab, nodes in by_label.items():
        if len(nodes) > 1:
            out.append(Violation(Code.LABEL_REUSE, f"label {lab} on several nodes", tuple(nodes)))
    taxa = set(net.taxa)
    for node, lab in net.labels.items():
        if lab not in taxa:
            out.append(Violation(Code.UNKNOWN_LABEL, f"label {lab} not in taxon list", (node,)))
        if net.out_edges(node) or net.undirected_edges(node):
            out.append(Violation(Code.NOT_COMPLETE, f"labeled node {node} is not a leaf", (node,)))
        elif len(net.in_edges(node)) > 1:
            out.append(Violation(Code.NOT_COMPLETE, f"leaf {node} is not a tree node", (node,)))

    for node in net.nodes:
        if node in net.labels:
            continue
        if net.is_leaf(node):
            out.append(Violation(Code.UNLABELED_LEAF, f"leaf {node} has no label", (node,)))
        elif net.degree(node) == 1 and net.undirected_edges(node):
            out.append(Violation(Code.NOT_COMPLETE, f"pendant node {node} is attached by an undirected edge", (node,)))

    cls = net.classes
    und_count = [0] * len(net.class_members)
    for e in net.edges.values():
        if not e.directed:
            und_count[cls[e.u]] += 1
    for i, members in enumerate(net.class_members):
        if und_count[i] != len(members) - 1:
            out.append(Violation(Code.UNDIRECTED_CYCLE, "undirected edges form a cycle", tuple(members)))

    for e in net.edges.values():
        if e.directed and cls[e.u] == cls[e.v]:
            out.append(Violation(Code.DIRECTED_CYCLE, f"directed edge {e.id} inside an undirected class", (e.id,)))
    if _contraction_order(net) is None:
        out.append(Violation(Code.DIRECTED_CYCLE, "contraction has a directed cycle", _cycle_nodes(net)))

    for i, members in enumerate(net.class_members):
        if len(members) > 1 and any(net.in_edges(x) for x in members):
            entering = [eid for x in members for eid in net.in_edges(x)]
            out.append(Violation(Code.NOT_COMPLETE, "non-trivial undirected class has incoming edges", tuple(entering)))

    if not allow_nonbinary:
        for node in net.nodes:
            deg = net.degree(node)
            if net.is_root(node):
                allowed = {0, 2, 3} if not net.is_leaf(node) else {0}
            elif net.is_leaf(node):
                allowed = {0, 1}
            else:
                allowed = {3}
            if deg not in allowed:
                out.append(Violation(Code.NOT_BINARY, f"node {node} has degree {deg}", (node,)))
    return ValidationReport(tuple(out))


def _cycle_nodes(net: Network) -> tuple[str, ...]:
    """Nodes whose classes lie on or downstream of a contraction cycle."""
    cls = net.classes
    n = len(net.class_members)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for e in net.edges.values():
        if e.directed:
            succ[cls[e.u]].append(cls[e.v])
            indeg[cls[e.v]] += 1
    queue = deque(i for i in range(n) if indeg[i] == 0)
    done = set()
    while queue:
        i = queue.popleft()
        done.add(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                queue.append(j)
    return tuple(x for i in range(n) if i not in done for x in net.class_members[i])


def check_valid(net: Network, allow_nonbinary: bool = False) -> None:
    report = validate(net, allow_nonbinary=allow_nonbinary)
    if not report.ok:
        raise NetworkError(report.format())


# ---------------------------------------------------------------------------
# contraction and root components


@dataclass(frozen=True)
class Contraction:
    """Directed multigraph on undirected classes; arcs keep their edge ids."""

    members: tuple[frozenset[str], ...]
    arcs: tuple[tuple[int, int, str], ...]

    def sources(self) -> list[int]:
        targets = {b for _, b, _ in self.arcs}
        return [i for i in range(len(self.members)) if i not in targets]

    def is_acyclic(self) -> bool:
        succ: dict[int, list[int]] = defaultdict(list)
        indeg = [0] * len(self.members)
        for a, b, _ in self.arcs:
            succ[a].append(b)
            indeg[b] += 1
        queue = deque(i for i, d in enumerate(indeg) if d == 0)
        seen = 0
        while queue:
            i = queue.popleft()
            seen += 1
            for j in succ[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    queue.append(j)
        return seen == len(self.members)


def contraction(net: Network) -> Contraction:
    cls = net.classes
    arcs = tuple(
        (cls[e.u], cls[e.v], e.id) for e in net.edges.values() if e.directed
    )
    return Contraction(tuple(frozenset(m) for m in net.class_members), arcs)


@dataclass(frozen=True)
class RootComponent:
    nodes: frozenset[str]
    internal_edges: frozenset[str]
    admissible_edges: frozenset[str]
    trivial: bool
    resolved: bool

    @property
    def node(self) -> str:
        """The single node of a trivial component."""
        if not self.trivial:
            raise NetworkError("root component is not trivial")
        return next(iter(self.nodes))


def root_components(net: Network) -> list[RootComponent]:
    cls = net.classes
    has_incoming = set()
    for e in net.edges.values():
        if e.directed:
            has_incoming.add(cls[e.v])
    comps = []
    for i, members in enumerate(net.class_members):
        if i in has_incoming:
            continue
        nodes = frozenset(members)
        internal = frozenset(
            eid for x in members for eid in net.undirected_edges(x)
        )
        adme = internal | frozenset(eid for x in members for eid in net.out_edges(x))
        trivial = len(members) == 1
        resolved = trivial and net.degree(members[0]) in (0, 2)
        comps.append(RootComponent(nodes, internal, adme, trivial, resolved))
    return comps


def unresolved_admissible(net: Network) -> dict[str, RootComponent]:
    """Map each edge admissible for an unresolved root component to it."""
    out: dict[str, RootComponent] = {}
    for comp in root_components(net):
        if not comp.resolved:
            for eid in comp.admissible_edges:
                out[eid] = comp
    return out


def iter_edges_sorted(net: Network) -> Iterator[Edge]:
    return iter(sorted(net.edges.values(), key=lambda e: label_key(e.id)))
