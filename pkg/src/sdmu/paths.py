"""Counting semidirected paths to leaves and to hybrid nodes.

Paths are simple, may traverse undirected edges either way and directed edges
only forward, and the zero-length path counts.  In an acyclic network the
undirected classes are trees and the contraction is a DAG, so the number of
paths from a node depends only on its class:

    total(C) = sum over z in C of own(z) + sum over arcs z -> y of total([y])

which a reverse topological sweep over the contraction evaluates in
O(|V| + |E|) per coordinate.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Union

from .net import Network, NetworkError

ORACLE_EDGE_GUARD = 64


class PathError(NetworkError):
    pass


@dataclass(frozen=True)
class Leaf:
    label: str


class AnyHybrid:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "ANY_HYBRID"


ANY_HYBRID = AnyHybrid()
PathTarget = Union[Leaf, AnyHybrid]


def reverse_class_order(net: Network) -> list[int]:
    """Class indices with every class after all classes it has arcs into."""
    cls = net.classes
    n = len(net.class_members)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for e in net.edges.values():
        if e.directed:
            a, b = cls[e.u], cls[e.v]
            if a == b:
                raise PathError(f"edge {e.id} closes a semidirected cycle")
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
    if len(order) != n:
        raise PathError("network contains a semidirected cycle")
    order.reverse()
    return order


def _matcher(net: Network, target: PathTarget) -> Callable[[str], int]:
    if isinstance(target, AnyHybrid):
        return lambda x: 1 if net.is_hybrid(x) else 0
    if isinstance(target, Leaf):
        if target.label not in net.coordinate:
            raise PathError(f"unknown taxon {target.label!r}")
        node = net.node_of_label.get(target.label)
        return lambda x: 1 if x == node else 0
    raise TypeError(f"not a path target: {target!r}")


def _check_node(net: Network, node: str) -> None:
    if node not in net.classes:
        raise PathError(f"unknown node {node!r}")


def _count(graph: Network, source: str, own: Callable[[str], int]) -> int:
    cls = graph.classes
    total = [0] * len(graph.class_members)
    for c in reverse_class_order(graph):
        s = 0
        for z in graph.class_members[c]:
            s += own(z)
            for eid in graph.out_edges(z):
                s += total[cls[graph.edges[eid].v]]
        total[c] = s
    return total[cls[source]]


def count_paths(net: Network, source: str, target: PathTarget) -> int:
    _check_node(net, source)
    return _count(net, source, _matcher(net, target))


def count_paths_avoiding(net: Network, source: str, target: PathTarget, edge_id: str) -> int:
    """Paths from ``source`` to ``target`` that do not traverse ``edge_id``.

    Hybrid nodes are those of ``net`` itself, also when the avoided edge is
    one of their incoming edges.
    """
    _check_node(net, source)
    return _count(net.without_edge(edge_id), source, _matcher(net, target))


def own_vector(net: Network, node: str) -> list[int]:
    vec = [0] * (len(net.taxa) + 1)
    if net.is_hybrid(node):
        vec[0] = 1
    lab = net.labels.get(node)
    if lab is not None:
        vec[net.coordinate[lab]] = 1
    return vec


def path_vectors(net: Network) -> tuple[dict[str, list[int]], list[list[int]]]:
    """Per-node and per-class path-count vectors.

    Returns ``(out, total)``: ``out[z]`` counts paths that start at ``z`` and
    leave its class immediately (or stop at ``z``); ``total[c]`` counts all
    paths from any node of class ``c``.  Coordinate 0 sums over hybrid nodes,
    coordinate i counts paths to the leaf with the i-th taxon.
    """
    cls = net.classes
    width = len(net.taxa) + 1
    out: dict[str, list[int]] = {}
    total: list[list[int]] = [[] for _ in net.class_members]
    for c in reverse_class_order(net):
        acc = [0] * width
        for z in net.class_members[c]:
            vec = own_vector(net, z)
            for eid in net.out_edges(z):
                below = total[cls[net.edges[eid].v]]
                for k in range(width):
                    vec[k] += below[k]
            out[z] = vec
            for k in range(width):
                acc[k] += vec[k]
        total[c] = acc
    return out, total


def enumerate_paths_oracle(
    net: Network,
    source: str,
    target: PathTarget,
    avoid: str | None = None,
    guard: int = ORACLE_EDGE_GUARD,
) -> list[tuple[str, ...]]:
    """Every simple path from ``source`` to ``target`` by exhaustive search.

    Independent of the class-based counting above: it walks the raw edge
    list.  Each path is returned as its sequence of edge ids.
    """
    if len(net.edges) > guard:
        raise PathError(f"oracle limited to {guard} edges, network has {len(net.edges)}")
    _check_node(net, source)
    hit = _matcher(net, target)
    steps: dict[str, list[tuple[str, str]]] = {x: [] for x in net.nodes}
    for e in net.edges.values():
        if e.id == avoid:
            continue
        steps[e.u].append((e.id, e.v))
        if not e.directed:
            steps[e.v].append((e.id, e.u))

    found: list[tuple[str, ...]] = []
    visited = {source}
    trail: list[str] = []

    def walk(x: str) -> None:
        if hit(x):
            found.append(tuple(trail))
        for eid, y in steps[x]:
            if y in visited:
                continue
            visited.add(y)
            trail.append(eid)
            walk(y)
            trail.pop()
            visited.discard(y)

    walk(source)
    return found
