"""Complete reduction, orchard testing, reconstruction and test generators."""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .cherry import (
    Cherry,
    CherryError,
    CherryType,
    add_cherry_net,
    parent_side_applies,
    find_cherries_mu,
    reduce_cherry_mu,
)
from .mu import MuRepresentation, is_trivial_forest, mu_representation
from .net import Network, NetworkError, build_network, label_key, validate

ISO_GUARD = 14


class NotOrchardError(ValueError):
    def __init__(self, stuck: MuRepresentation, steps: Sequence[ReductionStep] = ()) -> None:
        super().__init__("mu-representation is not orchard: reduction got stuck")
        self.stuck = stuck
        self.steps = tuple(steps)


class VerificationFailed(ValueError):
    pass


class IsomorphismGuardError(ValueError):
    pass


@dataclass(frozen=True)
class ReductionStep:
    cherry: Cherry

    def __str__(self) -> str:
        return str(self.cherry)


@dataclass(frozen=True)
class ReductionTrace:
    steps: tuple[ReductionStep, ...]
    final: MuRepresentation
    complete: bool
    states: tuple[MuRepresentation, ...] = field(default=(), repr=False, compare=False)

    @property
    def sequence(self) -> list[tuple[str, str]]:
        return [(s.cherry.a, s.cherry.b) for s in self.steps]


def reduce_completely(
    rep: MuRepresentation, shuffle_seed: int | None = None
) -> ReductionTrace:
    """Reduce cherries until a trivial forest remains or none is left.

    Without a seed the first cherry in taxon order is taken (tree before
    reticulate on ties); with a seed the candidates are shuffled.  A
    candidate whose reduction fails on a malformed input is skipped.
    """
    rng = random.Random(shuffle_seed) if shuffle_seed is not None else None
    cur = rep
    steps: list[ReductionStep] = []
    states = [cur]
    while is_trivial_forest(cur) is None:
        cherries = find_cherries_mu(cur)
        if rng is not None:
            rng.shuffle(cherries)
        for c in cherries:
            try:
                nxt = reduce_cherry_mu(cur, c)
            except CherryError:
                continue
            steps.append(ReductionStep(c))
            cur = nxt
            states.append(cur)
            break
        else:
            return ReductionTrace(tuple(steps), cur, False, tuple(states))
    return ReductionTrace(tuple(steps), cur, True, tuple(states))


def reduce_sequence(
    rep: MuRepresentation, pairs: Iterable[tuple[str, str]]
) -> ReductionTrace:
    """Reduce the given pairs in order, reading each type off the current state."""
    cur = rep
    steps: list[ReductionStep] = []
    states = [cur]
    for a, b in pairs:
        match = [c for c in find_cherries_mu(cur) if (c.a, c.b) == (a, b)]
        if not match:
            raise CherryError(f"({a},{b}) is not a cherry at step {len(steps) + 1}")
        cur = reduce_cherry_mu(cur, match[0])
        steps.append(ReductionStep(match[0]))
        states.append(cur)
    return ReductionTrace(
        tuple(steps), cur, is_trivial_forest(cur) is not None, tuple(states)
    )


def is_orchard(net: Network) -> bool:
    report = validate(net)
    if not report.ok:
        raise NetworkError(report.format())
    return reduce_completely(mu_representation(net)).complete


def trivial_forest(taxa: Sequence[str], present: Iterable[str]) -> Network:
    present = sorted(present, key=list(taxa).index)
    return build_network(
        [f"leaf_{lab}" for lab in present],
        [],
        [(f"leaf_{lab}", lab) for lab in present],
        taxa,
    )


def rebuild(trace: ReductionTrace) -> Network:
    """Replay a complete trace backwards as typed cherry additions."""
    if not trace.complete:
        raise NotOrchardError(trace.final, trace.steps)
    net = trivial_forest(trace.final.taxa, is_trivial_forest(trace.final))
    for step in reversed(trace.steps):
        c = step.cherry
        try:
            res = add_cherry_net(net, c.a, c.b, c.ctype)
        except CherryError as exc:
            raise VerificationFailed(f"cannot add {c}: {exc}") from exc
        if not res.applied:
            raise VerificationFailed(f"addition of {c} does not apply")
        net = res.network
    return net


def reconstruct(rep: MuRepresentation) -> Network:
    trace = reduce_completely(rep)
    net = rebuild(trace)
    report = validate(net)
    if not report.ok:
        raise VerificationFailed("rebuilt network is invalid:\n" + report.format())
    if mu_representation(net) != rep:
        raise VerificationFailed("rebuilt network has a different mu-representation")
    return net


# ---------------------------------------------------------------------------
# random orchard networks

_ALL_TYPES = tuple(CherryType)


def random_orchard(
    n_taxa: int,
    n_reticulations: int,
    type_weights: Mapping[CherryType | str, float] | None = None,
    seed: int | None = None,
    max_tries: int = 50,
) -> Network:
    """A random orchard network built by typed cherry additions.

    Starts from a random trivial forest; every tree addition brings in a
    new taxon and every reticulate addition creates one hybrid node.
    Deterministic for a given seed.
    """
    return random_orchard_moves(n_taxa, n_reticulations, type_weights, seed, max_tries)[0]


def random_orchard_moves(
    n_taxa: int,
    n_reticulations: int,
    type_weights: Mapping[CherryType | str, float] | None = None,
    seed: int | None = None,
    max_tries: int = 50,
) -> tuple[Network, list[Cherry]]:
    """Like :func:`random_orchard`, also returning the additions in order."""
    if n_taxa < 1:
        raise ValueError("need at least one taxon")
    if n_reticulations < 0:
        raise ValueError("negative reticulation count")
    weights = {t: 1.0 for t in _ALL_TYPES}
    if type_weights is not None:
        weights = {t: 0.0 for t in _ALL_TYPES}
        for key, w in type_weights.items():
            weights[CherryType.parse(key) if isinstance(key, str) else key] = float(w)
    if n_reticulations and n_taxa < 2:
        raise ValueError("reticulations need at least two taxa")
    rng = random.Random(seed)
    for _ in range(max_tries):
        built = _try_random_orchard(n_taxa, n_reticulations, weights, rng)
        if built is not None:
            return built
    raise ValueError(
        f"could not build an orchard network with {n_taxa} taxa and "
        f"{n_reticulations} reticulations under the given type weights"
    )


def _try_random_orchard(
    n: int, r: int, weights: dict[CherryType, float], rng: random.Random
) -> tuple[Network, list[Cherry]] | None:
    taxa = [str(i) for i in range(1, n + 1)]
    k0 = rng.randint(1, min(n, 3))
    present = rng.sample(taxa, k0)
    net = trivial_forest(taxa, present)
    todo = ["T"] * (n - k0) + ["R"] * r
    rng.shuffle(todo)
    moves: list[Cherry] = []
    while todo:
        for i, kind in enumerate(todo):
            move = _random_move(net, kind == "T", weights, rng)
            if move is not None:
                del todo[i]
                break
        else:
            return None
        a, b, ctype = move
        net = add_cherry_net(net, a, b, ctype).network
        moves.append(Cherry(a, b, ctype))
    return net, moves


def _random_move(
    net: Network, tree: bool, weights: dict[CherryType, float], rng: random.Random
) -> tuple[str, str, CherryType] | None:
    leaves = net.present_taxa()
    if tree:
        absent = [t for t in net.taxa if t not in net.node_of_label]
        if not absent or not leaves:
            return None
        partners = [rng.choice(absent)]
    else:
        partners = [x for x in leaves if not net.is_isolated(net.node_of_label[x])]
    kinds = [t for t in _ALL_TYPES if t.is_tree == tree and weights[t] > 0]
    while kinds:
        ctype = rng.choices(kinds, weights=[weights[k] for k in kinds])[0]
        bs = [b for b in leaves if parent_side_applies(net, b, ctype)]
        rng.shuffle(bs)
        for b in bs:
            choices = [x for x in partners if x != b]
            if choices:
                return rng.choice(choices), b, ctype
        kinds.remove(ctype)
    return None


# ---------------------------------------------------------------------------
# isomorphism oracle


def _edge_counts(net: Network) -> tuple[Counter, Counter]:
    directed: Counter = Counter()
    undirected: Counter = Counter()
    for e in net.edges.values():
        if e.directed:
            directed[(e.u, e.v)] += 1
        else:
            undirected[frozenset((e.u, e.v))] += 1
    return directed, undirected


def _refine(nets: Sequence[Network]) -> list[dict[str, int]]:
    """Joint colour refinement; equal colours across networks are comparable."""
    colours = []
    for net in nets:
        colours.append(
            {
                x: (
                    net.labels.get(x),
                    len(net.in_edges(x)),
                    len(net.out_edges(x)),
                    len(net.undirected_edges(x)),
                )
                for x in net.nodes
            }
        )
    while True:
        table: dict = {}
        new = []
        for net, col in zip(nets, colours):
            nxt = {}
            for x in net.nodes:
                around = sorted(
                    [("o", col[net.edges[e].v]) for e in net.out_edges(x)]
                    + [("i", col[net.edges[e].u]) for e in net.in_edges(x)]
                    + [("u", col[net.edges[e].other(x)]) for e in net.undirected_edges(x)],
                    key=repr,
                )
                sig = (col[x], tuple(around))
                nxt[x] = table.setdefault(repr(sig), len(table))
            new.append(nxt)
        sizes = [len(set(c.values())) for c in colours]
        colours = new
        if [len(set(c.values())) for c in new] == sizes:
            return new


def brute_force_isomorphic(n1: Network, n2: Network, guard: int = ISO_GUARD) -> bool:
    """Exhaustive search for a label-preserving isomorphism.

    Nodes are matched only within equal refinement colours, and each partial
    map is checked against every edge multiplicity among mapped nodes.
    """
    inner = max(
        sum(1 for x in n.nodes if x not in n.labels) for n in (n1, n2)
    )
    if inner > guard:
        raise IsomorphismGuardError(f"{inner} unlabeled nodes exceed the guard of {guard}")
    if (len(n1.nodes), len(n1.edges)) != (len(n2.nodes), len(n2.edges)):
        return False
    if set(n1.labels.values()) != set(n2.labels.values()):
        return False
    c1, c2 = _refine([n1, n2])
    if Counter(c1.values()) != Counter(c2.values()):
        return False
    d1, u1 = _edge_counts(n1)
    d2, u2 = _edge_counts(n2)
    by_colour: dict[int, list[str]] = {}
    for y in n2.nodes:
        by_colour.setdefault(c2[y], []).append(y)

    # visit small colour classes first, neighbours of mapped nodes early
    order: list[str] = []
    seen: set[str] = set()
    for start in sorted(n1.nodes, key=lambda x: (len(by_colour[c1[x]]), label_key(x))):
        if start in seen:
            continue
        stack = [start]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            order.append(x)
            for eid in n1.incident(x):
                y = n1.edges[eid].other(x)
                if y not in seen:
                    stack.append(y)

    fwd: dict[str, str] = {}
    used: set[str] = set()

    def consistent(x: str, y: str) -> bool:
        if n1.labels.get(x) != n2.labels.get(y):
            return False
        if d1[(x, x)] != d2[(y, y)]:
            return False
        for x2, y2 in fwd.items():
            if d1[(x, x2)] != d2[(y, y2)] or d1[(x2, x)] != d2[(y2, y)]:
                return False
            if u1[frozenset((x, x2))] != u2[frozenset((y, y2))]:
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        x = order[k]
        for y in by_colour[c1[x]]:
            if y in used or not consistent(x, y):
                continue
            fwd[x] = y
            used.add(y)
            if search(k + 1):
                return True
            del fwd[x]
            used.discard(y)
        return False

    return search(0)


def parallel_pair_components(net: Network) -> list[frozenset[str]]:
    """Connected components shaped like two leaves under a parallel edge pair.

    That is: a root ``u`` with edges ``u -> v`` twice and ``u -> b``, and
    ``v -> a`` for leaves ``a`` and ``b``.
    """
    found = []
    d, _ = _edge_counts(net)
    for (u, v), k in d.items():
        if k != 2 or not net.is_root(u) or net.degree(u) != 3 or net.degree(v) != 3:
            continue
        other = [net.edges[e].v for e in net.out_edges(u) if net.edges[e].v != v]
        below = [net.edges[e].v for e in net.out_edges(v)]
        if len(other) == 1 and len(below) == 1:
            b, a = other[0], below[0]
            if b in net.labels and a in net.labels and net.degree(b) == net.degree(a) == 1:
                found.append(frozenset((u, v, a, b)))
    return found


__all__ = [
    "IsomorphismGuardError",
    "NotOrchardError",
    "ReductionStep",
    "ReductionTrace",
    "VerificationFailed",
    "brute_force_isomorphic",
    "is_orchard",
    "parallel_pair_components",
    "random_orchard",
    "random_orchard_moves",
    "rebuild",
    "reconstruct",
    "reduce_completely",
    "reduce_sequence",
    "trivial_forest",
]
