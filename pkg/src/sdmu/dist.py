"""Distance between networks as the multiset symmetric difference of their entries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .mu import MuEntry, MuRepresentation, mu_representation
from .net import Network, label_key


@dataclass(frozen=True)
class DistanceResult:
    value: int
    only_in_first: tuple[MuEntry, ...]
    only_in_second: tuple[MuEntry, ...]


def _width(entries: Sequence[MuEntry]) -> int | None:
    widths = {len(tv.vector) for e in entries for tv in e}
    if len(widths) > 1:
        raise ValueError("mu-vectors of different lengths in one multiset")
    return widths.pop() if widths else None


def multiset_sym_diff(
    entries1: Sequence[MuEntry], entries2: Sequence[MuEntry]
) -> DistanceResult:
    """Sort both sides, then walk them in step."""
    w1, w2 = _width(entries1), _width(entries2)
    if w1 is not None and w2 is not None and w1 != w2:
        raise ValueError(f"mu-vectors have {w1} and {w2} coordinates")
    xs = sorted(tuple(sorted(e)) for e in entries1)
    ys = sorted(tuple(sorted(e)) for e in entries2)
    only1: list[MuEntry] = []
    only2: list[MuEntry] = []
    i = j = 0
    while i < len(xs) and j < len(ys):
        if xs[i] == ys[j]:
            i += 1
            j += 1
        elif xs[i] < ys[j]:
            only1.append(xs[i])
            i += 1
        else:
            only2.append(ys[j])
            j += 1
    only1 += xs[i:]
    only2 += ys[j:]
    return DistanceResult(len(only1) + len(only2), tuple(only1), tuple(only2))


def common_taxa(n1: Network, n2: Network) -> tuple[str, ...]:
    if n1.taxa == n2.taxa:
        return n1.taxa
    return tuple(sorted(set(n1.taxa) | set(n2.taxa), key=label_key))


def rep_distance(r1: MuRepresentation, r2: MuRepresentation) -> DistanceResult:
    if r1.taxa != r2.taxa:
        raise ValueError("mu-representations over different taxon lists")
    return multiset_sym_diff(r1.entries, r2.entries)


def mu_distance(n1: Network, n2: Network) -> DistanceResult:
    taxa = common_taxa(n1, n2)
    r1 = mu_representation(n1.with_taxa(taxa))
    r2 = mu_representation(n2.with_taxa(taxa))
    return multiset_sym_diff(r1.entries, r2.entries)


__all__ = [
    "DistanceResult",
    "common_taxa",
    "mu_distance",
    "multiset_sym_diff",
    "rep_distance",
]
