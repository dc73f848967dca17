from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netgen import FIXTURES, fixture, orchard_corpus, random_network
from sdmu import ANY_HYBRID, Leaf, MuRepresentation, Tag, canonical_serialize, mu_representation, parse_mu
from sdmu.mu import (
    MuParseError,
    delta,
    edge_mu_entry,
    entries_from_strings,
    is_trivial_forest,
    make_entry,
    root_mu_entry,
)
from sdmu.net import root_components, unresolved_admissible
from sdmu.paths import enumerate_paths_oracle

# transcribed by hand from the worked five-taxon example
TWO_ROOTS_TABLE = [
    "111100r",
    "010000t,101100i",
    "001000t,110100i",
    "100100h,011000i",
    "300121r",
    "100100h,200021i",
    "100010h,200111i",
    "100010h,200111i",
    "000001t,300120i",
    "200110t,100011t",
    "000100t",
    "000010t",
]
TAXA5 = ("1", "2", "3", "4", "5")


def test_two_roots_table_exact():
    net = fixture("two_roots_five_taxa.sdnet")
    assert mu_representation(net) == entries_from_strings(TAXA5, TWO_ROOTS_TABLE)


def test_golden_murep_file():
    golden = (FIXTURES / "two_roots_five_taxa.murep").read_text()
    assert canonical_serialize(entries_from_strings(TAXA5, TWO_ROOTS_TABLE)) == golden
    assert canonical_serialize(mu_representation(fixture("two_roots_five_taxa.sdnet"))) == golden


def test_single_entries():
    net = fixture("two_roots_five_taxa.sdnet")
    assert edge_mu_entry(net, "e8") == make_entry(((2, 0, 0, 1, 1, 0), Tag.T), ((1, 0, 0, 0, 1, 1), Tag.T))
    t2 = next(c for c in root_components(net) if not c.trivial)
    assert root_mu_entry(net, t2) == make_entry(((3, 0, 0, 1, 2, 1), Tag.R))
    assert edge_mu_entry(net, "e9") == make_entry((delta(5, 3), Tag.T))


def test_parallel_pair_entry():
    net = fixture("parallel_pair.sdnet")
    assert edge_mu_entry(net, "he") == make_entry(((1, 1, 0), Tag.H), ((1, 1, 1), Tag.I))
    assert edge_mu_entry(net, "hi") == edge_mu_entry(net, "he")


def test_isolated_node_entry():
    net = fixture("two_roots_five_taxa.sdnet")
    forest = parse_mu("taxa 1 2 3\n0,1,0,0:r\n")
    assert is_trivial_forest(forest) == {"1"}
    from sdmu.orchard import trivial_forest

    assert mu_representation(trivial_forest(("1", "2", "3"), ["1", "3"])) == parse_mu(
        "taxa 1 2 3\n0,1,0,0:r\n0,0,0,1:r\n"
    )
    assert is_trivial_forest(mu_representation(net)) is None


def _oracle_vector(net, node, avoid):
    return tuple(
        len(enumerate_paths_oracle(net, node, t, avoid))
        for t in [ANY_HYBRID] + [Leaf(x) for x in net.taxa]
    )


def _oracle_entry_vectors(net, eid):
    e = net.edges[eid]
    return _oracle_vector(net, e.v, eid), _oracle_vector(net, e.u, eid)


def _check_against_oracle(net):
    rep = mu_representation(net)
    unresolved = unresolved_admissible(net)
    expected = []
    for comp in root_components(net):
        if comp.admissible_edges:
            eid = min(comp.admissible_edges)
            head, tail = _oracle_entry_vectors(net, eid)
            vec = tuple(a + b for a, b in zip(head, tail))
        else:
            vec = _oracle_vector(net, comp.node, None)
        expected.append(make_entry((vec, Tag.R)))
    for e in net.edges.values():
        head, tail = _oracle_entry_vectors(net, e.id)
        if not e.directed:
            expected.append(make_entry((head, Tag.T), (tail, Tag.T)))
            continue
        tag = Tag.H if net.is_hybrid(e.v) else Tag.T
        if e.id in unresolved:
            expected.append(make_entry((head, tag), (tail, Tag.I)))
        else:
            expected.append(make_entry((head, tag)))
    assert rep == MuRepresentation(net.taxa, tuple(expected))


def test_entries_match_path_oracle():
    rng = random.Random(3)
    for k in range(60):
        _check_against_oracle(random_network(rng.randint(1, 6), rng.randint(0, 3), k, roots=1 + k % 3))
    for net in orchard_corpus()[:60]:
        _check_against_oracle(net)


def test_tag_invariants():
    for net in list(orchard_corpus()[:150]) + [fixture("swap24_N.sdnet"), fixture("cherryless_N.sdnet")]:
        rep = mu_representation(net)
        assert len(rep) == len(net.edges) + len(root_components(net))
        for entry in rep.entries:
            tags = [tv.tag for tv in entry]
            assert tags != [Tag.I]
            if Tag.R in tags:
                assert tags == [Tag.R]
            assert all(c >= 0 for tv in entry for c in tv.vector)


def test_serialize_parse_fixed_point():
    for name in ("two_roots_five_taxa.sdnet", "swap24_N.sdnet", "parallel_pair.sdnet"):
        rep = mu_representation(fixture(name))
        text = canonical_serialize(rep)
        assert parse_mu(text) == rep
        assert canonical_serialize(parse_mu(text)) == text


def test_without_tag():
    rep = entries_from_strings(TAXA5, TWO_ROOTS_TABLE)
    stripped = rep.without_tag(Tag.I)
    assert sum(stripped.values()) == 12
    assert stripped[make_entry(((1, 0, 0, 0, 1, 0), Tag.H))] == 2


@pytest.mark.parametrize(
    "text, line",
    [
        ("", 1),
        ("1,0:r\n", 1),
        ("taxa 1\n1,0:x\n", 2),
        ("taxa 1\n1,0,0:r\n", 2),
        ("taxa 1\n1,a:r\n", 2),
        ("taxa 1\n1,0:t;0,1:t;1,1:i\n", 2),
        ("taxa 1\n# c\n\n1,0\n", 4),
        ("taxa 1 1\n", 1),
    ],
)
def test_parse_errors(text, line):
    with pytest.raises(MuParseError) as info:
        parse_mu(text)
    assert info.value.line == line


def test_width_checked():
    with pytest.raises(ValueError):
        MuRepresentation(("1",), (make_entry(((1, 0, 0), Tag.T)),))


tagged = st.tuples(st.lists(st.integers(0, 9), min_size=3, max_size=3).map(tuple), st.sampled_from(list(Tag)))
entries = st.lists(st.lists(tagged, min_size=1, max_size=2), max_size=12)


@given(entries)
@settings(max_examples=150, deadline=None)
def test_canonical_text_round_trip(raw):
    rep = MuRepresentation(("a", "b"), tuple(make_entry(*e) for e in raw))
    text = canonical_serialize(rep)
    assert parse_mu(text) == rep
    shuffled = MuRepresentation(("a", "b"), tuple(reversed(rep.entries)))
    assert canonical_serialize(shuffled) == text
