from __future__ import annotations

import pytest

from netgen import FIXTURES, fixture, orchard_corpus
from sdmu import ParseError, format_sdnet, parse_sdnet, read_sdnet, write_sdnet


def test_round_trip_fixtures():
    for path in sorted(FIXTURES.glob("*.sdnet")):
        net = read_sdnet(path)
        text = format_sdnet(net)
        again = parse_sdnet(text)
        assert again == net, path.name
        assert format_sdnet(again) == text


def test_round_trip_random(tmp_path):
    for k, net in enumerate(orchard_corpus()[:50]):
        out = tmp_path / f"n{k}.sdnet"
        write_sdnet(net, out)
        assert read_sdnet(out) == net


def test_comments_blank_lines_and_generated_ids():
    text = """
    # header
    L a 1   # trailing comment
    L b 2

    D r a
    D r b
    """
    net = parse_sdnet(text)
    assert sorted(net.edges) == ["e1", "e2"]
    assert net.taxa == ("1", "2")


def test_generated_ids_skip_explicit_ones():
    net = parse_sdnet("L a 1\nL b 2\nD r a e1\nD r b\n")
    assert sorted(net.edges) == ["e1", "e2"]
    assert net.edges["e2"].v == "b"


def test_isolated_labeled_node():
    net = parse_sdnet("L x a\n")
    assert net.nodes == ("x",) and net.labels == {"x": "a"}


def test_taxon_order_superset():
    net = parse_sdnet("T 3 1 2 9\nL a 1\nL b 2\nD r a\nD r b\n")
    assert net.taxa == ("3", "1", "2", "9")
    assert net.coordinate["1"] == 2


def test_duplicate_lines_are_parallel_edges():
    net = parse_sdnet("L a 1\nL b 2\nD u v\nD u v\nD u b\nD v a\n")
    assert len([e for e in net.edges.values() if (e.u, e.v) == ("u", "v")]) == 2


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("L a 1\nX a b\n", 2, 1),
        ("L a 1\n  D a\n", 2, 3),
        ("L a 1\nL b 1\n", 2, 5),
        ("D a b e1\nD b c e1\n", 2, 7),
        ("T 1\nT 2\n", 2, 1),
        ("L a\n", 1, 1),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_sdnet(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_taxa_missing_label_is_parse_error():
    with pytest.raises(ParseError):
        parse_sdnet("T 1\nL a 2\n")


def test_format_is_deterministic_and_sorted():
    net = fixture("two_roots_five_taxa.sdnet")
    lines = format_sdnet(net).splitlines()
    assert lines[0] == "T 1 2 3 4 5"
    assert lines[1:6] == [f"L l{i} {i}" for i in range(1, 6)]
    ids = [ln.split()[3] for ln in lines[6:]]
    assert ids == [f"e{i}" for i in range(1, 11)]
    assert "U x y e8" in lines
