from __future__ import annotations

import random
from collections import Counter

import pytest

from netgen import fixture, orchard_corpus, random_network
from sdmu import (
    CherryType,
    NetworkError,
    NotOrchardError,
    VerificationFailed,
    brute_force_isomorphic,
    build_network,
    format_sdnet,
    is_orchard,
    mu_distance,
    mu_representation,
    parse_mu,
    random_orchard,
    reconstruct,
    reduce_completely,
    validate,
)
from sdmu.mu import is_trivial_forest
from sdmu.orchard import IsomorphismGuardError, random_orchard_moves, rebuild, reduce_sequence, trivial_forest

CHAIN = [("4", "5"), ("3", "2"), ("1", "2"), ("3", "5"), ("4", "5")]


def test_two_roots_network_reduces_completely():
    net = fixture("two_roots_five_taxa.sdnet")
    trace = reduce_completely(mu_representation(net))
    assert trace.complete
    assert [str(s) for s in trace.steps][0] == "1 2 T(r3)"
    assert trace.final == parse_mu("taxa 1 2 3 4 5\n0,0,0,0,0,1:r\n0,0,1,0,0,0:r\n")


def test_given_chain_and_replay():
    net = fixture("two_roots_five_taxa.sdnet")
    rep = mu_representation(net)
    trace = reduce_sequence(rep, CHAIN)
    assert trace.complete and trace.sequence == CHAIN
    assert [str(s.cherry.ctype) for s in trace.steps] == ["R(u)", "R(r3)", "T(r2)", "T(r3)", "T(r2)"]
    assert trace.final == parse_mu("taxa 1 2 3 4 5\n0,0,1,0,0,0:r\n0,0,0,0,0,1:r\n")
    rebuilt = rebuild(trace)
    assert mu_representation(rebuilt) == rep
    assert brute_force_isomorphic(rebuilt, net)


def test_trivial_forest_is_already_reduced():
    rep = mu_representation(trivial_forest(("1", "2", "3"), ["2", "3"]))
    trace = reduce_completely(rep)
    assert trace.complete and not trace.steps


def test_cherryless_network_is_stuck_immediately():
    net = fixture("cherryless_N.sdnet")
    trace = reduce_completely(mu_representation(net))
    assert not trace.complete and not trace.steps
    assert not is_orchard(net)


def test_is_orchard_fixtures():
    assert is_orchard(fixture("two_roots_five_taxa.sdnet"))
    assert is_orchard(fixture("swap24_N.sdnet"))
    assert is_orchard(fixture("swap24_small_N.sdnet"))
    assert is_orchard(fixture("parallel_pair.sdnet"))


def test_is_orchard_rejects_non_binary():
    edges = [("r", f"l{i}", True) for i in range(4)]
    net = build_network(None, edges, [(f"l{i}", str(i)) for i in range(4)])
    with pytest.raises(NetworkError):
        is_orchard(net)


def test_swap_pair_given_sequence_reaches_three_leaves():
    seq = [("1", "2"), ("3", "4"), ("5", "1"), ("1", "4"), ("3", "5"), ("5", "2"), ("5", "6"), ("6", "7"), ("7", "1")]
    trace = reduce_sequence(mu_representation(fixture("swap24_N.sdnet")), seq)
    assert trace.complete
    assert is_trivial_forest(trace.final) == {"1", "2", "4"}


def test_reconstruct_two_roots_network():
    net = fixture("two_roots_five_taxa.sdnet")
    out = reconstruct(mu_representation(net))
    assert validate(out).ok
    assert mu_representation(out) == mu_representation(net)
    assert brute_force_isomorphic(out, net)


def test_reconstruct_single_leaf():
    out = reconstruct(parse_mu("taxa a b\n0,1,0:r\n"))
    assert out.present_taxa() == ["a"] and not out.edges


def test_reconstruct_not_orchard_carries_stuck_state():
    rep = mu_representation(fixture("cherryless_N.sdnet"))
    with pytest.raises(NotOrchardError) as info:
        reconstruct(rep)
    assert info.value.stuck == rep and info.value.steps == ()


def test_reconstruct_rejects_unrealizable_input():
    rep = parse_mu("taxa 1 2\n0,0,1:h\n0,1,0:t\n0,1,1:r\n")
    with pytest.raises(VerificationFailed):
        reconstruct(rep)


def test_random_orchard_contract():
    one = random_orchard(1, 0, seed=3)
    assert one.present_taxa() == ["1"] and not one.edges
    net = random_orchard(5, 2, seed=7)
    assert validate(net).ok and is_orchard(net)
    assert len(net.hybrids) == 2
    assert format_sdnet(random_orchard(6, 3, seed=11)) == format_sdnet(random_orchard(6, 3, seed=11))
    with pytest.raises(ValueError):
        random_orchard(0, 0)
    with pytest.raises(ValueError):
        random_orchard(1, 1)


def test_random_orchard_type_weights():
    net = random_orchard(6, 3, type_weights={"T(r2)": 1, "R(d)": 1, "T(d)": 1}, seed=4)
    assert is_orchard(net) and len(net.hybrids) == 3
    with pytest.raises(ValueError):
        random_orchard(4, 2, type_weights={"T(u)": 1}, seed=0)


def test_generator_exercises_every_addition_type():
    used = Counter()
    for seed in range(100):
        net, moves = random_orchard_moves(7, 4, seed=seed)
        used.update(m.ctype for m in moves)
        tree_moves = sum(m.ctype.is_tree for m in moves)
        assert len(moves) - tree_moves == len(net.hybrids) == 4
        # the starting forest holds one to three taxa
        assert 4 <= tree_moves <= 6 and len(net.present_taxa()) == 7
    assert set(used) == set(CherryType)


def test_iso_oracle_basics():
    net = fixture("two_roots_five_taxa.sdnet")
    shuffled = net.renamed({x: f"n{i}" for i, x in enumerate(reversed(net.nodes))})
    assert brute_force_isomorphic(net, shuffled)
    assert not brute_force_isomorphic(net, net.relabeled({"1": "3", "3": "1"}))
    assert not brute_force_isomorphic(fixture("swap24_N.sdnet"), fixture("swap24_Nprime.sdnet"))
    assert not brute_force_isomorphic(fixture("cherryless_N.sdnet"), fixture("cherryless_Nprime.sdnet"))
    big = random_orchard(12, 6, seed=1)
    with pytest.raises(IsomorphismGuardError):
        brute_force_isomorphic(big, big)


def test_iso_oracle_distinguishes_edge_kinds():
    a = build_network(None, [("x", "y", False), ("x", "l1", True), ("x", "l2", True),
                             ("y", "l3", True), ("y", "l4", True)],
                      [("l1", "1"), ("l2", "2"), ("l3", "3"), ("l4", "4")])
    b = build_network(None, [("x", "y", True), ("x", "l1", True), ("x", "l2", True),
                             ("y", "l3", True), ("y", "l4", True)],
                      [("l1", "1"), ("l2", "2"), ("l3", "3"), ("l4", "4")])
    assert validate(a).ok
    assert not brute_force_isomorphic(a, b, guard=64)


def test_shuffled_reduction_orders_complete():
    for net in orchard_corpus()[:200]:
        rep = mu_representation(net)
        for seed in range(3):
            assert reduce_completely(rep, shuffle_seed=seed).complete


def test_reconstruction_round_trip_random():
    for net in orchard_corpus()[:200]:
        rep = mu_representation(net)
        out = reconstruct(rep)
        assert mu_representation(out) == rep
        assert brute_force_isomorphic(out, net, guard=64)


def test_traces_are_deterministic():
    rep = mu_representation(fixture("swap24_N.sdnet"))
    assert reduce_completely(rep) == reduce_completely(rep)
    assert reduce_completely(rep, 5) == reduce_completely(rep, 5)


def test_distance_zero_iff_isomorphic_on_orchard_pairs():
    rng = random.Random(9)
    corpus = [n for n in orchard_corpus() if len(n.taxa) == 4]
    same = diff = 0
    for _ in range(300):
        a, b = rng.choice(corpus), rng.choice(corpus)
        if rng.random() < 0.3:
            b = a.renamed({x: x + "_" for x in a.nodes})
        iso = brute_force_isomorphic(a, b, guard=64)
        assert (mu_distance(a, b).value == 0) == iso
        same += iso
        diff += not iso
    assert same > 20 and diff > 20


def test_non_orchard_networks_exist_in_general_generator():
    nets = [random_network(6, 4, k) for k in range(40)]
    assert any(not is_orchard(n) for n in nets)
