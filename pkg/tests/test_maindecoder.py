import json
import math

import numpy as np
import pytest

from surfmatch import (ErrorSet, PredecodeConfig, Syndrome,
                       adaptive_predecode, brute_force_mwpm, decode,
                       make_rng, matching_search_size, sample_iid,
                       syndrome_from_errors)
from surfmatch.graph import PathTable, build_path_table
from surfmatch.maindecoder import decode_outcome_to_json

from oracles import (double_factorial, exact_matching, involutions,
                     observable_parity)
from patterns import (boundary_edge_ids, find_adjacent_pair,
                      find_disjoint_pairs, find_induced_chain)

W = -math.log(0.01)


def syndrome_of(nodes, obs=0):
    return Syndrome(frozenset(nodes), obs)


def infinite_boundary(table: PathTable) -> PathTable:
    bw = np.full_like(table.boundary_weight, np.inf)
    return PathTable(table.graph, table.weight, table.hops, table.route,
                     bw, table.boundary_hops, table.boundary_via,
                     table.boundary_edge)


def pair_sets(matching):
    return {frozenset(p) for p in matching.pairs}, tuple(sorted(matching.boundary_matches))


# ------------------------------------------------------ search-size model


def test_matching_search_size_frozen_values():
    assert matching_search_size(10) == 945
    expect = {0: 1, 1: 1, 2: 1, 3: 3, 4: 3, 5: 15, 6: 15, 7: 105, 8: 105,
              9: 945, 11: 10395, 12: 10395, 13: 135135, 14: 135135}
    for hw, size in expect.items():
        assert matching_search_size(hw) == size
    assert matching_search_size(-3) == 1


def test_matching_search_size_matches_double_factorial():
    for hw in range(1, 15):
        k = hw - 1 if hw % 2 == 0 else hw
        assert matching_search_size(hw) == double_factorial(k)


# ------------------------------------------------------ enumeration counts


def test_enumeration_count_without_boundary(pt5):
    for m in (2, 4, 6):
        out = brute_force_mwpm(range(m), pt5, allow_boundary=False)
        assert out.enumerated == double_factorial(m - 1)
    assert brute_force_mwpm(range(10), pt5, allow_boundary=False).enumerated == 945


def test_enumeration_count_with_boundary(pt5):
    for m, expect in ((2, 2), (4, 10), (6, 76)):
        out = brute_force_mwpm(range(m), pt5)
        assert out.enumerated == expect == involutions(m)


def test_unreachable_boundary_prunes_to_perfect_pairings(pt5):
    inf_table = infinite_boundary(pt5)
    out = brute_force_mwpm(range(10), inf_table)
    assert out.enumerated == 945
    assert out.boundary_matches == ()
    with pytest.raises(ValueError, match="no complete matching"):
        brute_force_mwpm(range(3), inf_table)


def test_four_node_line_has_ten_partitions(g3, pt3):
    chain = find_induced_chain(g3, 4)
    out = brute_force_mwpm(chain, pt3)
    assert out.enumerated == 10


# ------------------------------------------------------ optimality


def test_two_node_pair_versus_boundary(g32):
    # a timelike pair one edge apart, both endpoints one edge from the
    # boundary: direct pairing costs W, going around costs 2W
    per_round = g32.n_detectors // g32.rounds
    u = next(i for i in range(per_round)
             if g32.boundary_edges_of(i) and
             g32.edge_between(i, i + per_round) is not None)
    v = u + per_round
    eid = g32.edge_between(u, v).id

    table = build_path_table(g32)
    out = brute_force_mwpm((u, v), table)
    assert out.pairs == ((u, v),)
    assert out.boundary_matches == ()
    assert out.total_weight == pytest.approx(W)

    # make the direct edge ~20.7: now two boundary matches (9.2) win
    heavy = g32.with_edge_probabilities({eid: 1e-9})
    out = brute_force_mwpm((u, v), build_path_table(heavy))
    assert out.pairs == ()
    assert out.boundary_matches == (u, v)
    assert out.total_weight == pytest.approx(2 * W)


def test_matches_exhaustive_oracle(g3, pt3):
    rng = make_rng(5)
    detectors = np.arange(g3.n_detectors)
    for trial in range(120):
        m = int(rng.choice([2, 3, 4, 5, 6]))
        nodes = tuple(int(x) for x in rng.choice(detectors, size=m, replace=False))
        got = brute_force_mwpm(nodes, pt3)
        w, pairs, bnd, count = exact_matching(
            nodes,
            lambda a, b: float(pt3.weight[a, b]),
            lambda a: float(pt3.boundary_weight[a]),
        )
        assert got.total_weight == pytest.approx(w, abs=1e-9)
        assert got.enumerated == count
        assert pair_sets(got) == ({frozenset(p) for p in pairs}, bnd)


def test_tie_break_prefers_lex_smallest_pairs(g32, pt32):
    # chordless 4-cycle: pairing along either parallel side costs 2W, and
    # the canonical choice pairs the lowest node with its lowest partner
    u, v = find_adjacent_pair(g32)
    per_round = g32.n_detectors // g32.rounds
    up, vp = u + per_round, v + per_round
    out = brute_force_mwpm((u, v, up, vp), pt32)
    assert out.total_weight == pytest.approx(2 * W)
    assert out.pairs == ((u, v), (up, vp))
    assert out.boundary_matches == ()


def test_repeat_calls_identical(g5, pt5):
    rng = make_rng(9)
    nodes = tuple(int(x) for x in rng.choice(g5.n_detectors, 8, replace=False))
    assert brute_force_mwpm(nodes, pt5) == brute_force_mwpm(nodes, pt5)


# ------------------------------------------------------ caps


def test_hw_cap_enforced(pt3):
    with pytest.raises(ValueError, match="exceeds cap"):
        brute_force_mwpm(range(12), pt3)
    with pytest.raises(ValueError, match="at most"):
        brute_force_mwpm(range(2), pt3, hw_cap=16)
    brute_force_mwpm(range(12), pt3, hw_cap=12)  # fine up to 14


def test_decode_cap_error(g3, pt3):
    with pytest.raises(ValueError, match="exceeds cap"):
        decode(g3, pt3, syndrome_of(range(12)))


# ------------------------------------------------------ decode


def test_decode_empty_syndrome(g3, pt3):
    out = decode(g3, pt3, syndrome_of(()))
    assert not out.logical_failure
    assert out.predicted_observable == 0
    assert out.total_weight == 0.0
    assert out.correction_edges == frozenset()
    assert out.cycles_total == 1  # one modeled matching: the empty one
    assert out.matching.enumerated == 1
    assert not out.aborted


def test_decode_single_boundary_error_each_side(g3, pt3):
    for observable in (True, False):
        eid = boundary_edge_ids(g3, observable)[0]
        errors = ErrorSet(frozenset({eid}))
        syn = syndrome_from_errors(g3, errors)
        assert syn.hamming_weight == 1
        out = decode(g3, pt3, syn)
        assert not out.logical_failure
        assert out.predicted_observable == syn.true_observable
        assert out.total_weight == pytest.approx(W)


def test_decode_self_consistency(g3, pt3):
    # decoding then re-applying the correction must clear the syndrome,
    # and the failure flag must equal the observable parity of the
    # residual error loop
    rng = make_rng(31)
    checked = 0
    for _ in range(400):
        errors = sample_iid(g3, 0.02, rng)
        syn = syndrome_from_errors(g3, errors)
        if syn.hamming_weight > 10:
            continue
        out = decode(g3, pt3, syn)
        loop = errors.edge_ids ^ out.correction_edges
        assert syndrome_from_errors(g3, ErrorSet(loop)).flipped == frozenset()
        assert out.logical_failure == bool(observable_parity(g3, loop))
        assert out.cycles_total == matching_search_size(syn.hamming_weight)
        checked += 1
    assert checked > 300


def test_decode_weight_is_oracle_minimum(g3, pt3):
    rng = make_rng(37)
    for _ in range(60):
        errors = sample_iid(g3, 0.02, rng)
        syn = syndrome_from_errors(g3, errors)
        if not 0 < syn.hamming_weight <= 6:
            continue
        out = decode(g3, pt3, syn)
        w, _, _, _ = exact_matching(
            tuple(syn.flipped),
            lambda a, b: float(pt3.weight[a, b]),
            lambda a: float(pt3.boundary_weight[a]),
        )
        assert out.total_weight == pytest.approx(w, abs=1e-9)


# ----------------------------------------------- predecode hand-off


def test_decode_after_predecode_six_pairs(g5, pt5):
    pairs = find_disjoint_pairs(g5, 6)
    syn = syndrome_from_errors(
        g5, ErrorSet(frozenset(g5.edge_between(*p).id for p in pairs)))
    pre = adaptive_predecode(g5, pt5, syn)
    out = decode(g5, pt5, syn, predecode=pre)
    assert not out.aborted and not out.logical_failure
    assert out.matching.enumerated == 1
    assert out.prematches == pre.prematches
    assert out.total_weight == pytest.approx(6 * -math.log(g5.p))
    assert out.cycles_total == pre.cycles + 1
    assert out.correction_edges == frozenset(
        g5.edge_between(*p).id for p in pairs)


def test_decode_aborted_predecode_is_failure(g5, pt5):
    pairs = find_disjoint_pairs(g5, 6)
    syn = syndrome_of({u for p in pairs for u in p})
    pre = adaptive_predecode(g5, pt5, syn, PredecodeConfig(budget_ns=0.0))
    assert pre.aborted
    out = decode(g5, pt5, syn, predecode=pre)
    assert out.aborted
    assert out.logical_failure
    assert out.matching is None
    assert out.cycles_total == pre.cycles


def test_decode_residual_over_cap_raises(g7, pt7):
    # a 12-defect syndrome the predecoder was not allowed to touch
    nodes = set(range(g7.n_detectors))
    syn = syndrome_of(sorted(nodes)[:12])
    pre = adaptive_predecode(g7, pt7, syndrome_of(()),)
    bad = pre.__class__(pre.prematches, syn, 0, False, 0)
    with pytest.raises(ValueError, match="residual Hamming weight"):
        decode(g7, pt7, syn, predecode=bad)


# ------------------------------------------------------ serialization


def test_decode_outcome_json(g3, pt3):
    u, v = find_adjacent_pair(g3)
    out = decode(g3, pt3, syndrome_of({u, v}))
    doc = json.loads(decode_outcome_to_json(out))
    assert set(doc) == {"pairs", "boundary", "weight", "failure",
                        "cycles_total", "aborted"}
    assert doc["pairs"] == [[u, v]] or doc["pairs"] == [sorted((u, v))]
    assert doc["weight"] == pytest.approx(out.total_weight)
    assert doc["failure"] is False
