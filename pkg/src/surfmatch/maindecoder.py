"""Brute-force exact minimum-weight matching of the residual defects.

The main stage pairs every remaining flipped detector with another defect
or with the boundary by exhaustively enumerating all complete pairings and
keeping the lightest one, so it is exact by construction but only viable
up to a small Hamming weight cap.  Pair costs come from the precomputed
shortest-path table; corrections are the symmetric difference of the
constituent shortest paths.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .graph import DetectorGraph, PathTable, reconstruct_boundary_path, reconstruct_path
from .noise import Syndrome

if TYPE_CHECKING:  # pragma: no cover
    from .predecoder import Prematch, PredecodeResult

DEFAULT_HW_CAP = 10
MAX_HW_CAP = 14


def matching_search_size(hw: int) -> int:
    """Number of pairings the exact matcher is modeled to enumerate.

    For an even number of defects this is the count of perfect pairings,
    (hw-1)!! (945 at hw=10); for odd counts one defect takes the boundary,
    giving hw!!.  Used as the cycle cost model of the main stage.
    """
    if hw <= 0:
        return 1
    k = hw - 1 if hw % 2 == 0 else hw
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


@dataclass(frozen=True)
class MatchingSet:
    """A complete pairing of defects (boundary matches allowed)."""

    pairs: tuple[tuple[int, int], ...]
    boundary_matches: tuple[int, ...]
    total_weight: float
    correction_edges: frozenset[int]
    enumerated: int


def brute_force_mwpm(flipped, table: PathTable, hw_cap: int = DEFAULT_HW_CAP,
                     allow_boundary: bool = True) -> MatchingSet:
    """Exhaustive exact matching of ``flipped`` detector ids.

    Enumerates every way to partition the defects into pairs plus
    boundary-matched nodes (boundary branches are skipped when disabled or
    when a node has no finite boundary route).  Ties in total weight keep
    the lexicographically smallest canonical pair list, which is the first
    one found since partners are explored in ascending id order with the
    boundary last.
    """
    nodes = tuple(sorted(flipped))
    m = len(nodes)
    if m > hw_cap:
        raise ValueError(f"Hamming weight {m} exceeds cap {hw_cap}")
    if hw_cap > MAX_HW_CAP:
        raise ValueError(f"hw_cap must be at most {MAX_HW_CAP}")

    # Plain-float tables indexed by position in ``nodes``; the recursion
    # walks a bitmask of unmatched positions.  The smallest unmatched node
    # is paired with every later partner in ascending order, then with the
    # boundary, so the first minimum found is the lexicographically
    # smallest canonical pair list and strict < keeps it on ties.
    w = [[float(table.weight[a, b]) for b in nodes] for a in nodes]
    bw = [float(table.boundary_weight[a]) for a in nodes]
    bok = [allow_boundary and math.isfinite(x) for x in bw]

    state = {"count": 0, "best": math.inf, "pairs": None, "boundary": None}
    pair_stack: list[tuple[int, int]] = []
    bnd_stack: list[int] = []

    def recurse(mask: int, acc: float) -> None:
        if not mask:
            state["count"] += 1
            if acc < state["best"]:
                state["best"] = acc
                state["pairs"] = tuple(pair_stack)
                state["boundary"] = tuple(bnd_stack)
            return
        a = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << a)
        wa = w[a]
        mm = rest
        while mm:
            low = mm & -mm
            b = low.bit_length() - 1
            mm ^= low
            pair_stack.append((a, b))
            recurse(rest ^ low, acc + wa[b])
            pair_stack.pop()
        if bok[a]:
            bnd_stack.append(a)
            recurse(rest, acc + bw[a])
            bnd_stack.pop()

    recurse((1 << m) - 1, 0.0)
    if state["pairs"] is None and m > 0:
        raise ValueError("no complete matching exists for this defect set")

    pairs = tuple((nodes[a], nodes[b]) for a, b in state["pairs"] or ())
    boundary = tuple(nodes[a] for a in state["boundary"] or ())
    correction: set[int] = set()
    for a, b in pairs:
        correction ^= set(reconstruct_path(table, a, b))
    for a in boundary:
        correction ^= set(reconstruct_boundary_path(table, a))
    total = 0.0 if m == 0 else state["best"]
    return MatchingSet(pairs, boundary, total, frozenset(correction),
                       state["count"])


@dataclass(frozen=True)
class DecodeOutcome:
    """Combined result of the predecode and exact-matching stages."""

    prematches: tuple["Prematch", ...]
    matching: MatchingSet | None
    correction_edges: frozenset[int]
    total_weight: float
    predicted_observable: int
    logical_failure: bool
    cycles_total: int
    aborted: bool


def _observable_parity(graph: DetectorGraph, edge_ids) -> int:
    obs = 0
    for eid in edge_ids:
        if graph.edges[eid].flips_observable:
            obs ^= 1
    return obs


def decode(graph: DetectorGraph, table: PathTable, syndrome: Syndrome,
           predecode: "PredecodeResult | None" = None,
           hw_cap: int = DEFAULT_HW_CAP) -> DecodeOutcome:
    """Decode a syndrome, optionally consuming a predecode result.

    The combined correction is the symmetric difference of all prematch
    corrections and the exact matching's correction; the decode fails when
    the predicted observable flip disagrees with the syndrome's ground
    truth.  An aborted predecode is an unconditional logical failure and
    skips the matching stage.
    """
    prematches = tuple(predecode.prematches) if predecode is not None else ()
    pre_cycles = predecode.cycles if predecode is not None else 0

    if predecode is not None and predecode.aborted:
        correction: set[int] = set()
        for pm in prematches:
            correction ^= set(pm.correction_edges)
        return DecodeOutcome(
            prematches, None, frozenset(correction),
            sum(pm.weight for pm in prematches),
            _observable_parity(graph, correction), True, pre_cycles, True)

    flipped = predecode.residual.flipped if predecode is not None else syndrome.flipped
    if len(flipped) > hw_cap:
        raise ValueError(
            f"residual Hamming weight {len(flipped)} exceeds cap {hw_cap}")

    matching = brute_force_mwpm(flipped, table, hw_cap=hw_cap)
    correction = set(matching.correction_edges)
    for pm in prematches:
        correction ^= set(pm.correction_edges)
    predicted = _observable_parity(graph, correction)
    failure = predicted != syndrome.true_observable
    total_weight = matching.total_weight + sum(pm.weight for pm in prematches)
    cycles_total = pre_cycles + matching_search_size(len(flipped))
    return DecodeOutcome(prematches, matching, frozenset(correction),
                         total_weight, predicted, failure, cycles_total, False)


def decode_outcome_to_json(outcome: DecodeOutcome) -> str:
    pairs = list(outcome.matching.pairs) if outcome.matching else []
    boundary = list(outcome.matching.boundary_matches) if outcome.matching else []
    return json.dumps({
        "pairs": [list(p) for p in pairs],
        "boundary": boundary,
        "weight": outcome.total_weight,
        "failure": outcome.logical_failure,
        "cycles_total": outcome.cycles_total,
        "aborted": outcome.aborted,
    })
