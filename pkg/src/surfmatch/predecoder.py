"""Adaptive locality-aware predecoder.

High Hamming weight syndromes are too expensive for the brute-force exact
matcher to handle inside its real-time window, so this stage prematches
flipped detectors that can be paired with low risk until the residual
weight is small enough and the modeled total latency fits the budget.

The predecoder works on the decoding subgraph induced by the flipped
detectors.  Matching two nodes removes them; a flipped node left without
any flipped neighbor (a singleton) can later only be paired through a
multi-edge path, which is both slower and easier to get wrong.  Every scan
round therefore fills one candidate register per category and applies a
single prematch in this priority order:

  S1    isolated pairs (two-node components); the whole batch at once
  S2_1  singleton-safe edges with an endpoint of degree 1
  S2_2  singleton-safe edges otherwise
  S3    an existing singleton paired through the cheapest table path
  S4_1  singleton-creating edges with an endpoint of degree 1
  S4_2  singleton-creating edges otherwise

S3 is only attempted when both S2 registers are empty and a singleton
exists; S4 is the last resort.  Node statistics are recomputed after every
application.

Cycle model: each pass over the subgraph costs its current edge count in
clock cycles.  A round that consults the path table for S3 costs
``max(paths examined, edge count)`` because the table is scanned by a
parallel pipeline.  If the accumulated predecode time plus the modeled
main-decoder time cannot fit the budget, the decode is aborted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, NamedTuple
import json

from .graph import DetectorGraph, PathTable, reconstruct_path
from .noise import Syndrome
from .maindecoder import matching_search_size


class Step(str, Enum):
    """Which rule produced a prematch."""

    S1 = "S1"
    S2_1 = "S2_1"
    S2_2 = "S2_2"
    S3 = "S3"
    S4_1 = "S4_1"
    S4_2 = "S4_2"
    GREEDY = "GREEDY"  # produced by the no-safety baseline, not by the scan


# Order used to find the "deepest" step a decode needed.
STEP_RANK = {Step.S1: 0, Step.S2_1: 1, Step.S2_2: 2, Step.S3: 3,
             Step.S4_1: 4, Step.S4_2: 5, Step.GREEDY: 6}


@dataclass(frozen=True)
class Prematch:
    """One prematched pair and the correction it implies."""

    a: int
    b: int
    step: Step
    correction_edges: tuple[int, ...]
    weight: float


@dataclass
class DecodingSubgraph:
    """Induced subgraph on the currently unmatched flipped detectors."""

    nodes: set[int]
    edges: dict[int, tuple[int, int]]
    weights: dict[int, float]
    deg: dict[int, int] = field(default_factory=dict)
    dependents: dict[int, int] = field(default_factory=dict)
    singletons: set[int] = field(default_factory=set)
    neighbors: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def refresh(self) -> None:
        """Recompute degrees, dependent counts, singletons and adjacency."""
        self.neighbors = {i: [] for i in self.nodes}
        for eid, (u, v) in self.edges.items():
            self.neighbors[u].append((v, eid))
            self.neighbors[v].append((u, eid))
        for lst in self.neighbors.values():
            lst.sort()
        self.deg = {i: len(self.neighbors[i]) for i in self.nodes}
        self.dependents = {
            i: sum(1 for j, _ in self.neighbors[i] if self.deg[j] == 1)
            for i in self.nodes
        }
        self.singletons = {i for i in self.nodes if self.deg[i] == 0}

    def remove_pair(self, a: int, b: int) -> None:
        self.nodes.discard(a)
        self.nodes.discard(b)
        self.edges = {eid: uv for eid, uv in self.edges.items()
                      if a not in uv and b not in uv}
        self.weights = {eid: self.weights[eid] for eid in self.edges}
        self.refresh()

    def isolated_pair_edges(self) -> list[tuple[int, int, int]]:
        """Edges whose endpoints both have degree 1, i.e. two-node components."""
        return [(eid, u, v) for eid, (u, v) in sorted(self.edges.items())
                if self.deg[u] == 1 and self.deg[v] == 1]


def _subgraph_from_nodes(graph: DetectorGraph, nodes: Iterable[int]) -> DecodingSubgraph:
    node_set = set(nodes)
    edges: dict[int, tuple[int, int]] = {}
    for i in node_set:
        for other, eid in graph.detector_neighbors[i]:
            if other in node_set and i < other:
                edges[eid] = (i, other)
    weights = {eid: graph.edges[eid].weight for eid in edges}
    sub = DecodingSubgraph(node_set, edges, weights)
    sub.refresh()
    return sub


def build_subgraph(graph: DetectorGraph, syndrome: Syndrome) -> DecodingSubgraph:
    """Decoding subgraph induced by the syndrome's flipped detectors."""
    bad = [i for i in syndrome.flipped if not 0 <= i < graph.n_detectors]
    if bad:
        raise ValueError(f"flipped ids outside detector range: {bad}")
    return _subgraph_from_nodes(graph, syndrome.flipped)


def creates_singleton(sub: DecodingSubgraph, i: int, j: int) -> bool:
    """Would matching (i, j) strand some third node with no flipped neighbor?

    Exactly when i or j has a degree-1 neighbor outside {i, j}.  (The
    decoding graph is triangle-free, so no third node can be adjacent to
    both endpoints of an edge.)
    """
    di = sub.dependents[i] - (1 if sub.deg[j] == 1 else 0)
    dj = sub.dependents[j] - (1 if sub.deg[i] == 1 else 0)
    return di > 0 or dj > 0


def match_isolated_pairs(sub: DecodingSubgraph) -> list[Prematch]:
    """Match every two-node component simultaneously (step S1)."""
    batch = sub.isolated_pair_edges()
    prematches = [
        Prematch(min(u, v), max(u, v), Step.S1, (eid,), sub.weights[eid])
        for eid, u, v in batch
    ]
    if prematches:
        for eid, u, v in batch:
            sub.nodes.discard(u)
            sub.nodes.discard(v)
        sub.edges = {eid: uv for eid, uv in sub.edges.items()
                     if uv[0] in sub.nodes and uv[1] in sub.nodes}
        sub.weights = {eid: sub.weights[eid] for eid in sub.edges}
        sub.refresh()
    return prematches


class Candidate(NamedTuple):
    edge_id: int
    a: int
    b: int
    weight: float


@dataclass
class CandidateRegisters:
    """Best edge per category after one pass over the subgraph edges."""

    s2_1: Candidate | None = None
    s2_2: Candidate | None = None
    s4_1: Candidate | None = None
    s4_2: Candidate | None = None


def scan_candidates(sub: DecodingSubgraph, graph: DetectorGraph) -> CandidateRegisters:
    """Single pass filling the S2/S4 registers; lowest weight wins, then lowest id."""
    regs = CandidateRegisters()
    for eid in sorted(sub.edges):
        u, v = sub.edges[eid]
        w = graph.edges[eid].weight
        risky = creates_singleton(sub, u, v)
        endpoint_deg1 = min(sub.deg[u], sub.deg[v]) == 1
        if not risky:
            slot = "s2_1" if endpoint_deg1 else "s2_2"
        else:
            slot = "s4_1" if endpoint_deg1 else "s4_2"
        cur = getattr(regs, slot)
        if cur is None or w < cur.weight:
            setattr(regs, slot, Candidate(eid, min(u, v), max(u, v), w))
    return regs


def _step3_scan(sub: DecodingSubgraph,
                table: PathTable) -> tuple[tuple[int, int, float] | None, int]:
    """Cheapest (singleton, partner) pairing that strands no new singleton.

    Returns the winning (s, t, weight) and the number of paths examined.
    Removing the partner t must not leave any of its degree-1 neighbors
    stranded; the singleton s itself has no neighbors to strand.
    """
    best = None
    examined = 0
    for s in sorted(sub.singletons):
        row = table.weight[s]
        for t in sorted(sub.nodes):
            if t == s:
                continue
            examined += 1
            if sub.dependents[t] > 0:
                continue
            w = float(row[t])
            if best is None or w < best[2]:
                best = (s, t, w)
    return best, examined


def step3_singleton_path(sub: DecodingSubgraph, table: PathTable) -> Prematch | None:
    """Match an existing singleton through the cheapest table path (step S3)."""
    cand, _ = _step3_scan(sub, table)
    if cand is None:
        return None
    s, t, w = cand
    edges = tuple(reconstruct_path(table, s, t))
    return Prematch(s, t, Step.S3, edges, w)


@dataclass(frozen=True)
class PredecodeConfig:
    """Targets and timing model for the predecode loop.

    ``hw_target`` is the residual Hamming weight the loop aims for (6, 8 or
    10).  The loop only stops once the residual weight is at or below the
    target *and* the modeled total time (predecode cycles plus the main
    decoder's modeled latency at the residual weight) fits ``budget_ns``,
    so it keeps predecoding below the target whenever the main stage would
    be too slow; the target is effectively adaptive.  The default main
    latency model charges ``cycles_per_matching`` cycles per matching the
    brute-force stage would enumerate (pairings of the residual defects,
    e.g. 945 at weight 10).
    """

    hw_target: int = 10
    budget_ns: float = 960.0
    clock_mhz: float = 250.0
    cycles_per_matching: float = 1.0
    main_latency_ns: Callable[[int], float] | None = None

    def __post_init__(self):
        if self.hw_target not in (6, 8, 10):
            raise ValueError(f"hw_target must be 6, 8 or 10, got {self.hw_target}")
        if self.clock_mhz <= 0:
            raise ValueError("clock_mhz must be positive")

    @property
    def cycle_ns(self) -> float:
        return 1000.0 / self.clock_mhz

    def main_latency(self, hw: int) -> float:
        if self.main_latency_ns is not None:
            return self.main_latency_ns(hw)
        return matching_search_size(hw) * self.cycles_per_matching * self.cycle_ns


class TraceEntry(NamedTuple):
    step: Step
    singletons_before: int
    singletons_after: int
    hw_after: int


@dataclass(frozen=True)
class PredecodeResult:
    """Prematches applied, the residual syndrome and the time spent."""

    prematches: tuple[Prematch, ...]
    residual: Syndrome
    cycles: int
    aborted: bool
    rounds_executed: int
    trace: tuple[TraceEntry, ...] | None = None


def adaptive_predecode(graph: DetectorGraph, table: PathTable,
                       syndrome: Syndrome,
                       config: PredecodeConfig | None = None,
                       record_trace: bool = False) -> PredecodeResult:
    """Reduce a syndrome's Hamming weight until the main stage fits its budget.

    Intended for syndromes with Hamming weight above the main decoder's
    cap (lower weights bypass straight to the main stage); callable on any
    syndrome.  One prematch is applied per scan round, except that step S1
    matches all isolated pairs of a pass simultaneously.  Aborts when the
    budget is exhausted or no further progress is possible.
    """
    cfg = config if config is not None else PredecodeConfig()
    period = cfg.cycle_ns
    sub = build_subgraph(graph, syndrome)
    prematches: list[Prematch] = []
    trace: list[TraceEntry] = []
    cycles = 0
    rounds = 0
    aborted = False

    def done() -> bool:
        hw = len(sub.nodes)
        return hw <= cfg.hw_target and cycles * period + cfg.main_latency(hw) <= cfg.budget_ns

    def record(step: Step, before: int) -> None:
        if record_trace:
            trace.append(TraceEntry(step, before, len(sub.singletons), len(sub.nodes)))

    while not done():
        # Step 1 to fixpoint: a pass matches all current isolated pairs at
        # once and cannot create new ones, but later one-pair rounds can.
        # A pass is paid for before its result may be used, so running out
        # of budget aborts without applying the pass.
        while sub.isolated_pair_edges() and not done():
            cycles += len(sub.edges)
            rounds += 1
            if cycles * period > cfg.budget_ns:
                aborted = True
                break
            before = len(sub.singletons)
            batch = match_isolated_pairs(sub)
            prematches.extend(batch)
            record(Step.S1, before)
        if aborted or done():
            break

        edge_count = len(sub.edges)
        regs = scan_candidates(sub, graph)
        round_cost = edge_count
        s3 = None
        if regs.s2_1 is None and regs.s2_2 is None and sub.singletons:
            s3, examined = _step3_scan(sub, table)
            round_cost = max(examined, edge_count)
        cycles += round_cost
        rounds += 1
        if cycles * period > cfg.budget_ns:
            aborted = True
            break

        pm: Prematch | None = None
        for cand, step in ((regs.s2_1, Step.S2_1), (regs.s2_2, Step.S2_2)):
            if cand is not None:
                pm = Prematch(cand.a, cand.b, step, (cand.edge_id,), cand.weight)
                break
        if pm is None and s3 is not None:
            s, t, w = s3
            pm = Prematch(s, t, Step.S3, tuple(reconstruct_path(table, s, t)), w)
        if pm is None:
            for cand, step in ((regs.s4_1, Step.S4_1), (regs.s4_2, Step.S4_2)):
                if cand is not None:
                    pm = Prematch(cand.a, cand.b, step, (cand.edge_id,), cand.weight)
                    break
        if pm is None:
            # Nothing matchable remains (e.g. a lone defect that would need
            # the boundary): the target cannot be reached in time.
            aborted = True
            break

        before = len(sub.singletons)
        sub.remove_pair(pm.a, pm.b)
        prematches.append(pm)
        record(pm.step, before)

    residual = Syndrome(frozenset(sub.nodes), syndrome.true_observable)
    return PredecodeResult(tuple(prematches), residual, cycles, aborted, rounds,
                           tuple(trace) if record_trace else None)


def predecode_result_to_json(result: PredecodeResult) -> str:
    return json.dumps({
        "prematches": [
            {"a": pm.a, "b": pm.b, "step": pm.step.value,
             "weight": pm.weight, "edges": list(pm.correction_edges)}
            for pm in result.prematches
        ],
        "residual": sorted(result.residual.flipped),
        "cycles": result.cycles,
        "aborted": result.aborted,
    })


def predecode_result_from_json(text: str, true_observable: int = 0) -> PredecodeResult:
    doc = json.loads(text)
    prematches = tuple(
        Prematch(pm["a"], pm["b"], Step(pm["step"]), tuple(pm["edges"]), pm["weight"])
        for pm in doc["prematches"]
    )
    residual = Syndrome(frozenset(doc["residual"]), true_observable)
    return PredecodeResult(prematches, residual, doc["cycles"], doc["aborted"],
                           rounds_executed=0)
