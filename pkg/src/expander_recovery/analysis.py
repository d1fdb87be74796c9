"""Structural diagnostics behind the recovery guarantees: boundary sets,
degree-constrained matchings built by max-flow, and the iterative
unique-neighbor peeling of a variable subset.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .errors import InputError
from .graph import BipartiteGraph, gamma, _left_subset


@dataclass(frozen=True)
class DeltaMatching:
    """Edge set M for a variable subset S at ratio delta.

    Conditions: (a) every check touches at most one edge of M, and
    (b) every vertex of S union boundary_set(S) touches at least
    ceil(delta * c) edges of M.
    """

    edges: frozenset[tuple[int, int]]
    S: frozenset[int]
    delta: float


@dataclass(frozen=True)
class MinCut:
    """Witness that the matching demand is infeasible.

    ``left_side``/``right_side`` are the demand vertices and checks on the
    source side of the cut; ``capacity`` is computed from the cut itself
    and always equals ``flow_value``, the max flow found.
    """

    left_side: frozenset[int]
    right_side: frozenset[int]
    capacity: int
    flow_value: int


@dataclass(frozen=True)
class PeelingDecomposition:
    """Layers produced by iterated unique-neighbor extraction.

    ``layers[0]`` is the set of variables with a check outside the
    neighborhood of ``base_set``; later layers peel unique-neighbor
    vertices from the remainder.  When no vertex qualifies before the
    remainder empties, ``stalled`` is set and ``residual`` holds the
    unpeeled vertices (layers plus residual always partition X).
    """

    layers: tuple[frozenset[int], ...]
    base_set: frozenset[int]
    residual: frozenset[int]
    stalled: bool


def boundary_set(g: BipartiteGraph, vertices: Iterable[int]) -> set[int]:
    """Variables outside S with more than half their checks inside gamma(S).

    Strictness is the integer comparison 2 * |overlap| > c, avoiding float
    midpoint comparisons for even c.
    """
    S = set(_left_subset(g, vertices))
    if not S:
        return set()
    nbrs = gamma(g, S)
    out: set[int] = set()
    for i in range(g.n):
        if i in S:
            continue
        overlap = sum(1 for j in g.adj_x[i] if int(j) in nbrs)
        if 2 * overlap > g.c:
            out.add(i)
    return out


class _FlowNetwork:
    # Edmonds-Karp on integer capacities; tiny instances only.

    def __init__(self, num_nodes: int):
        self.head: list[list[int]] = [[] for _ in range(num_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, capacity: int) -> int:
        idx = len(self.to)
        self.head[u].append(idx)
        self.to.append(v)
        self.cap.append(capacity)
        self.head[v].append(idx + 1)
        self.to.append(u)
        self.cap.append(0)
        return idx

    def max_flow(self, source: int, sink: int) -> int:
        total = 0
        while True:
            parent_edge = [-1] * len(self.head)
            parent_edge[source] = -2
            queue = deque([source])
            while queue and parent_edge[sink] == -1:
                u = queue.popleft()
                for e in self.head[u]:
                    v = self.to[e]
                    if self.cap[e] > 0 and parent_edge[v] == -1:
                        parent_edge[v] = e
                        queue.append(v)
            if parent_edge[sink] == -1:
                return total
            bottleneck = math.inf
            v = sink
            while v != source:
                e = parent_edge[v]
                bottleneck = min(bottleneck, self.cap[e])
                v = self.to[e ^ 1]
            v = sink
            while v != source:
                e = parent_edge[v]
                self.cap[e] -= bottleneck
                self.cap[e ^ 1] += bottleneck
                v = self.to[e ^ 1]
            total += bottleneck

    def reachable(self, source: int) -> set[int]:
        seen = {source}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if self.cap[e] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def find_delta_matching(
    g: BipartiteGraph, vertices: Iterable[int], delta: float
) -> DeltaMatching | MinCut:
    """Build a delta-matching for S via max-flow, or return a cut witness.

    The network routes ceil(delta * c) units from a source through each
    vertex of U = S union boundary_set(S), over unit-capacity graph edges
    into the checks of gamma(U), each with unit capacity to the sink.  An
    integral max flow saturating every source edge yields the matching
    (the saturated graph edges); otherwise the returned MinCut certifies
    the demand is infeasible, which also falsifies the expansion level
    that would guarantee it.
    """
    S = _left_subset(g, vertices)
    if not S:
        raise InputError("delta-matching requires a nonempty subset")
    if not 0.0 < delta <= 1.0:
        raise InputError(f"delta must be in (0, 1], got {delta}")
    demand = math.ceil(delta * g.c)

    U = sorted(set(S) | boundary_set(g, S))
    V = sorted(gamma(g, U))
    u_pos = {i: idx for idx, i in enumerate(U)}
    v_pos = {j: idx for idx, j in enumerate(V)}

    source = 0
    sink = 1 + len(U) + len(V)
    net = _FlowNetwork(sink + 1)
    for idx in range(len(U)):
        net.add_edge(source, 1 + idx, demand)
    graph_arcs: list[tuple[int, int, int]] = []  # (edge_id, variable, check)
    for i in U:
        for j in g.adj_x[i]:
            e = net.add_edge(1 + u_pos[i], 1 + len(U) + v_pos[int(j)], 1)
            graph_arcs.append((e, i, int(j)))
    for idx in range(len(V)):
        net.add_edge(1 + len(U) + idx, sink, 1)

    value = net.max_flow(source, sink)
    if value == demand * len(U):
        matched = frozenset(
            (i, j) for e, i, j in graph_arcs if net.cap[e] == 0
        )
        return DeltaMatching(edges=matched, S=frozenset(S), delta=delta)

    reach = net.reachable(source)
    left_side = frozenset(i for i in U if 1 + u_pos[i] in reach)
    right_side = frozenset(j for j in V if 1 + len(U) + v_pos[j] in reach)
    crossing = sum(
        1 for _, i, j in graph_arcs if i in left_side and j not in right_side
    )
    capacity = demand * (len(U) - len(left_side)) + len(right_side) + crossing
    return MinCut(
        left_side=left_side,
        right_side=right_side,
        capacity=capacity,
        flow_value=value,
    )


def verify_matching(g: BipartiteGraph, matching: DeltaMatching) -> bool:
    """Check both matching conditions directly against the graph.

    Independent of the max-flow construction: recomputes the boundary set
    and counts incidences.  Raises InputError when an edge of the matching
    does not exist in the graph.
    """
    check_load: dict[int, int] = {}
    var_load: dict[int, int] = {}
    for i, j in matching.edges:
        if not (0 <= i < g.n and 0 <= j < g.m) or not g.has_edge(i, j):
            raise InputError(f"matching edge ({i}, {j}) is not an edge of the graph")
        check_load[j] = check_load.get(j, 0) + 1
        var_load[i] = var_load.get(i, 0) + 1
    if any(load > 1 for load in check_load.values()):
        return False
    demand = math.ceil(matching.delta * g.c)
    covered = set(matching.S) | boundary_set(g, matching.S)
    return all(var_load.get(i, 0) >= demand for i in covered)


def peel_layers(g: BipartiteGraph, base_set: Iterable[int]) -> PeelingDecomposition:
    """Decompose X by iterated unique-neighbor extraction seeded at base_set.

    Layer 0 is every variable with a check outside gamma(base_set); each
    later layer collects the variables that are some check's only remaining
    neighbor among the unpeeled rest.  Stalls (possible on poorly expanding
    graphs) are reported rather than raised: the partial decomposition plus
    the stuck residual is the diagnostic.
    """
    X_plus = set(_left_subset(g, base_set))
    V = gamma(g, X_plus)
    confined = {i for i in range(g.n) if all(int(j) in V for j in g.adj_x[i])}
    layers: list[frozenset[int]] = [frozenset(range(g.n)) - frozenset(confined)]
    residual = set(confined)
    while residual:
        layer: set[int] = set()
        for j in V:
            inside = [int(i) for i in g.adj_y[j] if int(i) in residual]
            if len(inside) == 1:
                layer.add(inside[0])
        if not layer:
            break
        layers.append(frozenset(layer))
        residual -= layer
    return PeelingDecomposition(
        layers=tuple(layers),
        base_set=frozenset(X_plus),
        residual=frozenset(residual),
        stalled=bool(residual),
    )
