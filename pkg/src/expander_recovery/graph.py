"""Biregular bipartite graphs: construction, neighborhoods, and exhaustive
expansion certification at desk scale.

Left vertices 0..n-1 carry signal coordinates, right vertices 0..m-1 carry
measurements; the 0/1 biadjacency matrix is the measurement matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import BudgetExceededError, ConstructionError, InputError

# Subsets enumerated by check_expansion before refusing.
DEFAULT_SUBSET_BUDGET = 10**7

# Parallel-edge repair gives up after this many swaps per edge.
REPAIR_SWAPS_PER_EDGE = 100


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """A (c,d)-biregular bipartite graph.

    ``adj_x[i]`` holds the c distinct, sorted check neighbors of variable
    vertex i; ``adj_y[j]`` holds the d distinct, sorted variable neighbors
    of check vertex j.  Both arrays describe the same edge set.  Instances
    are immutable after construction and safe to share across threads.
    """

    n: int
    m: int
    c: int
    d: int
    adj_x: np.ndarray
    adj_y: np.ndarray

    @property
    def num_edges(self) -> int:
        return self.n * self.c

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield every (variable, check) edge, variable-major."""
        for i in range(self.n):
            for j in self.adj_x[i]:
                yield (i, int(j))

    def has_edge(self, i: int, j: int) -> bool:
        row = self.adj_x[i]
        pos = int(np.searchsorted(row, j))
        return pos < self.c and row[pos] == j

    @classmethod
    def from_adj_x(cls, adj_x: Iterable[Iterable[int]], m: int) -> "BipartiteGraph":
        """Build a graph from per-variable neighbor lists, deriving adj_y.

        Validates every structural invariant; raises InputError on any
        violation (non-uniform degrees, duplicate edges, bad indices).
        """
        rows = [sorted(int(j) for j in row) for row in adj_x]
        n = len(rows)
        if n == 0:
            raise InputError("graph must have at least one variable vertex")
        c = len(rows[0])
        if any(len(row) != c for row in rows):
            raise InputError("variable degrees are not uniform")
        if c == 0:
            raise InputError("variable degree must be at least 1")
        if (c * n) % m != 0:
            raise InputError(f"edge count {c * n} not divisible by m={m}")
        d = (c * n) // m
        ax = np.array(rows, dtype=np.int64)
        left = np.repeat(np.arange(n, dtype=np.int64), c)
        right = ax.ravel()
        order = np.lexsort((left, right))
        counts = np.bincount(right, minlength=m) if right.size else np.zeros(m, int)
        if right.size and (right.min() < 0 or right.max() >= m):
            raise InputError("check index out of range")
        if np.any(counts != d):
            raise InputError(f"check degrees are not uniformly d={d}")
        ay = left[order].reshape(m, d)
        g = cls(n=n, m=m, c=c, d=d, adj_x=ax, adj_y=ay)
        g.validate()
        return g

    def validate(self) -> None:
        """Check all structural invariants; raise InputError on failure."""
        if self.c * self.n != self.d * self.m:
            raise InputError("edge-count consistency c*n == d*m violated")
        if self.adj_x.shape != (self.n, self.c):
            raise InputError("adj_x has wrong shape")
        if self.adj_y.shape != (self.m, self.d):
            raise InputError("adj_y has wrong shape")
        for name, arr, hi in (("adj_x", self.adj_x, self.m), ("adj_y", self.adj_y, self.n)):
            if arr.size and (arr.min() < 0 or arr.max() >= hi):
                raise InputError(f"{name} contains an out-of-range index")
            if np.any(np.diff(arr, axis=1) <= 0):
                raise InputError(f"{name} rows must be strictly increasing (sorted, no parallel edges)")
        # Mutual consistency: adj_y rebuilt from adj_x must match exactly.
        left = np.repeat(np.arange(self.n, dtype=np.int64), self.c)
        right = self.adj_x.ravel()
        order = np.lexsort((left, right))
        rebuilt = left[order].reshape(self.m, self.d)
        if not np.array_equal(rebuilt, self.adj_y):
            raise InputError("adj_x and adj_y describe different edge sets")


@dataclass(frozen=True)
class ExpansionReport:
    """Result of exhaustively testing the expansion of all small subsets.

    ``holds`` is true iff every tested subset S (1 <= |S| <= k) has at
    least alpha * c * |S| distinct check neighbors.  ``witness`` is the
    first violating subset in enumeration order, or None.  ``min_ratio``
    is the minimum of |neighbors(S)| / (c * |S|) over the tested subsets.
    """

    k: int
    alpha: float
    holds: bool
    witness: tuple[int, ...] | None
    min_ratio: float


def _left_subset(g: BipartiteGraph, vertices: Iterable[int]) -> list[int]:
    out = sorted({int(i) for i in vertices})
    if out and (out[0] < 0 or out[-1] >= g.n):
        raise InputError(f"variable index out of range 0..{g.n - 1}")
    return out


def gamma(g: BipartiteGraph, vertices: Iterable[int]) -> set[int]:
    """Neighborhood of a variable subset: the union of its check neighbors."""
    S = _left_subset(g, vertices)
    if not S:
        return set()
    return set(g.adj_x[S].ravel().tolist())


def unique_neighbors(g: BipartiteGraph, vertices: Iterable[int]) -> set[int]:
    """Members of S having some check whose only neighbor inside S is them.

    These are the vertices a single measurement pins down exactly once the
    rest of its check's neighborhood is known.
    """
    S = set(_left_subset(g, vertices))
    out: set[int] = set()
    for j in gamma(g, S):
        inside = [int(i) for i in g.adj_y[j] if int(i) in S]
        if len(inside) == 1:
            out.add(inside[0])
    return out


def _colex_combinations(n: int, size: int) -> Iterator[tuple[int, ...]]:
    # Colexicographic order: subsets sorted by largest element, recursively.
    if size == 0:
        yield ()
        return
    for top in range(size - 1, n):
        for rest in _colex_combinations(top, size - 1):
            yield rest + (top,)


def neighbor_masks(g: BipartiteGraph) -> list[int]:
    """Per-variable check neighborhoods as bitmasks over 0..m-1."""
    masks = []
    for i in range(g.n):
        mask = 0
        for j in g.adj_x[i]:
            mask |= 1 << int(j)
        masks.append(mask)
    return masks


def check_expansion(
    g: BipartiteGraph,
    k: int,
    alpha: float,
    *,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
    fast: bool = False,
) -> ExpansionReport:
    """Exhaustively certify that every subset of up to k variables expands.

    Enumerates all subsets S with 1 <= |S| <= k in colexicographic order
    and computes |neighbors(S)| / (c * |S|).  With ``fast`` the scan stops
    at the first subset below ``alpha``; by default the full minimum ratio
    is computed so the report doubles as a tightness certificate.

    Raises BudgetExceededError when the subset count exceeds
    ``subset_budget``, and InputError for out-of-range k or alpha.
    """
    if not 1 <= k <= g.n:
        raise InputError(f"k must be in 1..{g.n}, got {k}")
    if not 0.0 < alpha <= 1.0:
        raise InputError(f"alpha must be in (0, 1], got {alpha}")
    total = sum(math.comb(g.n, s) for s in range(1, k + 1))
    if total > subset_budget:
        raise BudgetExceededError(
            f"instance too large for exhaustive certification: "
            f"{total} subsets exceed budget {subset_budget}"
        )
    masks = neighbor_masks(g)
    min_ratio = math.inf
    witness: tuple[int, ...] | None = None
    for size in range(1, k + 1):
        denom = g.c * size
        for combo in _colex_combinations(g.n, size):
            union = 0
            for i in combo:
                union |= masks[i]
            ratio = union.bit_count() / denom
            if ratio < min_ratio:
                min_ratio = ratio
            if ratio < alpha and witness is None:
                witness = combo
                if fast:
                    return ExpansionReport(k, alpha, False, witness, min_ratio)
    return ExpansionReport(k, alpha, witness is None, witness, min_ratio)


def _duplicate_positions(left: np.ndarray, right: np.ndarray, m: int) -> np.ndarray:
    # Positions (beyond the first occurrence) of repeated (left, right) pairs.
    key = left * np.int64(m) + right
    order = np.argsort(key, kind="stable")
    sorted_key = key[order]
    dup = np.flatnonzero(sorted_key[1:] == sorted_key[:-1])
    return order[dup + 1]


def build_random_biregular(n: int, c: int, d: int, seed: int) -> BipartiteGraph:
    """Sample a uniform-ish random simple (c,d)-biregular bipartite graph.

    Pairs variable edge stubs with a seeded random permutation of check
    edge stubs, then repairs parallel edges by random stub swaps (bounded
    at REPAIR_SWAPS_PER_EDGE * num_edges attempts).  A fixed seed yields a
    fixed graph.

    Raises InputError when the parameters admit no simple biregular graph,
    and ConstructionError when repair fails (retry with a new seed).
    """
    if n < 1 or c < 1 or d < 1:
        raise InputError("n, c, d must all be at least 1")
    if (c * n) % d != 0:
        raise InputError(f"c*n={c * n} not divisible by d={d}")
    m = (c * n) // d
    if c > m:  # equivalent to d > n: a simple graph needs c distinct checks
        raise InputError(
            f"no simple graph: left degree c={c} exceeds check count m={m} "
            f"(equivalently d={d} exceeds n={n})"
        )

    rng = np.random.default_rng(seed)
    num_edges = n * c
    left = np.repeat(np.arange(n, dtype=np.int64), c)
    right = rng.permutation(np.repeat(np.arange(m, dtype=np.int64), d))

    swaps_left = REPAIR_SWAPS_PER_EDGE * num_edges
    while True:
        dup = _duplicate_positions(left, right, m)
        if dup.size == 0:
            break
        if swaps_left <= 0:
            raise ConstructionError(
                f"parallel-edge repair failed after {REPAIR_SWAPS_PER_EDGE * num_edges} "
                f"swaps for (n={n}, c={c}, d={d}, seed={seed}); retry with a new seed"
            )
        partners = rng.integers(0, num_edges, size=dup.size)
        for p, q in zip(dup, partners):
            right[p], right[q] = right[q], right[p]
            swaps_left -= 1
            if swaps_left <= 0:
                break

    adj_x = np.sort(right.reshape(n, c), axis=1)
    order = np.lexsort((left, right))
    adj_y = left[order].reshape(m, d)
    g = BipartiteGraph(n=n, m=m, c=c, d=d, adj_x=adj_x, adj_y=adj_y)
    g.validate()
    return g


def dense_matrix(g: BipartiteGraph) -> np.ndarray:
    """The m-by-n 0/1 measurement matrix of the graph (dense, desk scale)."""
    A = np.zeros((g.m, g.n))
    cols = np.repeat(np.arange(g.n), g.c)
    A[g.adj_x.ravel(), cols] = 1.0
    return A
