"""Ground-truth machinery: best k-sparse approximation, exhaustive-support
brute-force recovery on tiny instances, and the l1 error metric with the
guarantee multiplier it is compared against.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceededError, InputError
from .graph import BipartiteGraph, dense_matrix

DEFAULT_SUPPORT_BUDGET = 10**6

# Supports solved per batched pseudo-inverse call; bounds peak memory.
_CHUNK = 1 << 15


@dataclass(frozen=True)
class SparseApproximation:
    """The best k-sparse approximation of a nonnegative vector.

    ``support`` holds the k largest entries' indices (ties broken toward
    the lowest index), ``vector`` agrees with x there and is zero
    elsewhere, and ``residual_l1`` is the l1 mass left outside.
    """

    support: tuple[int, ...]
    vector: np.ndarray
    residual_l1: float


def _as_vector(values, what: str) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise InputError(f"{what} must be a 1-d vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{what} contains non-finite entries")
    return v


def best_k_sparse(x, k: int) -> SparseApproximation:
    """Keep the k largest entries of x; for nonnegative x this minimizes
    the l1 distance over all k-sparse nonnegative vectors."""
    x = _as_vector(x, "signal")
    if not 0 <= k <= x.shape[0]:
        raise InputError(f"k must be in 0..{x.shape[0]}, got {k}")
    order = np.argsort(-x, kind="stable")  # stable: ties keep the lowest index first
    support = tuple(sorted(int(i) for i in order[:k]))
    vector = np.zeros_like(x)
    vector[list(support)] = x[list(support)]
    mask = np.ones(x.shape[0], dtype=bool)
    mask[list(support)] = False
    return SparseApproximation(
        support=support,
        vector=vector,
        residual_l1=float(np.abs(x[mask]).sum()),
    )


def l1_error(x, xhat) -> float:
    """Sum of absolute coordinate differences."""
    x = _as_vector(x, "signal")
    xhat = _as_vector(xhat, "estimate")
    if x.shape != xhat.shape:
        raise InputError(f"length mismatch: {x.shape[0]} vs {xhat.shape[0]}")
    return float(np.abs(x - xhat).sum())


def guarantee_multiplier(d: int, epsilon: float) -> float:
    """The factor 1 + d/(2*epsilon) bounding l1 error against the best
    k-sparse residual on sufficiently expanding graphs."""
    if epsilon <= 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    return 1.0 + d / (2.0 * epsilon)


def _solve_normal_exact(gram_cols: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Exact rational solve of the s-by-s normal equations; None if singular."""
    s = b.shape[0]
    M = [
        [Fraction(int(gram_cols[r, c])) for c in range(s)] + [Fraction(float(b[r]))]
        for r in range(s)
    ]
    for col in range(s):
        pivot = next((r for r in range(col, s) if M[r][col] != 0), None)
        if pivot is None:
            return None
        M[col], M[pivot] = M[pivot], M[col]
        inv = Fraction(1) / M[col][col]
        M[col] = [entry * inv for entry in M[col]]
        for r in range(s):
            if r != col and M[r][col] != 0:
                factor = M[r][col]
                M[r] = [a - factor * p for a, p in zip(M[r], M[col])]
    return np.array([float(M[r][s]) for r in range(s)])


def brute_force_recover(
    g: BipartiteGraph,
    y,
    k: int,
    *,
    support_budget: int = DEFAULT_SUPPORT_BUDGET,
) -> np.ndarray | str:
    """Independent recovery oracle: try every support of size at most k.

    For each candidate support T the restricted least-squares problem is
    solved (min-norm via pseudo-inverse of the Gram matrix, re-solved
    exactly when the restriction has full rank); a solution is consistent
    when its l1 residual is at most 1e-8 * (1 + ||y||_1) and no entry is
    below -1e-10 (tiny negatives are clamped to zero).  Returns
    the unique consistent solution, "infeasible" when there is none, or
    "ambiguous" when two consistent solutions differ by more than 1e-8
    in l1.  Supports are scanned smallest-first in lexicographic order,
    so the returned solution is deterministic.

    Raises BudgetExceededError when the support count exceeds the budget.
    """
    y = _as_vector(y, "measurement")
    if y.shape[0] != g.m:
        raise InputError(f"measurement must have length {g.m}, got {y.shape[0]}")
    if np.any(y < 0):
        raise InputError("measurement contains negative entries")
    if not 0 <= k <= g.n:
        raise InputError(f"k must be in 0..{g.n}, got {k}")
    total = sum(math.comb(g.n, s) for s in range(0, k + 1))
    if total > support_budget:
        raise BudgetExceededError(
            f"{total} candidate supports exceed budget {support_budget}"
        )

    A = dense_matrix(g)
    gram = A.T @ A
    aty = A.T @ y
    yty = float(y @ y)
    tol = 1e-8 * (1.0 + float(np.abs(y).sum()))
    # The batched Gram-residual prefilter uses the l2 residual (<= l1, so it
    # never rejects a consistent support); survivors get the exact l1 check.
    prefilter = tol * tol + 1e-9 * (1.0 + yty)

    solutions: list[np.ndarray] = []

    def accept(support: tuple[int, ...], z_float: np.ndarray) -> None:
        cols = list(support)
        z = z_float
        if cols:
            # Survivors are re-solved exactly over the rationals: the Gram
            # matrix of 0/1 columns is integer and every float is an exact
            # rational, so a full-rank solve is correctly rounded (bit-exact
            # when integral).  Singular systems keep the float min-norm z.
            exact = _solve_normal_exact(gram[np.ix_(cols, cols)], aty[cols])
            if exact is not None:
                z = exact
        if np.any(z < -1e-10):
            return
        residual = y - A[:, cols] @ z if cols else y
        if float(np.abs(residual).sum()) > tol:
            return
        full = np.zeros(g.n)
        full[cols] = np.clip(z, 0.0, None)
        solutions.append(full)

    accept((), np.zeros(0))
    for size in range(1, k + 1):
        combos = np.array(list(itertools.combinations(range(g.n), size)), dtype=np.intp)
        for start in range(0, combos.shape[0], _CHUNK):
            idx = combos[start : start + _CHUNK]
            G = gram[idx[:, :, None], idx[:, None, :]]
            b = aty[idx]
            z = (np.linalg.pinv(G) @ b[..., None])[..., 0]
            res2 = (
                yty
                - 2.0 * np.einsum("ns,ns->n", z, b)
                + np.einsum("ns,nst,nt->n", z, G, z)
            )
            for row in np.flatnonzero(res2 <= prefilter):
                accept(tuple(int(i) for i in idx[row]), z[row])

    if not solutions:
        return "infeasible"
    reference = solutions[0]
    for other in solutions[1:]:
        if float(np.abs(other - reference).sum()) > 1e-8:
            return "ambiguous"
    return reference
