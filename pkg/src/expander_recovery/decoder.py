"""Round-synchronous message passing that recovers a nonnegative vector
from unsigned sums of its entries over a biregular bipartite graph.

Each round tightens two per-variable bound vectors in four steps, run in
order over all edges:

1. every check j sends each neighbor i an upper bound on x_i: its
   measurement minus the current lower bounds of its other neighbors;
2. every variable takes the minimum incoming upper bound;
3. every check sends each neighbor a lower bound: its measurement minus
   the current upper bounds of its other neighbors;
4. every variable takes the maximum incoming lower bound, floored at 0.

Steps 2 and 4 aggregate over all of a variable's checks with no recipient
exclusion, so variable-to-check messages are recipient independent and
collapse to the per-node vectors ``lower`` and ``upper``.  Check-to-variable
messages stay per-edge and are stored aligned with ``adj_x``: row i holds
the messages arriving at variable i from its c checks, in adj_x order.

Lower bounds are entrywise nondecreasing across rounds and upper bounds
nonincreasing from round 1 on; when the measurement is an exact unsigned
sum of some nonnegative x, the bounds sandwich x at every round.  Within a
round each step is a barrier: all messages of a step read only values from
the previous step, so a data-parallel implementation would be bit-identical
to this sequential one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graph import BipartiteGraph


@dataclass(frozen=True)
class DecoderState:
    """Bounds and per-edge check-to-variable messages after ``round`` rounds.

    ``upper`` is +inf before round 1 (the first upper bounds are produced
    inside round 1); the message arrays are None until then.
    """

    round: int
    lower: np.ndarray
    upper: np.ndarray
    msg_even_cv: np.ndarray | None
    msg_odd_cv: np.ndarray | None


@dataclass(frozen=True)
class RoundStats:
    round: int
    max_gap: float
    l1_lower_change: float
    l1_upper_change: float


@dataclass(frozen=True)
class RecoveryResult:
    """Outcome of a decode run.

    ``estimate`` equals the final lower bounds: they are guaranteed
    nonnegative and are the quantity the recovery guarantees track.  The
    final upper bounds are exposed separately.  ``gap_trace`` holds
    max_i(upper_i - lower_i) after each round.
    """

    estimate: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rounds_run: int
    converged: bool
    gap_trace: list[float]
    round_stats: list[RoundStats]


def _as_nonneg_vector(values, length: int, what: str) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.shape[0] != length:
        raise InputError(f"{what} must be a length-{length} vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{what} contains non-finite entries")
    if np.any(v < 0):
        raise InputError(f"{what} contains negative entries")
    return v


def measure(g: BipartiteGraph, x) -> np.ndarray:
    """Apply the 0/1 measurement matrix: y_j = sum of x over check j's neighbors."""
    x = _as_nonneg_vector(x, g.n, "signal")
    return x[g.adj_y].sum(axis=1)


def init_state(g: BipartiteGraph) -> DecoderState:
    """State before round 1: zero lower bounds, +inf upper sentinel."""
    return DecoderState(
        round=0,
        lower=np.zeros(g.n),
        upper=np.full(g.n, math.inf),
        msg_even_cv=None,
        msg_odd_cv=None,
    )


def _check_state(state: DecoderState, g: BipartiteGraph) -> None:
    if state.lower.shape != (g.n,) or state.upper.shape != (g.n,):
        raise InputError("decoder state does not match graph dimensions")
    for msg in (state.msg_even_cv, state.msg_odd_cv):
        if msg is not None and msg.shape != (g.n, g.c):
            raise InputError("decoder state message array does not match graph edges")


def step_round(state: DecoderState, g: BipartiteGraph, y) -> DecoderState:
    """Advance one full round (all four message steps, in order).

    The exclusion sums "measurement minus the other neighbors" are computed
    as y_j - (sum over all neighbors) + own value, which is the same
    quantity with Theta(edges) total work.
    """
    _check_state(state, g)
    y = _as_nonneg_vector(y, g.m, "measurement")
    lower = state.lower

    # Step 1: check -> variable upper messages from current lower bounds.
    slack_even = y - lower[g.adj_y].sum(axis=1)
    msg_even_cv = slack_even[g.adj_x] + lower[:, None]
    # Step 2: per-variable upper bound.
    upper = msg_even_cv.min(axis=1)
    # Step 3: check -> variable lower messages from the new upper bounds.
    slack_odd = y - upper[g.adj_y].sum(axis=1)
    msg_odd_cv = slack_odd[g.adj_x] + upper[:, None]
    # Step 4: per-variable lower bound, floored at zero.
    new_lower = np.maximum(0.0, msg_odd_cv.max(axis=1))

    return DecoderState(
        round=state.round + 1,
        lower=new_lower,
        upper=upper,
        msg_even_cv=msg_even_cv,
        msg_odd_cv=msg_odd_cv,
    )


def default_tolerance(y: np.ndarray) -> float:
    """Zero for integer-valued measurements, else 1e-9 * (1 + max|y|).

    Integer inputs stay exactly representable through every update, so the
    bounds can be required to meet exactly; float inputs need a
    scale-aware slack.
    """
    if y.size and np.all(y == np.round(y)):
        return 0.0
    return 1e-9 * (1.0 + float(np.max(np.abs(y), initial=0.0)))


def decode(
    g: BipartiteGraph,
    y,
    max_rounds: int = 100,
    tol: float | None = None,
) -> RecoveryResult:
    """Run the bound-tightening rounds until the bounds meet or the budget ends.

    Parameters
    ----------
    g : measurement graph.
    y : length-m nonnegative measurement vector.
    max_rounds : hard round budget (>= 1); the update rules give no
        stopping rule for instances that never converge, so one is imposed.
    tol : convergence threshold on max_i(upper_i - lower_i); None selects
        ``default_tolerance(y)``.

    Returns a RecoveryResult; non-convergent runs return converged=False
    rather than raising, since the bounds are meaningful diagnostics on
    arbitrary graphs.
    """
    y = _as_nonneg_vector(y, g.m, "measurement")
    if max_rounds < 1:
        raise InputError(f"max_rounds must be >= 1, got {max_rounds}")
    if tol is None:
        tol = default_tolerance(y)
    if tol < 0:
        raise InputError(f"tol must be nonnegative, got {tol}")

    state = init_state(g)
    gap_trace: list[float] = []
    stats: list[RoundStats] = []
    converged = False
    while state.round < max_rounds:
        prev = state
        state = step_round(state, g, y)
        gap = float(np.max(state.upper - state.lower))
        l1_low = float(np.abs(state.lower - prev.lower).sum())
        l1_up = (
            math.inf
            if state.round == 1
            else float(np.abs(state.upper - prev.upper).sum())
        )
        gap_trace.append(gap)
        stats.append(RoundStats(state.round, gap, l1_low, l1_up))
        if gap <= tol:
            converged = True
            break

    return RecoveryResult(
        estimate=state.lower.copy(),
        lower=state.lower,
        upper=state.upper,
        rounds_run=state.round,
        converged=converged,
        gap_trace=gap_trace,
        round_stats=stats,
    )
