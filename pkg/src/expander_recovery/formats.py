"""Text file formats and CSV writers.

Graph file: line 1 is ``n m c d``; lines 2..n+1 are the space-separated
check neighbors of each variable (0-based).  Vector file: one decimal
value per line.  All writers emit byte-identical output for identical
inputs (floats use repr, the shortest round-tripping form).
"""

from __future__ import annotations

import os
from typing import Iterable, Sequence

import numpy as np

from .analysis import PeelingDecomposition
from .decoder import RoundStats
from .errors import InputError
from .graph import BipartiteGraph


def _fmt(value: float) -> str:
    return repr(float(value))


def write_graph(g: BipartiteGraph, path: str | os.PathLike) -> None:
    lines = [f"{g.n} {g.m} {g.c} {g.d}"]
    for i in range(g.n):
        lines.append(" ".join(str(int(j)) for j in g.adj_x[i]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_graph(path: str | os.PathLike) -> BipartiteGraph:
    """Load and fully validate a graph file; raises InputError on any
    malformed line or invariant violation."""
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    lines = [line for line in raw if line]
    if not lines:
        raise InputError(f"{path}: empty graph file")
    header = lines[0].split()
    if len(header) != 4:
        raise InputError(f"{path}: header must be 'n m c d', got {lines[0]!r}")
    try:
        n, m, c, d = (int(tok) for tok in header)
    except ValueError as exc:
        raise InputError(f"{path}: non-integer header field: {exc}") from exc
    if len(lines) - 1 != n:
        raise InputError(f"{path}: expected {n} adjacency lines, found {len(lines) - 1}")
    adj_x = []
    for ln, line in enumerate(lines[1:], start=2):
        try:
            row = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise InputError(f"{path}:{ln}: non-integer check index: {exc}") from exc
        if len(row) != c:
            raise InputError(f"{path}:{ln}: expected {c} neighbors, found {len(row)}")
        adj_x.append(row)
    try:
        g = BipartiteGraph.from_adj_x(adj_x, m)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc
    if g.c != c or g.d != d:
        raise InputError(f"{path}: header degrees ({c},{d}) disagree with adjacency ({g.c},{g.d})")
    return g


def write_vector(values, path: str | os.PathLike) -> None:
    v = np.asarray(values, dtype=np.float64)
    with open(path, "w") as fh:
        for entry in v:
            fh.write(_fmt(entry) + "\n")


def read_vector(path: str | os.PathLike, expected_len: int | None = None) -> np.ndarray:
    with open(path) as fh:
        raw = [line.strip() for line in fh]
    tokens = [line for line in raw if line]
    try:
        values = np.array([float(tok) for tok in tokens])
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric vector entry: {exc}") from exc
    if expected_len is not None and values.shape[0] != expected_len:
        raise InputError(
            f"{path}: expected {expected_len} values, found {values.shape[0]}"
        )
    return values


def write_trace_csv(stats: Sequence[RoundStats], path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write("round,max_gap,l1_lower_change,l1_upper_change\n")
        for row in stats:
            fh.write(
                f"{row.round},{_fmt(row.max_gap)},"
                f"{_fmt(row.l1_lower_change)},{_fmt(row.l1_upper_change)}\n"
            )


def write_matching_csv(edges: Iterable[tuple[int, int]], path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write("i,j\n")
        for i, j in sorted(edges):
            fh.write(f"{i},{j}\n")


def write_peeling_csv(peel: PeelingDecomposition, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write("layer,vertex\n")
        for layer_idx, layer in enumerate(peel.layers):
            for vertex in sorted(layer):
                fh.write(f"{layer_idx},{vertex}\n")
