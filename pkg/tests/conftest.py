import pytest

from expander_recovery import BipartiteGraph

# Variable i of the ring connects to checks i and (i+1) mod 4; this is the
# 8-edge cycle used for hand-checkable examples throughout.
RING_ADJ = [[0, 1], [1, 2], [2, 3], [0, 3]]


@pytest.fixture
def ring() -> BipartiteGraph:
    return BipartiteGraph.from_adj_x(RING_ADJ, m=4)


@pytest.fixture
def complete33() -> BipartiteGraph:
    # Every variable sees every check: expands only at singletons, the
    # standard negative control.
    return BipartiteGraph.from_adj_x([[0, 1, 2]] * 3, m=3)
