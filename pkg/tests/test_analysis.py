import itertools
import math

import pytest

from expander_recovery import (
    DeltaMatching,
    InputError,
    MinCut,
    boundary_set,
    build_random_biregular,
    find_certified_graph,
    find_delta_matching,
    gamma,
    peel_layers,
    verify_matching,
)


class TestBoundarySet:
    def test_empty(self, ring):
        assert boundary_set(ring, []) == set()

    def test_complete_bipartite_saturates(self, complete33):
        # gamma({0}) is all of Y, so both other variables have all 3 > 1.5
        # of their checks inside it.
        assert boundary_set(complete33, [0]) == {1, 2}

    def test_ring_singleton_has_empty_boundary(self, ring):
        # Each other variable shares at most 1 of its 2 checks with
        # gamma({0}) and 1 is not strictly more than c/2.
        assert boundary_set(ring, [0]) == set()


class TestDeltaMatching:
    def test_singleton_unit_demand(self, ring):
        result = find_delta_matching(ring, [0], delta=0.5)
        assert isinstance(result, DeltaMatching)
        assert len(result.edges) == 1
        (i, j), = result.edges
        assert i == 0 and j in set(ring.adj_x[0].tolist())
        assert verify_matching(ring, result)

    def test_complete_bipartite_demand_exceeds_checks(self, complete33):
        # q = ceil(0.6 * 3) = 2 per vertex, total demand 6 > 3 sink slots.
        result = find_delta_matching(complete33, [0, 1, 2], delta=0.5 + 0.1)
        assert isinstance(result, MinCut)
        assert result.flow_value == result.capacity
        assert result.capacity < 2 * 3

    def test_certified_graph_matches_all_small_subsets(self):
        eps = 0.25
        g, _, _ = find_certified_graph(20, 4, 2, 5, 0.5 + eps, seed=977, attempts=4)
        for size in (1, 2):
            for subset in itertools.combinations(range(g.n), size):
                result = find_delta_matching(g, subset, delta=0.5 + eps)
                assert isinstance(result, DeltaMatching), subset
                assert verify_matching(g, result)

    def test_matched_degrees(self, ring):
        result = find_delta_matching(ring, [0, 2], delta=1.0)
        if isinstance(result, DeltaMatching):
            per_check: dict[int, int] = {}
            for _, j in result.edges:
                per_check[j] = per_check.get(j, 0) + 1
            assert all(v == 1 for v in per_check.values())

    def test_validation(self, ring):
        with pytest.raises(InputError):
            find_delta_matching(ring, [], delta=0.5)
        with pytest.raises(InputError):
            find_delta_matching(ring, [0], delta=1.5)
        with pytest.raises(InputError):
            find_delta_matching(ring, [9], delta=0.5)


class TestVerifyMatching:
    def test_vacuous_empty(self, ring):
        empty = DeltaMatching(edges=frozenset(), S=frozenset(), delta=0.75)
        assert verify_matching(ring, empty)

    def test_constructed_matchings_verify(self):
        g = build_random_biregular(12, 3, 2, seed=5)
        for subset in [(0,), (3, 7), (1, 4)]:
            result = find_delta_matching(g, subset, delta=0.6)
            if isinstance(result, DeltaMatching):
                assert verify_matching(g, result)

    def test_dropping_edge_from_tight_vertex_fails(self):
        eps = 0.25
        g, _, _ = find_certified_graph(20, 4, 2, 5, 0.5 + eps, seed=977, attempts=4)
        result = find_delta_matching(g, [0, 1], delta=0.5 + eps)
        assert isinstance(result, DeltaMatching)
        demand = math.ceil((0.5 + eps) * g.c)
        by_var: dict[int, list] = {}
        for edge in result.edges:
            by_var.setdefault(edge[0], []).append(edge)
        victim = next(i for i, edges in by_var.items() if len(edges) == demand)
        weakened = DeltaMatching(
            edges=result.edges - {by_var[victim][0]}, S=result.S, delta=result.delta
        )
        assert not verify_matching(g, weakened)

    def test_double_loaded_check_fails(self, complete33):
        bad = DeltaMatching(
            edges=frozenset({(0, 0), (1, 0)}), S=frozenset(), delta=0.1
        )
        assert not verify_matching(complete33, bad)

    def test_foreign_edge_rejected(self, ring):
        bad = DeltaMatching(edges=frozenset({(0, 2)}), S=frozenset({0}), delta=0.5)
        with pytest.raises(InputError):
            verify_matching(ring, bad)


class TestCoveredSetBound:
    def test_confined_sets_stay_small_on_certified_graphs(self):
        # For any W of at most k vertices on a graph certified at the
        # exact-recovery level, the set of variables whose checks all land
        # inside gamma(W) has fewer than 2|W|/(1+2*eps) members.
        eps, k = 0.25, 2
        for n, c, d, seed in [(16, 4, 2, 2), (20, 4, 2, 0), (24, 3, 2, 3)]:
            g, _, _ = find_certified_graph(n, c, d, 3, 0.5 + eps, seed=seed, attempts=8)
            for size in (1, 2):
                for W in itertools.combinations(range(g.n), size):
                    nbrs = gamma(g, W)
                    confined = [
                        i
                        for i in range(g.n)
                        if all(int(j) in nbrs for j in g.adj_x[i])
                    ]
                    assert len(confined) < 2 * size / (1 + 2 * eps)


class TestPeeling:
    def test_empty_base_set(self, ring):
        peel = peel_layers(ring, [])
        assert peel.layers == (frozenset(range(4)),)
        assert not peel.stalled
        assert peel.residual == frozenset()

    def test_complete_bipartite_stalls(self, complete33):
        peel = peel_layers(complete33, [0])
        assert peel.layers == (frozenset(),)  # every variable is confined
        assert peel.stalled
        assert peel.residual == frozenset(range(3))

    def test_partition_invariant(self):
        for seed in range(5):
            g = build_random_biregular(12, 3, 2, seed=seed)
            for base in [(0,), (1, 5), (2, 7, 9)]:
                peel = peel_layers(g, base)
                pieces = list(peel.layers) + [peel.residual]
                union = set().union(*pieces)
                assert union == set(range(g.n))
                assert sum(len(p) for p in pieces) == g.n  # pairwise disjoint
                assert peel.stalled == bool(peel.residual)

    def test_certified_graph_peels_fast(self):
        eps = 0.25
        g, _, _ = find_certified_graph(20, 4, 2, 5, 0.5 + eps, seed=977, attempts=4)
        bound = math.ceil(math.log(g.n, 1 / (1 - 2 * eps))) + 1
        for size in (1, 2):
            for base in itertools.combinations(range(g.n), size):
                peel = peel_layers(g, base)
                assert not peel.stalled
                assert len(peel.layers) - 1 <= bound
                # Each peeled layer removes at least a 2*eps fraction of
                # what remained before it.
                remaining = sum(len(l) for l in peel.layers[1:])
                for layer in peel.layers[1:]:
                    assert len(layer) >= 2 * eps * remaining
                    remaining -= len(layer)
