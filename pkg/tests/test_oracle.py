import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expander_recovery import (
    BudgetExceededError,
    InputError,
    best_k_sparse,
    brute_force_recover,
    decode,
    find_certified_graph,
    guarantee_multiplier,
    l1_error,
    measure,
)


class TestBestKSparse:
    def test_keeps_largest(self):
        approx = best_k_sparse([3, 1, 4, 1, 5], 2)
        assert approx.support == (2, 4)
        assert approx.vector.tolist() == [0, 0, 4, 0, 5]
        assert approx.residual_l1 == 5.0

    def test_k_zero(self):
        approx = best_k_sparse([3, 1, 4], 0)
        assert approx.support == ()
        assert approx.residual_l1 == 8.0
        assert approx.vector.tolist() == [0, 0, 0]

    def test_ties_break_to_lowest_index(self):
        approx = best_k_sparse([2, 2, 2], 1)
        assert approx.support == (0,)
        assert approx.residual_l1 == 4.0

    def test_k_too_large(self):
        with pytest.raises(InputError):
            best_k_sparse([1.0, 2.0], 3)

    @settings(max_examples=80, deadline=None)
    @given(
        x=st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=7),
        k=st.integers(0, 7),
    )
    def test_optimal_over_all_supports(self, x, k):
        x = np.array(x)
        k = min(k, len(x))
        approx = best_k_sparse(x, k)
        for support in itertools.combinations(range(len(x)), k):
            kept = np.zeros_like(x)
            kept[list(support)] = x[list(support)]
            assert approx.residual_l1 <= np.abs(x - kept).sum() + 1e-12


class TestL1Error:
    def test_examples(self):
        assert l1_error([1.0, 2.0], [1.0, 2.0]) == 0.0
        assert l1_error([1.0, 2.0], [0.0, 0.0]) == 3.0
        assert l1_error([1.0, 2.0, 3.0], [1.0, 1.0, 5.0]) == 3.0

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            l1_error([1.0], [1.0, 2.0])

    @settings(max_examples=80, deadline=None)
    @given(
        vecs=st.integers(2, 6).flatmap(
            lambda n: st.tuples(
                *(
                    st.lists(st.floats(-50, 50, allow_nan=False), min_size=n, max_size=n)
                    for _ in range(3)
                )
            )
        )
    )
    def test_metric_axioms(self, vecs):
        a, b, c = (np.array(v) for v in vecs)
        assert l1_error(a, b) == l1_error(b, a)
        assert l1_error(a, c) <= l1_error(a, b) + l1_error(b, c) + 1e-9
        assert l1_error(a, a) == 0.0


class TestGuaranteeMultiplier:
    def test_values(self):
        assert guarantee_multiplier(4, 0.25) == 9.0
        assert guarantee_multiplier(2, 0.5) == 3.0

    def test_monotone_in_epsilon(self):
        values = [guarantee_multiplier(4, eps) for eps in (0.1, 0.5, 2.0, 50.0)]
        assert values == sorted(values, reverse=True)
        assert values[-1] > 1.0

    def test_rejects_nonpositive_epsilon(self):
        with pytest.raises(InputError):
            guarantee_multiplier(4, 0.0)


class TestBruteForceRecover:
    def test_zero_measurement(self, ring):
        result = brute_force_recover(ring, np.zeros(4), 2)
        assert not isinstance(result, str)
        assert result.tolist() == [0.0] * 4

    def test_ring_spike_unique(self, ring):
        y = measure(ring, [5, 0, 0, 0])
        result = brute_force_recover(ring, y, 1)
        assert not isinstance(result, str)
        assert result.tolist() == [5.0, 0.0, 0.0, 0.0]

    def test_complete_bipartite_ambiguous(self, complete33):
        # (3,3,0) and (3,0,3) are both consistent with y = (6,6,6).
        assert brute_force_recover(complete33, np.array([6.0, 6.0, 6.0]), 2) == "ambiguous"

    def test_infeasible(self, ring):
        assert brute_force_recover(ring, np.array([5.0, 0.0, 0.0, 1.0]), 1) == "infeasible"

    def test_budget_refused(self, ring):
        with pytest.raises(BudgetExceededError):
            brute_force_recover(ring, np.zeros(4), 2, support_budget=3)

    def test_validation(self, ring):
        with pytest.raises(InputError):
            brute_force_recover(ring, np.zeros(3), 1)
        with pytest.raises(InputError):
            brute_force_recover(ring, np.array([1.0, -1.0, 0.0, 0.0]), 1)
        with pytest.raises(InputError):
            brute_force_recover(ring, np.zeros(4), 9)

    def test_agrees_with_decoder_on_certified_graph(self):
        g, _, _ = find_certified_graph(16, 4, 2, 3, 0.75, seed=2, attempts=8)
        rng = np.random.default_rng(3)
        for _ in range(15):
            x = np.zeros(g.n)
            support = rng.choice(g.n, 2, replace=False)
            x[support] = rng.integers(1, 6, 2)
            y = measure(g, x)
            via_decode = decode(g, y, max_rounds=8, tol=0.0).estimate
            via_oracle = brute_force_recover(g, y, 2)
            assert not isinstance(via_oracle, str)
            assert np.array_equal(via_oracle, via_decode)
            assert np.array_equal(via_decode, x)

    def test_noninteger_solution_recovered(self, ring):
        # Exact solving is not limited to integers: fractional spikes
        # round-trip to the nearest representable float.
        y = measure(ring, [2.5, 0, 0, 0])
        result = brute_force_recover(ring, y, 1)
        assert not isinstance(result, str)
        assert result.tolist() == [2.5, 0.0, 0.0, 0.0]
