import numpy as np
import pytest

import ergokit as ek
from ergokit import generators as gen
from ergokit.errors import NotIrreducibleError, TooLargeError
from ergokit.stationary import check_balance

from conftest import from_array, random_irreducible


class TestLinearSolve:
    def test_flip_periodic_has_stationary(self, flip_chain):
        res = ek.stationary_linear(flip_chain)
        assert np.allclose(res.pi.probs, [0.5, 0.5])

    def test_two_state_closed_form(self, two_state_chain):
        res = ek.stationary_linear(two_state_chain)
        assert np.abs(res.pi.probs - [0.6, 0.4]).max() < 1e-14
        assert res.residual < 1e-14

    def test_identity_not_irreducible(self, identity3):
        with pytest.raises(NotIrreducibleError):
            ek.stationary_linear(identity3)

    @pytest.mark.parametrize("seed", range(10))
    def test_rank_is_n_minus_one(self, seed):
        rng = np.random.default_rng(seed)
        P = random_irreducible(rng, int(rng.integers(2, 8)))
        res = ek.stationary_linear(P)
        assert res.evidence["rank"] == P.n - 1
        assert res.pi.probs.min() > 0.0  # full support


class TestArborescences:
    def test_two_state_single_tree(self, two_state_chain):
        trees = ek.enumerate_arborescences(two_state_chain, root=0)
        assert len(trees) == 1
        assert trees[0].parent_edges == {1: 0}
        assert trees[0].weight == pytest.approx(0.3)  # q

    def test_cycle_single_tree(self):
        P = gen.cycle(3)
        trees = ek.enumerate_arborescences(P, root=0)
        assert len(trees) == 1
        assert trees[0].parent_edges == {1: 2, 2: 0}
        assert trees[0].weight == 1.0

    def test_complete_three_state_count(self):
        trees = ek.enumerate_arborescences(gen.uniform(3), root=1)
        assert len(trees) == 3  # rooted spanning trees of K3 toward a root

    def test_too_large(self):
        with pytest.raises(TooLargeError):
            ek.enumerate_arborescences(gen.uniform(9), root=0)

    def test_tree_shape_invariants(self):
        rng = np.random.default_rng(42)
        P = random_irreducible(rng, 5)
        for root in range(5):
            for tree in ek.enumerate_arborescences(P, root):
                assert set(tree.parent_edges) == set(range(5)) - {root}
                assert tree.weight > 0.0
                for y in tree.parent_edges:
                    v, seen = y, set()
                    while v != root:
                        assert v not in seen
                        seen.add(v)
                        v = tree.parent_edges[v]


class TestTreeStationary:
    def test_two_state_gamma(self, two_state_chain):
        res = ek.stationary_by_trees(two_state_chain, mode="enumeration")
        assert res.evidence["gamma"] == pytest.approx([0.3, 0.2])  # (q, p)
        assert np.allclose(res.pi.probs, [0.6, 0.4])

    def test_cycle_uniform(self):
        res = ek.stationary_by_trees(gen.cycle(3), mode="determinant")
        assert np.allclose(res.pi.probs, 1.0 / 3)

    def test_identity_not_irreducible(self, identity3):
        with pytest.raises(NotIrreducibleError):
            ek.stationary_by_trees(identity3)

    @pytest.mark.parametrize("seed", range(12))
    def test_determinant_matches_enumeration(self, seed):
        rng = np.random.default_rng(1100 + seed)
        P = random_irreducible(rng, int(rng.integers(2, 8)))
        a = ek.stationary_by_trees(P, mode="enumeration")
        b = ek.stationary_by_trees(P, mode="determinant")
        ga = np.array(a.evidence["gamma"])
        gb = np.array(b.evidence["gamma"])
        assert np.abs(ga - gb).max() <= 1e-10 * np.abs(ga).max()

    @pytest.mark.parametrize("seed", range(8))
    def test_balance_condition_raw_gamma(self, seed):
        rng = np.random.default_rng(1200 + seed)
        P = random_irreducible(rng, int(rng.integers(2, 8)))
        res = ek.stationary_by_trees(P, mode="determinant")
        worst = check_balance(P, np.array(res.evidence["gamma"]), rtol=1e-9)
        assert worst <= 1e-9


class TestReturnTimes:
    def test_two_state_closed_form(self, two_state_chain):
        # from state 0: visits to 1 per excursion p/q, return time (p+q)/q
        table = ek.return_time_table(two_state_chain, z=0)
        assert table.visit_counts[1] == pytest.approx(0.2 / 0.3)
        assert table.expected_return == pytest.approx(0.5 / 0.3)

    def test_cycle_deterministic_tour(self):
        table = ek.return_time_table(gen.cycle(3), z=1)
        assert np.allclose(table.visit_counts, 1.0)
        assert table.expected_return == pytest.approx(3.0)

    def test_truncated_sum_oracle(self):
        # the defining sum: pi~_y = sum_t Pr_z(X_t = y, tau+ > t), truncated deep
        rng = np.random.default_rng(77)
        P = random_irreducible(rng, 4)
        z = 0
        table = ek.return_time_table(P, z)
        alive = np.zeros(P.n)
        alive[z] = 1.0
        acc = alive.copy()
        for _ in range(10_000):
            alive = alive @ P.entries
            alive[z] = 0.0  # returning kills the excursion
            acc += alive
        assert np.abs(acc - table.visit_counts).max() < 1e-10

    @pytest.mark.parametrize("seed", range(8))
    def test_normalized_visits_match_linear(self, seed):
        rng = np.random.default_rng(1300 + seed)
        P = random_irreducible(rng, int(rng.integers(2, 8)))
        table = ek.return_time_table(P, z=0)
        pi = table.visit_counts / table.expected_return
        ref = ek.stationary_linear(P).pi.probs
        assert np.abs(pi - ref).max() < 1e-10


class TestStationaryByReturnTime:
    def test_flip(self, flip_chain):
        res = ek.stationary_by_return_time(flip_chain)
        assert np.allclose(res.pi.probs, [0.5, 0.5])
        assert res.evidence["expected_return"] == pytest.approx(2.0)

    def test_two_state(self, two_state_chain):
        res = ek.stationary_by_return_time(two_state_chain)
        assert np.abs(res.pi.probs - [0.6, 0.4]).max() < 1e-12
        assert res.evidence["expected_returns_per_state"][0] == pytest.approx(1 / 0.6)

    def test_uniform_symmetry(self):
        res = ek.stationary_by_return_time(gen.uniform(5))
        assert np.allclose(res.pi.probs, 0.2)
        assert all(
            e == pytest.approx(5.0) for e in res.evidence["expected_returns_per_state"]
        )


class TestMonteCarloReturn:
    def test_cycle_zero_variance(self):
        mean, se = ek.monte_carlo_return(gen.cycle(3), z=1, trials=200, seed=1)
        assert mean == 3.0 and se == 0.0

    def test_flip_exact(self, flip_chain):
        mean, se = ek.monte_carlo_return(flip_chain, z=0, trials=100, seed=2)
        assert mean == 2.0 and se == 0.0

    def test_two_state_within_three_se(self, two_state_chain):
        mean, se = ek.monte_carlo_return(two_state_chain, z=0, trials=100_000, seed=3)
        assert abs(mean - 1 / 0.6) <= 3 * se

    def test_deterministic_given_seed(self, two_state_chain):
        a = ek.monte_carlo_return(two_state_chain, z=1, trials=500, seed=9)
        b = ek.monte_carlo_return(two_state_chain, z=1, trials=500, seed=9)
        assert a == b


class TestCrossMethodAgreement:
    @pytest.mark.parametrize("seed", range(8))
    def test_four_way_agreement(self, seed):
        rng = np.random.default_rng(1400 + seed)
        P = random_irreducible(rng, int(rng.integers(2, 8)))
        pis = [
            ek.stationary_linear(P).pi.probs,
            ek.stationary_by_trees(P, "enumeration").pi.probs,
            ek.stationary_by_trees(P, "determinant").pi.probs,
            ek.stationary_by_return_time(P).pi.probs,
        ]
        for a in pis:
            for b in pis:
                assert np.abs(a - b).max() <= 1e-8
