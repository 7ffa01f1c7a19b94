"""Neighbor search: accelerated backend vs. the O(n^2) oracle."""

import numpy as np
import pytest

from fmp.neighbors import (
    brute_force_pairs,
    min_pairwise_distance,
    neighbor_pairs,
    pair_distances,
    tree_pairs,
)


def random_points(rng, n, dim, scale=100.0):
    return rng.uniform(0, scale, size=(n, dim))


class TestBruteForce:
    def test_hand_case(self):
        pts = np.asarray([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]])
        i, j, d = brute_force_pairs(pts, radius=2.0)
        assert list(i) == [0] and list(j) == [1]
        assert d[0] == 1.0

    def test_strict_inequality_at_radius(self):
        pts = np.asarray([[0.0, 0.0], [2.0, 0.0]])
        i, _, _ = brute_force_pairs(pts, radius=2.0)
        assert len(i) == 0

    def test_pairs_sorted_lexicographically(self):
        rng = np.random.default_rng(0)
        pts = random_points(rng, 40, 2, scale=10.0)
        i, j, _ = brute_force_pairs(pts, radius=5.0)
        pairs = list(zip(i.tolist(), j.tolist()))
        assert pairs == sorted(pairs)
        assert all(a < b for a, b in pairs)


class TestTreeEqualsBrute:
    @pytest.mark.parametrize("dim", [2, 3])
    def test_exact_equality_on_50_random_states(self, dim):
        rng = np.random.default_rng(42 + dim)
        for case in range(50):
            n = int(rng.integers(2, 120))
            scale = float(rng.uniform(5.0, 200.0))
            pts = random_points(rng, n, dim, scale)
            radius = float(rng.uniform(0.5, scale / 2))
            bi, bj, bd = brute_force_pairs(pts, radius)
            ti, tj, td = tree_pairs(pts, radius)
            assert np.array_equal(bi, ti), f"case {case}"
            assert np.array_equal(bj, tj), f"case {case}"
            # Distances are recomputed identically in both backends.
            assert np.array_equal(bd, td), f"case {case}"

    def test_boundary_pair_excluded_by_both(self):
        pts = np.asarray([[0.0, 0.0], [3.0, 4.0]])  # distance exactly 5
        for backend in (brute_force_pairs, tree_pairs):
            i, _, _ = backend(pts, radius=5.0)
            assert len(i) == 0


class TestDispatch:
    def test_mode_names(self):
        pts = np.zeros((3, 2)) + np.arange(3)[:, None]
        for mode in ("auto", "brute", "tree"):
            i, j, d = neighbor_pairs(pts, 10.0, mode=mode)
            assert len(i) == 3
        with pytest.raises(ValueError):
            neighbor_pairs(pts, 10.0, mode="grid")


class TestMinPairwiseDistance:
    def test_fewer_than_two_points(self):
        assert min_pairwise_distance(np.zeros((1, 2))) == float("inf")
        assert min_pairwise_distance(np.zeros((0, 2))) == float("inf")

    def test_brute_equals_tree(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            pts = random_points(rng, int(rng.integers(2, 300)), 2)
            assert min_pairwise_distance(pts, mode="brute") == min_pairwise_distance(
                pts, mode="tree"
            )
