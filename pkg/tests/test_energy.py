import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgroups import (
    DistanceCache,
    InputError,
    alpha_distance,
    disco,
    dispersion,
    energy_statistic,
    weighted_energy_statistic,
)
from kgroups.energy import as_data_matrix, validate_alpha

from conftest import brute_powered_distance, brute_within, random_instance


class TestAlphaDistance:
    def test_one_dimensional(self):
        assert alpha_distance([0.0], [2.0], 1.0) == 2.0

    def test_squared_norm(self):
        assert alpha_distance([3.0, 4.0], [0.0, 0.0], 2.0) == 25.0

    def test_fractional_power(self):
        # oracle: exp(0.5 * ln 4) = 2
        expected = math.exp(0.5 * math.log(4.0))
        assert alpha_distance([0.0], [4.0], 0.5) == pytest.approx(expected, rel=1e-15)

    def test_zero_for_identical_points(self):
        assert alpha_distance([1.3, -2.0], [1.3, -2.0], 0.7) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            alpha_distance([0.0], [1.0, 2.0], 1.0)

    @pytest.mark.parametrize("bad", [0.0, -1.0, 2.5, float("nan")])
    def test_invalid_alpha(self, bad):
        with pytest.raises(InputError):
            validate_alpha(bad)

    def test_alpha_bounds_accepted(self):
        assert validate_alpha(2.0) == 2.0
        assert validate_alpha(1e-9) == 1e-9


class TestDataMatrix:
    def test_column_vector_from_1d(self):
        x = as_data_matrix([1.0, 2.0, 3.0])
        assert x.shape == (3, 1)

    def test_rejects_nan(self):
        with pytest.raises(InputError):
            as_data_matrix([[1.0, np.nan]])

    def test_rejects_inf(self):
        with pytest.raises(InputError):
            as_data_matrix([[1.0], [np.inf]])

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            as_data_matrix(np.empty((0, 3)))


class TestDistanceCache:
    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
    def test_matches_pointwise_kernel(self, rng, alpha):
        x = rng.standard_normal((25, 3))
        cache = DistanceCache(x, alpha)
        for _ in range(60):
            i, j = rng.integers(25, size=2)
            expected = alpha_distance(x[i], x[j], alpha)
            assert cache.dist[i, j] == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_symmetric_zero_diagonal_nonnegative(self, rng):
        x = rng.standard_normal((30, 2))
        cache = DistanceCache(x, 0.7)
        assert np.array_equal(cache.dist, cache.dist.T)
        assert np.all(np.diag(cache.dist) == 0.0)
        assert np.all(cache.dist >= 0.0)

    def test_alpha2_is_squared_euclidean(self, rng):
        x = rng.standard_normal((10, 4))
        cache = DistanceCache(x, 2.0)
        diff = x[3] - x[7]
        assert cache.dist[3, 7] == pytest.approx(float(diff @ diff), rel=1e-12)

    def test_immutable(self, rng):
        cache = DistanceCache(rng.standard_normal((5, 2)), 1.0)
        with pytest.raises(ValueError):
            cache.dist[0, 1] = 3.0


class TestDispersion:
    def test_same_singleton_is_zero(self):
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        assert dispersion([0], [0], cache) == 0.0

    def test_two_point_self_dispersion(self):
        # hand enumeration: (0 + 2 + 2 + 0) / 4
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        assert dispersion([0, 1], [0, 1], cache) == 1.0

    def test_single_pair(self):
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        assert dispersion([0], [1], cache) == 2.0

    def test_symmetric(self, rng):
        cache = DistanceCache(rng.standard_normal((12, 2)), 1.3)
        a, b = [0, 3, 5], [1, 2, 8, 9]
        assert dispersion(a, b, cache) == dispersion(b, a, cache)

    def test_empty_set_rejected(self):
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        with pytest.raises(InputError):
            dispersion([], [0], cache)


class TestEnergyStatistic:
    def test_singletons(self):
        cache = DistanceCache([[0.0], [3.0]], 1.0)
        assert energy_statistic([0], [1], cache) == 2.0 * 3.0

    def test_point_versus_pair(self):
        # direct evaluation: 2*mean(1,2) - 0 - mean(0,1,1,0) = 3 - 0.5
        cache = DistanceCache([[0.0], [1.0], [2.0]], 1.0)
        assert energy_statistic([0], [1, 2], cache) == pytest.approx(2.5, rel=1e-15)

    def test_exactly_symmetric(self, rng):
        cache = DistanceCache(rng.standard_normal((14, 2)), 0.8)
        a, b = [0, 2, 4], [1, 3, 5, 7]
        assert energy_statistic(a, b, cache) == energy_statistic(b, a, cache)

    def test_overlap_rejected(self):
        cache = DistanceCache([[0.0], [1.0], [2.0]], 1.0)
        with pytest.raises(InputError):
            energy_statistic([0, 1], [1, 2], cache)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 2.0])
    def test_same_distribution_near_zero_never_negative(self, alpha):
        # Monte-Carlo: equal splits of one sample stay >= -1e-12 and small.
        rng = np.random.default_rng(99)
        vals = []
        for _ in range(40):
            x = rng.standard_normal((60, 2))
            cache = DistanceCache(x, alpha)
            xi = energy_statistic(np.arange(30), np.arange(30, 60), cache)
            assert xi >= -1e-12
            vals.append(xi)
        # population value is 0; the empirical statistic carries an O(1/n)
        # positive bias, so the mean over draws stays small but not tiny
        assert np.mean(vals) < 0.5

    def test_identical_multisets_give_zero(self):
        x = np.array([[0.0], [2.0], [5.0], [0.0], [2.0], [5.0]])
        cache = DistanceCache(x, 1.0)
        assert abs(energy_statistic([0, 1, 2], [3, 4, 5], cache)) <= 1e-12


class TestWeightedStatistic:
    def test_singletons_at_distance_two(self):
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        assert weighted_energy_statistic([0], [1], cache) == pytest.approx(2.0)

    def test_identical_multisets(self):
        x = np.array([[1.0, 0.0], [4.0, 2.0], [1.0, 0.0], [4.0, 2.0]])
        cache = DistanceCache(x, 1.0)
        assert abs(weighted_energy_statistic([0, 1], [2, 3], cache)) <= 1e-12

    def test_weight_scaling(self, rng):
        # equal-size sets: weight is n/2 times the raw statistic
        x = rng.standard_normal((16, 2))
        cache = DistanceCache(x, 1.0)
        a, b = np.arange(8), np.arange(8, 16)
        xi = energy_statistic(a, b, cache)
        assert weighted_energy_statistic(a, b, cache) == pytest.approx(8 / 2 * xi, rel=1e-12)


class TestDisco:
    def test_two_singletons(self):
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        d = disco([0, 1], cache)
        assert (d.total, d.within, d.between) == (1.0, 0.0, 1.0)

    def test_single_cluster(self, rng):
        x = rng.standard_normal((12, 2))
        cache = DistanceCache(x, 1.0)
        d = disco(np.zeros(12, dtype=int), cache)
        assert d.between == 0.0
        assert d.total == pytest.approx(d.within, rel=1e-12)

    def test_empty_cluster_rejected(self):
        cache = DistanceCache([[0.0], [2.0]], 1.0)
        with pytest.raises(InputError):
            disco(np.array([0, 2]), cache)  # cluster 1 missing

    def test_within_matches_brute_force(self, rng):
        for _ in range(10):
            x, labels, _ = random_instance(rng)
            for alpha in (0.5, 1.0, 2.0):
                cache = DistanceCache(x, alpha)
                d = disco(labels, cache)
                assert d.within == pytest.approx(brute_within(x, labels, alpha), rel=1e-10)

    @given(seed=st.integers(0, 10**9))
    @settings(max_examples=60, deadline=None)
    def test_identity_and_nonnegativity(self, seed):
        gen = np.random.default_rng(seed)
        x, labels, _ = random_instance(gen)
        alpha = float(gen.choice([0.3, 0.5, 1.0, 1.5, 2.0]))
        cache = DistanceCache(x, alpha)
        d = disco(labels, cache)
        assert abs(d.total - (d.within + d.between)) <= 1e-10 * max(1.0, d.total)
        assert d.within >= 0.0
        assert d.between >= -1e-12


class TestAlpha2Centroid:
    def test_within_equals_sum_of_squared_deviations(self, rng):
        # 1-D and multi-dimensional checks of the centroid identity
        for p in (1, 4):
            x = rng.standard_normal((30, p)) * 2.0
            cache = DistanceCache(x, 2.0)
            idx = np.arange(30)
            g = dispersion(idx, idx, cache)
            lhs = 30 / 2.0 * g
            c = x.mean(axis=0)
            rhs = float(((x - c) ** 2).sum())
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_one_dimensional_moment_form(self, rng):
        x = rng.standard_normal(20)
        cache = DistanceCache(x, 2.0)
        idx = np.arange(20)
        lhs = 20 / 2.0 * dispersion(idx, idx, cache)
        rhs = float((x**2).sum() - 20 * x.mean() ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-9)
