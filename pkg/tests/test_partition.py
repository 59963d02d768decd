import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgroups import (
    ClusterSumLedger,
    DistanceCache,
    InputError,
    Partition,
    RejectedMoveError,
    contingency,
    move_point,
    random_partition,
)

from conftest import random_instance


class TestPartition:
    def test_sizes_track_labels(self):
        p = Partition([0, 1, 1, 2, 0])
        assert p.k == 3
        assert p.sizes.tolist() == [2, 2, 1]
        assert p.n == 5

    def test_empty_cluster_rejected(self):
        with pytest.raises(InputError):
            Partition([0, 0, 2])  # cluster 1 empty

    def test_labels_must_fit_k(self):
        with pytest.raises(InputError):
            Partition([0, 1, 3], k=3)

    def test_copy_is_independent(self):
        p = Partition([0, 0, 1, 1])
        q = p.copy()
        q.labels[0] = 1
        assert p.labels[0] == 0


class TestRandomPartition:
    def test_n_equals_k_gives_singletons(self):
        p = random_partition(4, 4, 123)
        assert p.sizes.tolist() == [1, 1, 1, 1]
        assert sorted(p.labels.tolist()) == [0, 1, 2, 3]

    def test_deterministic_for_seed(self):
        a = random_partition(200, 2, 42)
        b = random_partition(200, 2, 42)
        assert np.array_equal(a.labels, b.labels)

    def test_every_cluster_nonempty(self):
        for seed in range(50):
            p = random_partition(7, 6, seed)
            assert p.sizes.min() >= 1

    def test_k_exceeding_n_rejected(self):
        with pytest.raises(InputError):
            random_partition(3, 4, 0)

    def test_mean_cluster_size_unbiased(self):
        # Monte-Carlo over 1000 seeds: E[size of cluster 0] = 100 for n=200, k=2
        sizes = [random_partition(200, 2, seed).sizes[0] for seed in range(1000)]
        assert abs(float(np.mean(sizes)) - 100.0) <= 5.0


def _rebuilt(ledger, partition, cache):
    return ClusterSumLedger(partition, cache)


class TestLedger:
    def test_build_matches_direct_sums(self, rng):
        x, labels, k = random_instance(rng)
        cache = DistanceCache(x, 1.0)
        p = Partition(labels, k)
        ledger = ClusterSumLedger(p, cache)
        for j in range(k):
            idx = p.cluster_indices(j)
            for i in range(p.n):
                assert ledger.sums[i, j] == pytest.approx(
                    float(cache.dist[i, idx].sum()), rel=1e-12, abs=1e-12
                )
            direct = sum(
                float(cache.dist[a, b]) for a in idx for b in idx if a < b
            )
            assert ledger.within[j] == pytest.approx(direct, rel=1e-10, abs=1e-12)

    def test_move_then_move_back_restores(self, rng):
        x, labels, k = random_instance(rng, n_lo=10)
        cache = DistanceCache(x, 0.8)
        p = Partition(labels, k)
        ledger = ClusterSumLedger(p, cache)
        sums0 = ledger.sums.copy()
        within0 = ledger.within.copy()
        i = int(np.flatnonzero(p.sizes[p.labels] >= 2)[0])
        frm = int(p.labels[i])
        to = (frm + 1) % k
        move_point(p, ledger, i, to)
        move_point(p, ledger, i, frm)
        assert np.allclose(ledger.sums, sums0, rtol=0, atol=1e-12)
        assert np.allclose(ledger.within, within0, rtol=0, atol=1e-12)
        assert p.labels[i] == frm

    def test_singleton_source_rejected(self):
        cache = DistanceCache([[0.0], [1.0], [5.0]], 1.0)
        p = Partition([0, 0, 1])
        ledger = ClusterSumLedger(p, cache)
        with pytest.raises(RejectedMoveError):
            move_point(p, ledger, 2, 0)

    def test_move_to_same_cluster_rejected(self):
        cache = DistanceCache([[0.0], [1.0]], 1.0)
        p = Partition([0, 1])
        ledger = ClusterSumLedger(p, cache)
        with pytest.raises(InputError):
            move_point(p, ledger, 0, 0)

    @given(seed=st.integers(0, 10**9))
    @settings(max_examples=40, deadline=None)
    def test_random_move_sequences_match_rebuild(self, seed):
        gen = np.random.default_rng(seed)
        x, labels, k = random_instance(gen, n_lo=10)
        alpha = float(gen.choice([0.5, 1.0, 2.0]))
        cache = DistanceCache(x, alpha)
        p = Partition(labels, k)
        ledger = ClusterSumLedger(p, cache)
        for _ in range(p.n):
            movable = np.flatnonzero(p.sizes[p.labels] >= 2)
            if movable.size == 0:
                break
            i = int(gen.choice(movable))
            to = int((p.labels[i] + 1 + gen.integers(k - 1)) % k)
            move_point(p, ledger, i, to)
            assert p.sizes.tolist() == np.bincount(p.labels, minlength=k).tolist()
        fresh = _rebuilt(ledger, p, cache)
        scale = max(1.0, float(np.abs(fresh.within).max()))
        assert np.allclose(ledger.within, fresh.within, rtol=1e-10, atol=1e-10 * scale)
        assert np.allclose(ledger.sums, fresh.sums, rtol=1e-10, atol=1e-10)


class TestContingency:
    def test_identical_partitions_diagonal(self):
        p = Partition([0, 0, 1, 1, 2, 2])
        t = contingency(p, p)
        assert np.array_equal(t.cells, np.diag([2, 2, 2]))

    def test_crossed_pairs(self):
        t = contingency(np.array([0, 0, 1, 1]), np.array([0, 1, 0, 1]))
        assert t.cells.tolist() == [[1, 1], [1, 1]]

    def test_cell_sum_is_n(self, rng):
        a = rng.integers(0, 3, size=50)
        b = rng.integers(0, 4, size=50)
        assert contingency(a, b).n == 50

    def test_marginals_match_cluster_sizes(self):
        p1 = Partition([0, 0, 0, 1, 1])
        p2 = Partition([0, 1, 1, 1, 0])
        t = contingency(p1, p2)
        assert t.row_sums.tolist() == p1.sizes.tolist()
        assert t.col_sums.tolist() == p2.sizes.tolist()

    def test_length_mismatch_rejected(self):
        with pytest.raises(InputError):
            contingency(np.array([0, 1]), np.array([0, 1, 1]))
