"""K-groups fitting by local relocation search.

Three fit modes share one sweep loop:

* first_variation  - move one point at a time; a point is relocated when the
  weighted energy statistic against its own cluster exceeds the minimum
  weighted statistic against any other cluster.
* second_variation - points are pre-paired by greedy closest matching and
  pairs move together, which lets the search escape some single-point local
  minima.
* kmeans_alpha2    - the alpha=2 special case evaluated through maintained
  centroids (the Hartigan-Wong transfer criterion); it produces the same
  move sequence as first variation at alpha=2 without the O(n^2) cache.

Relocation gains are exact: moving points S (|S| = m) from a cluster of
size n1 into one of size n2 changes the objective by

    m*n1/(2*(n1-m)) * xi(S, source)  -  m*n2/(2*(n2+m)) * xi(S, target)

where xi is the two-sample energy statistic between S and the cluster
(including S itself on the source side).  A move is applied only when this
gain is strictly positive, so the objective strictly decreases and the
search terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import DistanceCache, as_data_matrix, disco, validate_alpha
from .errors import InputError, NumericInvariantError, RejectedMoveError
from .partition import (
    ClusterSumLedger,
    Partition,
    _surjective_labels,
    move_point,
    random_partition,
)

__all__ = [
    "MODES",
    "FitConfig",
    "FitResult",
    "first_variation_delta",
    "mth_variation_delta",
    "move_points",
    "min_distance_pairs",
    "fit",
    "fit_first_variation",
    "fit_second_variation",
    "fit_kmeans_alpha2",
]

MODES = ("first_variation", "second_variation", "kmeans_alpha2")


@dataclass(frozen=True)
class FitConfig:
    """Settings for one clustering fit."""

    k: int
    alpha: float = 1.0
    restarts: int = 10
    max_passes: int = 50
    rng_seed: int = 0
    mode: str = "first_variation"

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be at least 1")
        validate_alpha(self.alpha)
        if self.restarts < 1:
            raise InputError("restarts must be at least 1")
        if self.max_passes < 1:
            raise InputError("max_passes must be at least 1")
        if int(self.rng_seed) < 0:
            raise InputError("rng_seed must be a nonnegative integer")
        if self.mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "kmeans_alpha2" and self.alpha != 2.0:
            raise InputError("kmeans_alpha2 requires alpha=2")


@dataclass
class FitResult:
    """Outcome of a fit: best partition over restarts plus run metadata.

    `within` is the converged objective of the winning restart and must agree
    with a from-scratch disco recomputation to 1e-9 relative.  `trace`, when
    requested, holds one (item, source, target, within_after) entry per
    accepted relocation of the winning restart.
    """

    partition: Partition
    within: float
    passes: int
    moves: int
    seed: int
    per_restart_within: list = field(default_factory=list)
    trace: list | None = None


# ---------------------------------------------------------------------------
# Exact relocation gains


def _xi_point(ledger, sizes, i, j) -> float:
    nj = sizes[j]
    return 2.0 * ledger.sums[i, j] / nj - 2.0 * ledger.within[j] / (nj * nj)


def first_variation_delta(partition, ledger, i, to) -> float:
    """Exact objective change from moving point i into cluster `to`.

    Positive means the move lowers the within-cluster dispersion.  Raises
    RejectedMoveError when point i is the last member of its cluster.
    """
    i, to = int(i), int(to)
    frm = int(partition.labels[i])
    if to == frm:
        raise InputError(f"point {i} is already in cluster {to}")
    if not 0 <= to < partition.k:
        raise InputError(f"cluster id {to} outside 0..{partition.k - 1}")
    sizes = partition.sizes
    n1 = int(sizes[frm])
    n2 = int(sizes[to])
    if n1 < 2:
        raise RejectedMoveError(f"point {i} is the only member of cluster {frm}")
    e1 = n1 / (2.0 * (n1 - 1.0)) * _xi_point(ledger, sizes, i, frm)
    e2 = n2 / (2.0 * (n2 + 1.0)) * _xi_point(ledger, sizes, i, to)
    return e1 - e2


def _checked_point_set(partition, points):
    pts = np.asarray(points, dtype=np.intp).ravel()
    if pts.size == 0:
        raise InputError("point set is empty")
    if np.unique(pts).size != pts.size:
        raise InputError("point set contains repeated indices")
    if pts.min() < 0 or pts.max() >= partition.n:
        raise InputError("point indices outside the partition")
    frm = int(partition.labels[pts[0]])
    if not (partition.labels[pts] == frm).all():
        raise InputError("all moved points must share one source cluster")
    return pts, frm


def mth_variation_delta(partition, ledger, points, to) -> float:
    """Exact objective change from moving a set of m points together.

    Reduces to first_variation_delta when m = 1.  Raises RejectedMoveError
    when the move would empty the source cluster.
    """
    pts, frm = _checked_point_set(partition, points)
    to = int(to)
    if to == frm:
        raise InputError("target cluster equals the source cluster")
    if not 0 <= to < partition.k:
        raise InputError(f"cluster id {to} outside 0..{partition.k - 1}")
    m = pts.size
    n1 = int(partition.sizes[frm])
    n2 = int(partition.sizes[to])
    if n1 < m + 1:
        raise RejectedMoveError(
            f"moving {m} points would empty cluster {frm} (size {n1})"
        )
    cross1 = float(ledger.sums[pts, frm].sum())
    cross2 = float(ledger.sums[pts, to].sum())
    internal = float(ledger.dist[np.ix_(pts, pts)].sum())
    xi1 = 2.0 * cross1 / (m * n1) - internal / (m * m) - 2.0 * ledger.within[frm] / (n1 * n1)
    xi2 = 2.0 * cross2 / (m * n2) - internal / (m * m) - 2.0 * ledger.within[to] / (n2 * n2)
    return (m * n1) / (2.0 * (n1 - m)) * xi1 - (m * n2) / (2.0 * (n2 + m)) * xi2


def move_points(partition, ledger, points, to) -> None:
    """Apply a joint move of several same-cluster points (ledger maintained)."""
    pts, frm = _checked_point_set(partition, points)
    if int(partition.sizes[frm]) < pts.size + 1:
        raise RejectedMoveError(
            f"moving {pts.size} points would empty cluster {frm}"
        )
    for i in pts:
        move_point(partition, ledger, int(i), int(to))


# ---------------------------------------------------------------------------
# Sweep states: one per fit mode, shared control flow


class _PointState:
    """First-variation sweep over single points, ledger-backed."""

    def __init__(self, cache, partition):
        self.partition = partition
        self.ledger = ClusterSumLedger(partition, cache)
        self.k = partition.k

    def n_items(self) -> int:
        return self.partition.n

    def item_id(self, i):
        return i

    def visit(self, i):
        part = self.partition
        ledger = self.ledger
        labels = part.labels
        sizes = part.sizes
        frm = int(labels[i])
        n1 = int(sizes[frm])
        if n1 < 2 or self.k < 2:
            return None
        row = ledger.sums[i]
        within = ledger.within
        e1 = n1 / (2.0 * (n1 - 1.0)) * (
            2.0 * float(row[frm]) / n1 - 2.0 * float(within[frm]) / (n1 * n1)
        )
        best = math.inf
        best_j = -1
        for j in range(self.k):
            if j == frm:
                continue
            nj = int(sizes[j])
            xi = 2.0 * float(row[j]) / nj - 2.0 * float(within[j]) / (nj * nj)
            e2 = nj / (2.0 * (nj + 1.0)) * xi
            if e2 < best:
                best = e2
                best_j = j
        if e1 > best:
            move_point(part, ledger, i, best_j)
            return frm, best_j
        return None

    def within_value(self) -> float:
        return self.ledger.within_dispersion(self.partition)


class _PairState:
    """Second-variation sweep over fixed point pairs, ledger-backed."""

    def __init__(self, cache, partition, pairs, ids=None):
        self.partition = partition
        self.ledger = ClusterSumLedger(partition, cache)
        self.pairs = pairs
        self.ids = ids if ids is not None else pairs
        self.k = partition.k

    def n_items(self) -> int:
        return len(self.pairs)

    def item_id(self, t):
        return self.ids[t]

    def visit(self, t):
        part = self.partition
        ledger = self.ledger
        a, b = self.pairs[t]
        sizes = part.sizes
        frm = int(part.labels[a])
        n1 = int(sizes[frm])
        if n1 <= 2 or self.k < 2:
            return None
        dab = float(ledger.dist[a, b])
        sums = ledger.sums
        within = ledger.within
        xi1 = (
            (float(sums[a, frm]) + float(sums[b, frm])) / n1
            - dab / 2.0
            - 2.0 * float(within[frm]) / (n1 * n1)
        )
        e1 = n1 / (n1 - 2.0) * xi1
        best = math.inf
        best_j = -1
        for j in range(self.k):
            if j == frm:
                continue
            nj = int(sizes[j])
            xi = (
                (float(sums[a, j]) + float(sums[b, j])) / nj
                - dab / 2.0
                - 2.0 * float(within[j]) / (nj * nj)
            )
            e2 = nj / (nj + 2.0) * xi
            if e2 < best:
                best = e2
                best_j = j
        if e1 > best:
            move_point(part, ledger, a, best_j)
            move_point(part, ledger, b, best_j)
            return frm, best_j
        return None

    def within_value(self) -> float:
        return self.ledger.within_dispersion(self.partition)


class _CentroidState:
    """Alpha=2 sweep through maintained centroids; no distance cache.

    The transfer criterion n1*D(i, own)^2/(n1-1) vs n2*D(i, other)^2/(n2+1)
    equals the energy-statistic criterion at alpha=2, so decisions (and
    hence move traces) match the ledger path up to floating-point ties.
    """

    def __init__(self, x, partition):
        self.x = x
        self.partition = partition
        self.k = partition.k
        self.coord_sums = np.zeros((partition.k, x.shape[1]))
        for j in range(partition.k):
            idx = partition.cluster_indices(j)
            self.coord_sums[j] = x[idx].sum(axis=0)
        self.total_sq = float((x * x).sum())

    def n_items(self) -> int:
        return self.partition.n

    def item_id(self, i):
        return i

    def visit(self, i):
        part = self.partition
        sizes = part.sizes
        frm = int(part.labels[i])
        n1 = int(sizes[frm])
        if n1 < 2 or self.k < 2:
            return None
        xi = self.x[i]
        centroids = self.coord_sums / sizes[:, None]
        d2 = ((centroids - xi) ** 2).sum(axis=1)
        e1 = n1 * float(d2[frm]) / (n1 - 1.0)
        best = math.inf
        best_j = -1
        for j in range(self.k):
            if j == frm:
                continue
            nj = int(sizes[j])
            e2 = nj * float(d2[j]) / (nj + 1.0)
            if e2 < best:
                best = e2
                best_j = j
        if e1 > best:
            part._apply_move(i, best_j)
            self.coord_sums[frm] -= xi
            self.coord_sums[best_j] += xi
            return frm, best_j
        return None

    def within_value(self) -> float:
        sizes = self.partition.sizes
        centroids = self.coord_sums / sizes[:, None]
        # sorted summation keeps the value invariant under cluster relabeling
        terms = sizes * (centroids * centroids).sum(axis=1)
        return self.total_sq - float(np.sort(terms).sum())


def _sweep(state, stop_after, max_passes, trace):
    """Cycle items until `stop_after` consecutive visits produce no move."""
    n_items = state.n_items()
    passes = 0
    moves = 0
    still = 0
    while passes < max_passes and still < stop_after:
        for t in range(n_items):
            mv = state.visit(t)
            if mv is None:
                still += 1
                if still >= stop_after:
                    break
            else:
                moves += 1
                still = 0
                if trace is not None:
                    trace.append((state.item_id(t), mv[0], mv[1], state.within_value()))
        passes += 1
    return passes, moves


# ---------------------------------------------------------------------------
# Pairing for second variation


def min_distance_pairs(dist) -> list:
    """Pair every point with its nearest available neighbor.

    Points are scanned in index order; each not-yet-paired point takes the
    closest point that is still unpaired (ties by lowest index).  Requires an
    even point count.  Deterministic, O(n^2), and invariant to any strictly
    increasing transform of the distances (so the exponent alpha does not
    change the matching).
    """
    dist = np.asarray(dist)
    n = dist.shape[0]
    if n % 2:
        raise InputError("pairing needs an even number of points")
    used = np.zeros(n, dtype=bool)
    pairs = []
    for i in range(n):
        if used[i]:
            continue
        used[i] = True
        row = np.where(used, np.inf, dist[i])
        j = int(np.argmin(row))
        used[j] = True
        pairs.append((i, j))
    return pairs


# ---------------------------------------------------------------------------
# Fits


def _restart_rng(seed: int, restart: int) -> np.random.Generator:
    # spawn_key separates these streams from any default_rng(seed) consumer,
    # e.g. the data generators seeded with the same integer.
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(restart,))
    )


def _check_fit_inputs(x, cfg: FitConfig):
    n = x.shape[0]
    if cfg.k > n:
        raise InputError(f"k={cfg.k} exceeds the number of points n={n}")


def _best_restart(results):
    # results: list of (within, partition, passes, moves, trace); ties keep
    # the earliest restart.
    best = results[0]
    for r in results[1:]:
        if r[0] < best[0]:
            best = r
    return best


def _verify_within(within, partition, cache):
    fresh = disco(partition, cache).within
    if abs(within - fresh) > 1e-9 * max(1.0, abs(fresh)):
        raise NumericInvariantError(
            f"ledger objective {within!r} disagrees with recomputation {fresh!r}"
        )


def fit_first_variation(data, cfg: FitConfig, *, init_labels=None, collect_trace=False) -> FitResult:
    """K-groups by single-point relocation.

    Runs cfg.restarts independent searches from random nonempty partitions
    and returns the lowest-objective result (ties keep the earliest
    restart).  When `init_labels` is given, the first restart starts from
    that partition instead of a random one.
    """
    x = as_data_matrix(data)
    _check_fit_inputs(x, cfg)
    cache = DistanceCache(x, cfg.alpha)
    n = x.shape[0]
    results = []
    per_restart = []
    for r in range(cfg.restarts):
        rng = _restart_rng(cfg.rng_seed, r)
        if r == 0 and init_labels is not None:
            part = Partition(init_labels, cfg.k)
            if part.n != n:
                raise InputError("init_labels length does not match the data")
        else:
            part = random_partition(n, cfg.k, rng)
        state = _PointState(cache, part)
        trace = [] if collect_trace else None
        passes, moves = _sweep(state, stop_after=n, max_passes=cfg.max_passes, trace=trace)
        w = state.within_value()
        per_restart.append(w)
        results.append((w, part, passes, moves, trace))
    w, part, passes, moves, trace = _best_restart(results)
    _verify_within(w, part, cache)
    return FitResult(
        partition=part,
        within=w,
        passes=passes,
        moves=moves,
        seed=cfg.rng_seed,
        per_restart_within=per_restart,
        trace=trace,
    )


def _held_out_cluster(ledger_within, sizes, cross):
    """Insertion rule for a left-over point: argmin of the weighted statistic."""
    best = math.inf
    best_j = -1
    for j in range(sizes.shape[0]):
        nj = int(sizes[j])
        xi = 2.0 * cross[j] / nj - 2.0 * float(ledger_within[j]) / (nj * nj)
        cost = nj / (2.0 * (nj + 1.0)) * xi
        if cost < best:
            best = cost
            best_j = j
    return best_j


def fit_second_variation(data, cfg: FitConfig, *, collect_trace=False) -> FitResult:
    """K-groups by paired relocation.

    Points are paired once by greedy closest matching on the cached powered
    distances; pairs are then randomly assigned to clusters and relocated
    together.  With an odd point count one random point sits out of the
    pairing and is inserted afterwards by the single-point rule.
    """
    x = as_data_matrix(data)
    _check_fit_inputs(x, cfg)
    n = x.shape[0]
    if (n - (n % 2)) // 2 < cfg.k:
        raise InputError(
            f"second variation needs at least k={cfg.k} pairs, got {n} points"
        )
    cache = DistanceCache(x, cfg.alpha)
    all_idx = np.arange(n)
    even_pairs = None if n % 2 else min_distance_pairs(cache.dist)

    results = []
    per_restart = []
    for r in range(cfg.restarts):
        rng = _restart_rng(cfg.rng_seed, r)
        if n % 2:
            held = int(rng.integers(n))
            active = np.delete(all_idx, held)
            sub = cache.dist[np.ix_(active, active)]
            pairs = min_distance_pairs(sub)
        else:
            held = None
            active = all_idx
            sub = cache.dist
            pairs = even_pairs

        pair_labels = _surjective_labels(len(pairs), cfg.k, rng)
        labels = np.empty(active.shape[0], dtype=np.intp)
        for t, (a, b) in enumerate(pairs):
            labels[a] = pair_labels[t]
            labels[b] = pair_labels[t]
        part = Partition(labels, cfg.k)
        ids = [(int(active[a]), int(active[b])) for a, b in pairs]
        state = _PairState(sub, part, pairs, ids=ids)
        trace = [] if collect_trace else None
        passes, moves = _sweep(
            state, stop_after=len(pairs), max_passes=cfg.max_passes, trace=trace
        )

        full_labels = np.empty(n, dtype=np.intp)
        full_labels[active] = part.labels
        if held is not None:
            cross = [
                float(cache.dist[held, active[part.labels == j]].sum())
                for j in range(cfg.k)
            ]
            full_labels[held] = _held_out_cluster(state.ledger.within, part.sizes, cross)
        final = Partition(full_labels, cfg.k)
        final_ledger = ClusterSumLedger(final, cache)
        w = final_ledger.within_dispersion(final)
        per_restart.append(w)
        results.append((w, final, passes, moves, trace))

    w, part, passes, moves, trace = _best_restart(results)
    _verify_within(w, part, cache)
    return FitResult(
        partition=part,
        within=w,
        passes=passes,
        moves=moves,
        seed=cfg.rng_seed,
        per_restart_within=per_restart,
        trace=trace,
    )


def fit_kmeans_alpha2(data, cfg: FitConfig, *, init_labels=None, collect_trace=False) -> FitResult:
    """K-means via the centroid transfer criterion (the alpha=2 special case).

    Identical restart seeding and sweep order to `fit_first_variation`, so a
    run at alpha=2 reproduces that fit's move sequence while avoiding the
    O(n^2) distance cache.  The reported objective equals the total
    within-cluster sum of squared deviations from centroids.
    """
    if cfg.alpha != 2.0:
        raise InputError("kmeans_alpha2 requires alpha=2")
    x = as_data_matrix(data)
    _check_fit_inputs(x, cfg)
    n = x.shape[0]
    results = []
    per_restart = []
    for r in range(cfg.restarts):
        rng = _restart_rng(cfg.rng_seed, r)
        if r == 0 and init_labels is not None:
            part = Partition(init_labels, cfg.k)
            if part.n != n:
                raise InputError("init_labels length does not match the data")
        else:
            part = random_partition(n, cfg.k, rng)
        state = _CentroidState(x, part)
        trace = [] if collect_trace else None
        passes, moves = _sweep(state, stop_after=n, max_passes=cfg.max_passes, trace=trace)
        w = state.within_value()
        per_restart.append(w)
        results.append((w, part, passes, moves, trace))
    w, part, passes, moves, trace = _best_restart(results)

    # Centroid-path invariant: the maintained objective must match a fresh
    # sum of squared deviations from per-cluster means.
    fresh = 0.0
    for j in range(part.k):
        pts = x[part.cluster_indices(j)]
        fresh += float(((pts - pts.mean(axis=0)) ** 2).sum())
    if abs(w - fresh) > 1e-9 * max(1.0, abs(fresh)):
        raise NumericInvariantError(
            f"centroid objective {w!r} disagrees with recomputation {fresh!r}"
        )

    return FitResult(
        partition=part,
        within=w,
        passes=passes,
        moves=moves,
        seed=cfg.rng_seed,
        per_restart_within=per_restart,
        trace=trace,
    )


def fit(data, cfg: FitConfig, **kwargs) -> FitResult:
    """Dispatch to the fit implementation named by cfg.mode."""
    if cfg.mode == "first_variation":
        return fit_first_variation(data, cfg, **kwargs)
    if cfg.mode == "second_variation":
        return fit_second_variation(data, cfg, **kwargs)
    if cfg.mode == "kmeans_alpha2":
        return fit_kmeans_alpha2(data, cfg, **kwargs)
    raise InputError(f"unknown mode {cfg.mode!r}")
