"""Energy-distance primitives.

Alpha-powered Euclidean distances, set-to-set dispersion, two-sample energy
statistics, and the disco decomposition of total dispersion into within- and
between-cluster components.  Everything downstream (the solver, the
validation harness) reads distances from one shared DistanceCache so that
all consumers agree numerically.

Summations over distance blocks go through numpy's pairwise-summing
``ndarray.sum``; that is what lets the decomposition identity
total = within + between hold to 1e-10 relative error on desk-scale inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import InputError

__all__ = [
    "validate_alpha",
    "as_data_matrix",
    "alpha_distance",
    "DistanceCache",
    "dispersion",
    "energy_statistic",
    "weighted_energy_statistic",
    "DiscoResult",
    "disco",
]


def validate_alpha(alpha) -> float:
    """Check that the distance exponent lies in (0, 2] and return it as float.

    The open lower bound keeps fractional powers well defined; 2 is admitted
    so the squared-distance (k-means) special case lives in the same code
    path.
    """
    a = float(alpha)
    if not 0.0 < a <= 2.0:  # also rejects NaN
        raise InputError(f"alpha must be in (0, 2], got {alpha!r}")
    return a


def as_data_matrix(data) -> np.ndarray:
    """Coerce input to a finite float64 matrix of shape (n, p).

    1-D input is treated as a single feature column.  NaN or infinite
    entries are rejected.
    """
    x = np.asarray(data, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise InputError(
            f"expected a nonempty 2-D data matrix, got shape {np.shape(data)}"
        )
    if not np.isfinite(x).all():
        bad = int(np.flatnonzero(~np.isfinite(x).all(axis=1))[0])
        raise InputError(f"data contains NaN or Inf (first bad row: {bad})")
    return x


def alpha_distance(x, y, alpha) -> float:
    """Euclidean distance between two points raised to the power alpha.

    Exactly 0.0 when x == y; the zero-distance case is short-circuited so no
    log or fractional power of zero is ever evaluated.
    """
    a = validate_alpha(alpha)
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.shape != yv.shape:
        raise InputError(
            f"dimension mismatch: x has {xv.size} coordinates, y has {yv.size}"
        )
    diff = xv - yv
    d2 = float(np.dot(diff, diff))
    if d2 == 0.0:
        return 0.0
    if a == 2.0:
        return d2
    return float(np.sqrt(d2) ** a)


class DistanceCache:
    """Precomputed symmetric n x n matrix of alpha-powered distances.

    Built once per data set and then shared read-only by every statistic and
    by the solver; the matrix is write-protected after construction.  The
    diagonal is exactly zero and symmetry is exact by construction (each
    pair is computed once and mirrored).
    """

    def __init__(self, data, alpha):
        self.alpha = validate_alpha(alpha)
        x = as_data_matrix(data)
        self.n = x.shape[0]
        if self.alpha == 2.0:
            condensed = pdist(x, "sqeuclidean")
        else:
            condensed = pdist(x, "euclidean") ** self.alpha
        dist = squareform(condensed)
        dist.setflags(write=False)
        self.dist = dist

    def __repr__(self):
        return f"DistanceCache(n={self.n}, alpha={self.alpha})"


def _index_set(idx, n: int, name: str) -> np.ndarray:
    a = np.asarray(idx, dtype=np.intp).ravel()
    if a.size == 0:
        raise InputError(f"{name} must be a nonempty index set")
    if a.min() < 0 or a.max() >= n:
        raise InputError(f"{name} contains indices outside 0..{n - 1}")
    a = np.sort(a)
    if a.size > 1 and (a[1:] == a[:-1]).any():
        raise InputError(f"{name} contains repeated indices")
    return a


def _dist_for(cache) -> np.ndarray:
    # Accept a DistanceCache or a raw distance matrix.
    return cache.dist if hasattr(cache, "dist") else np.asarray(cache)


def dispersion(a, b, cache) -> float:
    """Mean alpha-powered distance between two index sets.

    Bitwise symmetric in its arguments (the summed block is oriented
    canonically, so swapping a and b cannot change the rounding);
    dispersion(a, a, cache) averages over all ordered pairs including the
    zero diagonal.
    """
    dist = _dist_for(cache)
    ai = _index_set(a, dist.shape[0], "a")
    bi = _index_set(b, dist.shape[0], "b")
    if (ai.size, ai.tolist()) > (bi.size, bi.tolist()):
        ai, bi = bi, ai
    block = dist[np.ix_(ai, bi)]
    return float(block.sum() / block.size)


def energy_statistic(a, b, cache) -> float:
    """Two-sample energy statistic between disjoint index sets.

    2*G(a,b) - G(a,a) - G(b,b) where G is `dispersion`.  Nonnegative up to
    rounding for every exponent in (0, 2], and zero exactly when the two
    samples have identical empirical distributions.
    """
    dist = _dist_for(cache)
    n = dist.shape[0]
    ai = _index_set(a, n, "a")
    bi = _index_set(b, n, "b")
    if np.intersect1d(ai, bi).size:
        raise InputError("index sets overlap; the two samples must be disjoint")
    g_a = dispersion(ai, ai, cache)
    g_b = dispersion(bi, bi, cache)
    # canonical evaluation order keeps the statistic bitwise symmetric
    if (ai.size, ai.tolist()) > (bi.size, bi.tolist()):
        g_a, g_b = g_b, g_a
    return 2.0 * dispersion(ai, bi, cache) - g_a - g_b


def weighted_energy_statistic(a, b, cache) -> float:
    """Energy statistic scaled by n1*n2/(n1+n2), the test-statistic weighting."""
    ai = _index_set(a, _dist_for(cache).shape[0], "a")
    bi = _index_set(b, _dist_for(cache).shape[0], "b")
    n1, n2 = ai.size, bi.size
    return (n1 * n2 / (n1 + n2)) * energy_statistic(ai, bi, cache)


@dataclass(frozen=True)
class DiscoResult:
    """Total, within-cluster, and between-cluster dispersion."""

    total: float
    within: float
    between: float


def disco(partition, cache) -> DiscoResult:
    """Decompose total dispersion into within and between components.

    `partition` may be a Partition object or a plain label array.  All three
    components are evaluated from their own formulas; in particular
    `between` is never derived as total - within, so the identity
    total = within + between remains a meaningful consistency check.
    """
    dist = _dist_for(cache)
    labels = np.asarray(getattr(partition, "labels", partition), dtype=np.intp).ravel()
    n = dist.shape[0]
    if labels.shape[0] != n:
        raise InputError(f"partition covers {labels.shape[0]} points, cache has {n}")
    if labels.min() < 0:
        raise InputError("labels must be nonnegative cluster ids")
    k = getattr(partition, "k", int(labels.max()) + 1)
    groups = [np.flatnonzero(labels == j) for j in range(k)]
    for j, g in enumerate(groups):
        if g.size == 0:
            raise InputError(f"cluster {j} is empty")

    total = (n / 2.0) * float(dist.sum()) / (n * n)

    g_within = [float(dist[np.ix_(g, g)].sum()) / (g.size * g.size) for g in groups]
    within = sum((groups[j].size / 2.0) * g_within[j] for j in range(k))

    between = 0.0
    for i in range(k):
        for j in range(i + 1, k):
            gi, gj = groups[i], groups[j]
            cross = float(dist[np.ix_(gi, gj)].sum()) / (gi.size * gj.size)
            xi = 2.0 * cross - g_within[i] - g_within[j]
            between += (gi.size * gj.size) / (2.0 * n) * xi

    return DiscoResult(total=float(total), within=float(within), between=float(between))
