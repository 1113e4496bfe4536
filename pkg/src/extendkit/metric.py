"""Metric spaces, finite samples of closed sets and distance-to-set queries.

Three metric kinds are supported:

* ``euclidean``: points are coordinate vectors in R^d.
* ``real-line``: points are scalars, ``d(p, q) = |p - q|``.
* ``matrix``: points are integer indices into an explicit symmetric
  distance matrix.

Every distance used anywhere in the package goes through
:meth:`Metric.pairwise`, which is purely elementwise.  This is what lets the
brute-force and pruned evaluation paths agree bit for bit: a distance does not
depend on which other points were evaluated alongside it.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.spatial import cKDTree

#: Below this size a linear scan beats building a tree.
INDEX_THRESHOLD = 256

#: Relative slack applied when translating tree distances into exact ones.
_TREE_SLACK = 1e-9


class MetricError(ValueError):
    """Invalid points for a metric (dimension mismatch, bad index, NaN)."""


class Metric(ABC):
    kind: str

    @abstractmethod
    def as_points(self, points) -> np.ndarray:
        """Normalise user input into the internal point array."""

    @abstractmethod
    def pairwise(self, queries: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Distance matrix of shape ``(len(queries), len(points))``."""

    @abstractmethod
    def as_point(self, p) -> np.ndarray:
        """A single point as a length-1 point array."""

    def dist(self, p, q) -> float:
        return float(self.pairwise(self.as_point(p), self.as_point(q))[0, 0])

    @property
    def supports_tree(self) -> bool:
        return False


class EuclideanMetric(Metric):
    kind = "euclidean"

    def __init__(self, dim: int | None = None):
        self.dim = dim

    def as_points(self, points) -> np.ndarray:
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None] if self.dim in (None, 1) else arr[None, :]
        if arr.ndim != 2:
            raise MetricError(f"points must be a 2-D array, got shape {arr.shape}")
        if self.dim is not None and arr.shape[1] != self.dim:
            raise MetricError(f"dimension mismatch: expected {self.dim}, got {arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            raise MetricError("coordinates must be finite")
        return arr

    def as_point(self, p) -> np.ndarray:
        arr = np.asarray(p, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[None, :]
        return self.as_points(arr)

    def pairwise(self, queries: np.ndarray, points: np.ndarray) -> np.ndarray:
        if queries.shape[1] != points.shape[1]:
            raise MetricError(
                f"dimension mismatch: {queries.shape[1]} vs {points.shape[1]}")
        # explicit per-axis accumulation keeps the arithmetic elementwise
        diff = queries[:, None, 0] - points[None, :, 0]
        acc = diff * diff
        for k in range(1, points.shape[1]):
            diff = queries[:, None, k] - points[None, :, k]
            acc = acc + diff * diff
        return np.sqrt(acc)

    @property
    def supports_tree(self) -> bool:
        return True


class RealLineMetric(Metric):
    kind = "real-line"

    def as_points(self, points) -> np.ndarray:
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[1] != 1:
            raise MetricError(f"real-line points must be scalars, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise MetricError("coordinates must be finite")
        return arr

    def as_point(self, p) -> np.ndarray:
        arr = np.asarray(p, dtype=float)
        if arr.size != 1:
            raise MetricError(f"real-line point must be a scalar, got shape {arr.shape}")
        return self.as_points(arr.reshape(1, 1))

    def pairwise(self, queries: np.ndarray, points: np.ndarray) -> np.ndarray:
        return np.abs(queries[:, None, 0] - points[None, :, 0])

    @property
    def supports_tree(self) -> bool:
        return True


class MatrixMetric(Metric):
    """Explicit finite metric given by an ``n x n`` distance matrix.

    Points are integer indices ``0 <= i < n``.  Symmetry and the triangle
    inequality are not checked on construction; call :meth:`validate`.
    """

    kind = "matrix"

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise MetricError(f"distance matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise MetricError("distance matrix entries must be finite and nonnegative")
        self.matrix = m
        self.matrix.setflags(write=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def as_points(self, points) -> np.ndarray:
        arr = np.asarray(points)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.ndim != 1:
            raise MetricError("matrix-metric points are 1-D integer indices")
        if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
            raise MetricError("matrix-metric points must be integers")
        arr = arr.astype(np.intp)
        if arr.size and (arr.min() < 0 or arr.max() >= self.n):
            raise MetricError(f"index out of range for {self.n}-point matrix metric")
        return arr

    def as_point(self, p) -> np.ndarray:
        arr = self.as_points(np.asarray(p).reshape(-1))
        if len(arr) != 1:
            raise MetricError("expected a single index")
        return arr

    def pairwise(self, queries: np.ndarray, points: np.ndarray) -> np.ndarray:
        return self.matrix[np.ix_(queries, points)]

    def validate(self, atol: float = 0.0) -> list[str]:
        """Check zero diagonal, symmetry and the triangle inequality.

        Returns a list of human-readable problems; empty means valid.
        """
        m = self.matrix
        problems = []
        if np.any(np.abs(np.diag(m)) > atol):
            problems.append("nonzero diagonal")
        asym = np.abs(m - m.T)
        if np.any(asym > atol):
            i, j = np.unravel_index(np.argmax(asym), asym.shape)
            problems.append(f"asymmetric at ({i}, {j}): {m[i, j]} vs {m[j, i]}")
        off = np.eye(self.n, dtype=bool)
        if np.any(m[~off] <= 0):
            problems.append("distinct points at zero distance")
        # d(i,k) <= d(i,j) + d(j,k), one intermediate j at a time
        for j in range(self.n):
            via = m[:, j][:, None] + m[j, :][None, :]
            excess = m - via
            if np.any(excess > atol):
                i, k = np.unravel_index(np.argmax(excess), excess.shape)
                problems.append(f"triangle inequality fails for ({i}, {j}, {k})")
                break
        return problems


def make_metric(kind: str, **params) -> Metric:
    if kind == "euclidean":
        return EuclideanMetric(params.get("dim"))
    if kind in ("real-line", "real_line", "abs"):
        return RealLineMetric()
    if kind in ("matrix", "explicit-distance-matrix"):
        return MatrixMetric(params["matrix"])
    raise ValueError(f"unknown metric kind {kind!r}")


def dist(metric: Metric, p, q) -> float:
    """Distance between two points under ``metric``."""
    return metric.dist(p, q)


@dataclass(frozen=True)
class PointCloudSet:
    """A finite, duplicate-free sample of a closed set A.

    ``index`` selects the nearest-neighbour strategy: ``"auto"`` builds a
    k-d tree for coordinate metrics from :data:`INDEX_THRESHOLD` points up,
    ``"linear"`` never does, ``"tree"`` always does (when the metric allows).
    Every result is identical whichever strategy is used.
    """

    points: np.ndarray
    metric: Metric
    index: str = "auto"
    _tree: cKDTree | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = self.metric.as_points(self.points)
        if len(pts) == 0:
            raise ValueError("a point cloud must be nonempty")
        if pts.ndim == 2:
            uniq = np.unique(pts, axis=0)
        else:
            uniq = np.unique(pts)
        if len(uniq) != len(pts):
            raise ValueError("point cloud contains duplicate points")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.index not in ("auto", "linear", "tree"):
            raise ValueError(f"unknown index strategy {self.index!r}")
        use_tree = self.metric.supports_tree and (
            self.index == "tree" or (self.index == "auto" and len(pts) >= INDEX_THRESHOLD))
        if use_tree:
            object.__setattr__(self, "_tree", cKDTree(pts))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def has_index(self) -> bool:
        return self._tree is not None

    def as_queries(self, queries) -> np.ndarray:
        return self.metric.as_points(queries)

    def distances(self, queries: np.ndarray, ids: np.ndarray | None = None) -> np.ndarray:
        """Exact distances from each query to the cloud (or to ``ids`` only)."""
        queries = self.as_queries(queries)
        pts = self.points if ids is None else self.points[ids]
        return self.metric.pairwise(queries, pts)

    def gathered_distances(self, queries: np.ndarray, ids: np.ndarray) -> np.ndarray:
        """Row-wise gather: ``out[i, j] = d(queries[i], points[ids[i, j]])``."""
        if isinstance(self.metric, MatrixMetric):
            return self.metric.matrix[queries[:, None], self.points[ids]]
        pts = self.points[ids]  # (q, k, dim)
        diff = queries[:, None, 0] - pts[:, :, 0]
        if isinstance(self.metric, RealLineMetric):
            return np.abs(diff)
        acc = diff * diff
        for k in range(1, pts.shape[2]):
            diff = queries[:, None, k] - pts[:, :, k]
            acc = acc + diff * diff
        return np.sqrt(acc)

    def dist_to_set(self, p) -> tuple[float, int]:
        """``(rho, nearest_id)``; ties go to the smallest point id."""
        q = self.metric.as_point(p)
        rho, nearest = self.nearest(q)
        return float(rho[0]), int(nearest[0])

    def nearest(self, queries: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised :meth:`dist_to_set` over a query array."""
        queries = self.as_queries(queries)
        if self._tree is None or len(queries) == 0:
            rho = np.empty(len(queries))
            nearest = np.empty(len(queries), dtype=np.intp)
            for lo, hi in _chunks(len(queries), len(self)):
                d = self.distances(queries[lo:hi])
                nearest[lo:hi] = np.argmin(d, axis=1)
                rho[lo:hi] = d[np.arange(hi - lo), nearest[lo:hi]]
            return rho, nearest
        # tree distances may differ from exact ones in the last bits: take
        # every point within a slightly inflated radius and decide exactly
        tree_d, _ = self._tree.query(queries, k=1)
        radius = tree_d * (1 + _TREE_SLACK) + 1e-300
        rho = np.empty(len(queries))
        nearest = np.empty(len(queries), dtype=np.intp)
        for i, (q, r) in enumerate(zip(queries, radius)):
            cand = np.sort(np.asarray(self._tree.query_ball_point(q, r), dtype=np.intp))
            d = self.distances(queries[i:i + 1], cand)[0]
            j = int(np.argmin(d))
            rho[i], nearest[i] = d[j], cand[j]
        return rho, nearest

    def knn(self, queries: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Approximate-order k nearest candidates and a lower bound on the rest.

        Returns ``(ids, floor)`` where ``ids`` has shape ``(q, k)`` and every
        point not in ``ids[i]`` lies at exact distance ``>= floor[i]``.
        """
        queries = self.as_queries(queries)
        n = len(self)
        if k >= n:
            ids = np.broadcast_to(np.arange(n), (len(queries), n))
            return ids, np.full(len(queries), np.inf)
        if self._tree is not None:
            d, ids = self._tree.query(queries, k=k + 1)
            floor = d[:, -1] * (1 - _TREE_SLACK)
            return ids[:, :k], floor
        d = self.distances(queries)
        part = np.argpartition(d, k, axis=1)
        ids = part[:, :k]
        floor = np.take_along_axis(d, part[:, k:k + 1], axis=1)[:, 0]
        return ids, floor

    def within(self, p, radius: float) -> np.ndarray:
        """Ids of points at exact distance ``< radius`` from ``p``, ascending."""
        q = self.metric.as_point(p)
        if self._tree is not None:
            cand = np.sort(np.asarray(
                self._tree.query_ball_point(q[0], radius * (1 + _TREE_SLACK) + 1e-300),
                dtype=np.intp))
            if len(cand) == 0:
                return cand
            d = self.distances(q, cand)[0]
            return cand[d < radius]
        d = self.distances(q)[0]
        return np.flatnonzero(d < radius)

    def iter_points(self) -> Iterator[np.ndarray]:
        yield from self.points


def _chunks(n_rows: int, n_cols: int, budget: int = 2_000_000) -> Iterator[tuple[int, int]]:
    step = max(1, budget // max(1, n_cols))
    for lo in range(0, n_rows, step):
        yield lo, min(n_rows, lo + step)


def dist_to_set(cloud: PointCloudSet, p) -> tuple[float, int]:
    """Distance from ``p`` to the sampled set and the id attaining it."""
    return cloud.dist_to_set(p)
