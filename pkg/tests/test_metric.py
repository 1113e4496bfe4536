from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extendkit import EuclideanMetric, MatrixMetric, PointCloudSet, RealLineMetric, dist, dist_to_set
from extendkit.metric import MetricError, make_metric


def test_euclidean_pythagoras():
    assert dist(EuclideanMetric(), (0, 0), (3, 4)) == 5.0


def test_real_line():
    assert dist(RealLineMetric(), 2, -1) == 3.0


@pytest.mark.parametrize("metric,p", [(EuclideanMetric(), (1.5, -2.0)), (RealLineMetric(), 7.0)])
def test_identity(metric, p):
    assert dist(metric, p, p) == 0.0


def test_dimension_mismatch():
    with pytest.raises(MetricError):
        dist(EuclideanMetric(2), (0, 0), (1, 2, 3))


def test_matrix_metric_index_errors():
    m = MatrixMetric([[0, 1], [1, 0]])
    assert dist(m, 0, 1) == 1.0
    with pytest.raises(MetricError):
        dist(m, 0, 2)


def test_matrix_validate_reports_triangle_failure():
    m = MatrixMetric([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
    assert any("triangle" in p for p in m.validate())
    assert MatrixMetric([[0, 1, 2], [1, 0, 1], [2, 1, 0]]).validate() == []


def test_make_metric_kinds():
    assert isinstance(make_metric("real-line"), RealLineMetric)
    assert isinstance(make_metric("matrix", matrix=[[0.0]]), MatrixMetric)
    with pytest.raises(ValueError):
        make_metric("manhattan")


def test_cloud_rejects_duplicates_and_empty():
    with pytest.raises(ValueError):
        PointCloudSet([0.0, 0.0], RealLineMetric())
    with pytest.raises(ValueError):
        PointCloudSet(np.empty((0, 2)), EuclideanMetric(2))


def test_dist_to_set_ties_go_to_smallest_id():
    A = PointCloudSet([-1.0, 1.0], RealLineMetric())
    assert dist_to_set(A, 0.0) == (1.0, 0)


def test_dist_to_set_member_is_zero():
    A = PointCloudSet([0.0, 0.25, 3.0], RealLineMetric())
    assert dist_to_set(A, 0.25) == (0.0, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 600))
def test_tree_and_linear_agree_exactly(seed, dim, n):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 1, (n, dim))
    # snap to a coarse grid to force distance ties
    pts = np.unique(np.round(pts * 8) / 8, axis=0)
    Q = np.round(rng.uniform(-0.5, 1.5, (40, dim)) * 16) / 16
    lin = PointCloudSet(pts, EuclideanMetric(dim), index="linear")
    tree = PointCloudSet(pts, EuclideanMetric(dim), index="tree")
    r1, i1 = lin.nearest(Q)
    r2, i2 = tree.nearest(Q)
    assert np.array_equal(r1, r2)
    assert np.array_equal(i1, i2)


def test_knn_floor_bounds_the_rest(rng):
    pts = rng.uniform(0, 1, (500, 2))
    A = PointCloudSet(pts, EuclideanMetric(2), index="tree")
    Q = rng.uniform(0, 1, (20, 2))
    ids, floor = A.knn(Q, 16)
    D = A.distances(Q)
    for row in range(len(Q)):
        rest = np.setdiff1d(np.arange(len(A)), ids[row])
        assert D[row, rest].min() >= floor[row]


def test_within_matches_brute(rng):
    A = PointCloudSet(rng.uniform(0, 1, (300, 2)), EuclideanMetric(2))
    p = np.array([0.5, 0.5])
    got = set(A.within(p, 0.2).tolist())
    want = set(np.flatnonzero(A.distances(p[None])[0] <= 0.2).tolist())
    assert got == want
