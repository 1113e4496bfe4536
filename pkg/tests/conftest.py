from __future__ import annotations

import numpy as np
import pytest

from extendkit import BoundedFunction, EuclideanMetric, PointCloudSet, RealLineMetric


@pytest.fixture
def rng():
    return np.random.default_rng(0x7152)


@pytest.fixture
def two_points():
    A = PointCloudSet([0.0, 1.0], RealLineMetric())
    return A, BoundedFunction(A, [0.0, 1.0])


@pytest.fixture
def cloud2d(rng):
    A = PointCloudSet(rng.uniform(0, 1, (60, 2)), EuclideanMetric(2))
    return A
