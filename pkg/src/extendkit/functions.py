"""Bounded functions on a sampled set and their lattice operations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metric import PointCloudSet

LATTICE_OPS = ("add", "sub", "scale", "join", "meet", "pos_part", "neg_part", "abs")


class MismatchedSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BoundedFunction:
    """Finite real values attached to the points of a :class:`PointCloudSet`.

    Supports the usual vector-lattice operations pointwise: ``+``, ``-``,
    scalar ``*``, ``|`` (join), ``&`` (meet), ``abs`` and the positive and
    negative parts.
    """

    cloud: PointCloudSet
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1)
        if len(vals) != len(self.cloud):
            raise ValueError(
                f"{len(vals)} values for a cloud of {len(self.cloud)} points")
        if not np.all(np.isfinite(vals)):
            raise ValueError("function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, cloud: PointCloudSet, fn: Callable) -> "BoundedFunction":
        pts = cloud.points
        arg = pts[:, 0] if pts.ndim == 2 and pts.shape[1] == 1 else pts
        return cls(cloud, np.asarray(fn(arg), dtype=float))

    @classmethod
    def constant(cls, cloud: PointCloudSet, c: float) -> "BoundedFunction":
        return cls(cloud, np.full(len(cloud), float(c)))

    def __len__(self) -> int:
        return len(self.values)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, BoundedFunction):
            if other.cloud is not self.cloud:
                raise MismatchedSetError("functions are attached to different point sets")
            return other.values
        return np.asarray(float(other))

    def _new(self, vals) -> "BoundedFunction":
        return BoundedFunction(self.cloud, vals)

    def __add__(self, other):
        return self._new(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self._new(self.values - self._other(other))

    def __rsub__(self, other):
        return self._new(self._other(other) - self.values)

    def __mul__(self, lam):
        if isinstance(lam, BoundedFunction):
            return self._new(self.values * self._other(lam))
        return self._new(self.values * float(lam))

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.values)

    def __abs__(self):
        return self._new(np.abs(self.values))

    def __or__(self, other):
        return self._new(np.maximum(self.values, self._other(other)))

    def __and__(self, other):
        return self._new(np.minimum(self.values, self._other(other)))

    def reciprocal(self) -> "BoundedFunction":
        if np.any(self.values == 0):
            raise ZeroDivisionError("reciprocal of a function that vanishes somewhere")
        return self._new(1.0 / self.values)

    @property
    def pos(self) -> "BoundedFunction":
        return self._new(np.maximum(self.values, 0.0))

    @property
    def neg(self) -> "BoundedFunction":
        return self._new(np.maximum(-self.values, 0.0))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min(self) -> float:
        return float(np.min(self.values))

    def max(self) -> float:
        return float(np.max(self.values))

    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0))

    def __le__(self, other) -> bool:
        return bool(np.all(self.values <= self._other(other)))

    def __ge__(self, other) -> bool:
        return bool(np.all(self.values >= self._other(other)))


def lattice(phi: BoundedFunction, psi: BoundedFunction | None, op: str,
            lam: float | None = None) -> BoundedFunction:
    """Pointwise lattice/vector operation by name (see :data:`LATTICE_OPS`)."""
    if op == "add":
        return phi + psi
    if op == "sub":
        return phi - psi
    if op == "scale":
        if lam is None:
            raise ValueError("scale needs lam")
        return phi * lam
    if op == "join":
        return phi | psi
    if op == "meet":
        return phi & psi
    if op == "pos_part":
        return phi.pos
    if op == "neg_part":
        return phi.neg
    if op == "abs":
        return abs(phi)
    raise ValueError(f"unknown lattice op {op!r}")


def sup_norm(phi: BoundedFunction) -> float:
    return phi.sup_norm()
