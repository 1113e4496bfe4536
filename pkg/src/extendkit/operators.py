"""Extension operators on a sampled closed set.

Every operator maps a bounded function ``phi`` on the sample ``A`` to a
function on the whole space.  Writing ``rho = d(p, A)``:

=========  ==========================================================
hausdorff  ``inf_a [phi(a) + d(a,p)/rho - 1]``
omega      ``sup_a phi(a) * F(d(a,p), rho)``            (phi >= 0)
mho        ``inf_a phi(a) * G(d(a,p), rho)``            (phi >= 0)
theta      ``omega[phi+] - omega[phi-]``
bohr       ``(1/rho) * integral_rho^{2 rho} eta(t) dt``
pasch      ``inf_a [phi(a) * rho + d(a,p)]``  or, with a slope kappa,
           ``inf_a [phi(a) + kappa * d(a,p)]``
=========  ==========================================================

The first five are extensions: at a point of ``A`` they return ``phi``
there.  The pasch forms are Lipschitz regularisations and are evaluated by
their formula everywhere.

Each operator has two evaluation strategies.  ``brute`` scans every point of
``A``.  ``pruned`` visits points in order of increasing distance and stops as
soon as a monotone bound shows that no unvisited point can change the
result; it returns exactly the same floats as ``brute``.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .extenders import DualWeight, Extender, Riesz
from .functions import BoundedFunction
from .metric import PointCloudSet, _chunks

OPERATORS = ("hausdorff", "omega", "mho", "theta", "bohr", "pasch")
STRATEGIES = ("brute", "pruned")

#: Queries closer than this to a sample point are treated as members of A.
MEMBER_TOL = 1e-12

_FIRST_K = 32
_GROWTH = 4


class NegativeValuesError(ValueError):
    """A sup/inf-product operator was given a function with negative values."""


class ZeroInfimumWarning(UserWarning):
    """``mho`` of a function vanishing somewhere: the extension is discontinuous."""

    def __init__(self, message: str, zero_ids=()):
        super().__init__(message)
        self.zero_ids = tuple(int(i) for i in zero_ids)


def _require_nonnegative(phi: BoundedFunction, operator: str):
    if not phi.is_nonnegative():
        bad = np.flatnonzero(phi.values < 0)
        raise NegativeValuesError(
            f"{operator} requires phi >= 0 but phi at point {int(bad[0])} is {float(phi.values[bad[0]])!r}; "
            "on functions with negative values the construction is not an extension "
            "(it fails to be continuous at the boundary); use theta for signed data")


# ---------------------------------------------------------------- term kernels
#
# A kernel maps (distances, rho, phi-values) to per-point terms.  Distances
# and rho are broadcast row-wise; everything is elementwise, so the same term
# is computed bit for bit whichever subset of A a row holds.

@dataclass(frozen=True)
class _Kernel:
    terms: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    # bound(floor, rho): best term any point at distance >= floor can reach
    bound: Callable[[np.ndarray, np.ndarray], np.ndarray] | None
    maximise: bool
    extension: bool = True


def _hausdorff_kernel(phi: BoundedFunction) -> _Kernel:
    lo = phi.min()
    return _Kernel(
        terms=lambda d, rho, v: (v + d / rho) - 1.0,
        bound=lambda f, rho: (lo + f / rho) - 1.0,
        maximise=False,
    )


def _omega_kernel(phi: BoundedFunction, F: Extender) -> _Kernel:
    hi = phi.max()
    bound = None
    if F.decreasing_in_s:
        bound = lambda f, rho: hi * F.unchecked(np.maximum(f, rho), rho)  # noqa: E731
    return _Kernel(terms=lambda d, rho, v: v * F.unchecked(d, rho), bound=bound, maximise=True)


def _mho_kernel(phi: BoundedFunction, G: DualWeight) -> _Kernel:
    lo = phi.min()
    bound = None
    if G.increasing_in_s:
        bound = lambda f, rho: lo * G.unchecked(np.maximum(f, rho), rho)  # noqa: E731
    return _Kernel(terms=lambda d, rho, v: v * G.unchecked(d, rho), bound=bound, maximise=False)


def _pasch_kernel(phi: BoundedFunction, kappa: float | None) -> _Kernel:
    lo = phi.min()
    if kappa is None:
        return _Kernel(
            terms=lambda d, rho, v: v * rho + d,
            bound=lambda f, rho: lo * rho + f,
            maximise=False, extension=False,
        )
    k = float(kappa)
    return _Kernel(
        terms=lambda d, rho, v: v + k * d,
        bound=lambda f, rho: lo + k * f,
        maximise=False, extension=False,
    )


# ------------------------------------------------------------- scan strategies

def _membership(cloud: PointCloudSet, Q: np.ndarray):
    rho, nearest = cloud.nearest(Q)
    return rho, nearest, rho < MEMBER_TOL


def _reduce(terms: np.ndarray, maximise: bool) -> np.ndarray:
    return terms.max(axis=1) if maximise else terms.min(axis=1)


def _scan_brute(cloud: PointCloudSet, phi: BoundedFunction, kernel: _Kernel,
                Q: np.ndarray, rho: np.ndarray, rows: np.ndarray) -> np.ndarray:
    out = np.empty(len(rows))
    v = phi.values[None, :]
    for lo, hi in _chunks(len(rows), len(cloud)):
        sel = rows[lo:hi]
        d = cloud.distances(Q[sel])
        with np.errstate(divide="ignore", invalid="ignore"):
            out[lo:hi] = _reduce(kernel.terms(d, rho[sel, None], v), kernel.maximise)
    return out


def _scan_pruned(cloud: PointCloudSet, phi: BoundedFunction, kernel: _Kernel,
                 Q: np.ndarray, rho: np.ndarray, rows: np.ndarray) -> np.ndarray:
    if kernel.bound is None:
        return _scan_brute(cloud, phi, kernel, Q, rho, rows)
    out = np.empty(len(rows))
    pending = np.arange(len(rows))
    k = _FIRST_K
    while len(pending):
        sel = rows[pending]
        if k >= len(cloud):
            out[pending] = _scan_brute(cloud, phi, kernel, Q, rho, sel)
            break
        ids, floor = cloud.knn(Q[sel], k)
        d = cloud.gathered_distances(Q[sel], ids)
        r = rho[sel]
        with np.errstate(divide="ignore", invalid="ignore"):
            best = _reduce(kernel.terms(d, r[:, None], phi.values[ids]), kernel.maximise)
            bound = kernel.bound(floor, r)
        margin = 1e-12 * np.maximum(1.0, np.maximum(np.abs(best), np.abs(bound)))
        gap = (best - bound) if kernel.maximise else (bound - best)
        done = np.isinf(floor) | (gap >= margin)
        out[pending[done]] = best[done]
        pending = pending[~done]
        k *= _GROWTH
    return out


def _evaluate_kernel(cloud, phi, kernel, Q, strategy):
    rho, nearest, member = _membership(cloud, Q)
    out = np.empty(len(Q))
    if kernel.extension:
        rows = np.flatnonzero(~member)
        out[member] = phi.values[nearest[member]]
    else:
        rows = np.arange(len(Q))
    scan = _scan_pruned if strategy == "pruned" else _scan_brute
    if len(rows):
        out[rows] = scan(cloud, phi, kernel, Q, rho, rows)
    return out, rho, member


# ------------------------------------------------------------------------ bohr

@dataclass(frozen=True)
class EtaStep:
    """Exact representation of ``t -> sup{phi(a): d(x, a) < t}``.

    ``breakpoints`` are the sorted distances from ``x`` (ties by point id),
    ``plateaus[i]`` the maximum of ``phi`` over the first ``i + 1`` points,
    taken on ``(breakpoints[i], breakpoints[i + 1]]``.  For ``t <= rho`` the
    step function equals ``floor = min phi``.
    """

    breakpoints: np.ndarray
    plateaus: np.ndarray
    floor: float
    ids: np.ndarray

    @property
    def rho(self) -> float:
        return float(self.breakpoints[0])

    def __call__(self, t: float) -> float:
        if t <= self.breakpoints[0]:
            return self.floor
        i = int(np.searchsorted(self.breakpoints, t, side="left")) - 1
        return float(self.plateaus[i])

    def integral(self, lo: float, hi: float) -> float:
        """Exact integral over ``[lo, hi]`` as a sum of clipped plateaus."""
        if hi <= lo:
            return 0.0
        edges = np.concatenate(([-np.inf], self.breakpoints, [np.inf]))
        values = np.concatenate(([self.floor], self.plateaus))
        left = np.maximum(edges[:-1], lo)
        right = np.minimum(edges[1:], hi)
        width = np.maximum(right - left, 0.0)
        return math.fsum((values * width).tolist())

    def window_mean(self) -> float:
        """``(1/rho) * integral over [rho, 2 rho]``, in increment form."""
        return float(_bohr_sorted_rows(self.breakpoints[None, :], self.plateaus[None, :])[0])


def _bohr_sorted_rows(d_sorted: np.ndarray, plateaus: np.ndarray) -> np.ndarray:
    # eta = p_1 + sum_j (p_j - p_{j-1}) [t > d_j], so the window mean is
    # p_1 + sum_j (p_j - p_{j-1}) * max(0, 2 rho - d_j) / rho.
    # Points with d_j >= 2 rho contribute exact zeros; the sequential cumsum
    # makes the result independent of how many of them a row carries.
    rho = d_sorted[:, :1]
    inc = np.diff(plateaus, axis=1)
    frac = np.maximum(2.0 * rho - d_sorted[:, 1:], 0.0) / rho
    terms = np.concatenate((plateaus[:, :1], inc * frac), axis=1)
    return np.cumsum(terms, axis=1)[:, -1]


def _bohr_rows(d: np.ndarray, ids: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Bohr values for rows of candidate ``ids`` (ascending per row) at distances ``d``."""
    order = np.argsort(d, axis=1, kind="stable")  # ties keep ascending id
    d_sorted = np.take_along_axis(d, order, axis=1)
    plateaus = np.maximum.accumulate(values[np.take_along_axis(ids, order, axis=1)], axis=1)
    return _bohr_sorted_rows(d_sorted, plateaus)


def _bohr_scan(cloud: PointCloudSet, phi: BoundedFunction, Q, rho, rows, strategy):
    out = np.empty(len(rows))
    if strategy == "brute":
        for lo, hi in _chunks(len(rows), len(cloud)):
            d = cloud.distances(Q[rows[lo:hi]])
            ids = np.broadcast_to(np.arange(len(cloud)), d.shape)
            out[lo:hi] = _bohr_rows(d, ids, phi.values)
        return out
    pending = np.arange(len(rows))
    k = _FIRST_K
    while len(pending):
        sel = rows[pending]
        if k >= len(cloud):
            out[pending] = _bohr_scan(cloud, phi, Q, rho, sel, "brute")
            break
        ids, floor = cloud.knn(Q[sel], k)
        # every point with d < 2 rho must be among the candidates
        done = floor >= 2.0 * rho[sel]
        if np.any(done):
            cand = np.sort(ids[done], axis=1)
            d = cloud.gathered_distances(Q[sel[done]], cand)
            out[pending[done]] = _bohr_rows(d, cand, phi.values)
        pending = pending[~done]
        k *= _GROWTH
    return out


# ------------------------------------------------------------------ public API

def _queries(cloud: PointCloudSet, p) -> np.ndarray:
    return cloud.metric.as_point(p)


def hausdorff_eval(A: PointCloudSet, phi: BoundedFunction, p, strategy: str = "brute") -> float:
    """Hausdorff's extension at ``p``."""
    return Extension(A, phi, "hausdorff", strategy=strategy)(p)


def omega_eval(A: PointCloudSet, phi: BoundedFunction, F: Extender, p,
               strategy: str = "brute", allow_negative: bool = False) -> float:
    """Tietze-type supremum extension at ``p``.

    ``allow_negative`` evaluates the formula on signed data anyway; the
    result is then not an extension in general and is only meant for
    reproducing that failure.
    """
    if allow_negative:
        Q = _queries(A, p)
        val, _, _ = _evaluate_kernel(A, phi, _omega_kernel(phi, F), Q, strategy)
        return float(val[0])
    return Extension(A, phi, "omega", weight=F, strategy=strategy)(p)


def mho_eval(A: PointCloudSet, phi: BoundedFunction, G: DualWeight, p,
             strategy: str = "brute") -> float:
    """Dieudonne-type infimum extension at ``p``."""
    return Extension(A, phi, "mho", weight=G, strategy=strategy)(p)


def theta_eval(A: PointCloudSet, phi: BoundedFunction, F: Extender, p,
               strategy: str = "brute") -> float:
    return Extension(A, phi, "theta", weight=F, strategy=strategy)(p)


def bohr_eta(A: PointCloudSet, phi: BoundedFunction, x) -> EtaStep:
    """Breakpoint form of Bohr's step function at a point outside ``A``."""
    Q = _queries(A, x)
    d = A.distances(Q)[0]
    if d.min() < MEMBER_TOL:
        raise ValueError("bohr_eta needs a point outside A (rho > 0)")
    order = np.argsort(d, kind="stable")
    return EtaStep(d[order], np.maximum.accumulate(phi.values[order]), phi.min(), order)


def bohr_eval(A: PointCloudSet, phi: BoundedFunction, x, strategy: str = "brute") -> float:
    return Extension(A, phi, "bohr", strategy=strategy)(x)


def pasch_eval(A: PointCloudSet, phi: BoundedFunction, p, kappa: float | None = None,
               strategy: str = "brute") -> float:
    """Pasch-Hausdorff inf-convolution.

    Without ``kappa``: ``inf_a [phi(a) d(p, A) + d(a, p)]`` (needs phi >= 0;
    this vanishes on A, so it is *not* an extension of phi).  With ``kappa``:
    ``inf_a [phi(a) + kappa d(a, p)]``, which is ``kappa``-Lipschitz and lies
    below phi on A.
    """
    return Extension(A, phi, "pasch", kappa=kappa, strategy=strategy)(p)


@dataclass(frozen=True)
class EvalResult:
    value: float
    rho: float
    branch: str  # "member" or "exterior"


@dataclass(frozen=True)
class Extension:
    """An operator bound to a sampled set and a function on it.

    Call it on a single point, or use :meth:`evaluate_many` for an array of
    queries.  ``weight`` is an :class:`Extender` for omega/theta and a
    :class:`DualWeight` for mho; ``kappa`` selects the slope form of pasch.
    """

    cloud: PointCloudSet
    phi: BoundedFunction
    operator: str
    weight: Extender | DualWeight | None = None
    kappa: float | None = None
    strategy: str = "brute"

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ValueError(f"unknown operator {self.operator!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.phi.cloud is not self.cloud:
            raise ValueError("phi is attached to a different point set")
        op = self.operator
        if op in ("omega", "theta"):
            if self.weight is None:
                object.__setattr__(self, "weight", Riesz())
            if not isinstance(self.weight, Extender):
                raise TypeError(f"{op} needs an Extender weight")
        elif op == "mho":
            if not isinstance(self.weight, DualWeight):
                raise TypeError("mho needs a DualWeight")
        elif self.weight is not None:
            raise TypeError(f"{op} takes no weight")
        if self.kappa is not None:
            if op != "pasch":
                raise TypeError("kappa applies to pasch only")
            if self.kappa < 0:
                raise ValueError("kappa must be nonnegative")
        if op in ("omega", "mho") or (op == "pasch" and self.kappa is None):
            _require_nonnegative(self.phi, op)
        if op == "mho" and self.phi.min() == 0:
            zeros = np.flatnonzero(self.phi.values == 0)
            warnings.warn(ZeroInfimumWarning(
                "mho of a function that vanishes on A is 0 everywhere off A "
                "and so discontinuous at the zeros", zeros), stacklevel=3)

    @property
    def is_extension(self) -> bool:
        return self.operator != "pasch"

    def _raw(self, Q: np.ndarray):
        op, A, phi, strat = self.operator, self.cloud, self.phi, self.strategy
        if op == "hausdorff":
            return _evaluate_kernel(A, phi, _hausdorff_kernel(phi), Q, strat)
        if op == "omega":
            return _evaluate_kernel(A, phi, _omega_kernel(phi, self.weight), Q, strat)
        if op == "mho":
            return _evaluate_kernel(A, phi, _mho_kernel(phi, self.weight), Q, strat)
        if op == "pasch":
            return _evaluate_kernel(A, phi, _pasch_kernel(phi, self.kappa), Q, strat)
        if op == "theta":
            pos, neg = phi.pos, phi.neg
            vp, rho, member = _evaluate_kernel(A, pos, _omega_kernel(pos, self.weight), Q, strat)
            vn, _, _ = _evaluate_kernel(A, neg, _omega_kernel(neg, self.weight), Q, strat)
            # on A one part is zero, so the difference is phi exactly
            return vp - vn, rho, member
        # bohr
        rho, nearest, member = _membership(A, Q)
        out = np.empty(len(Q))
        out[member] = phi.values[nearest[member]]
        rows = np.flatnonzero(~member)
        if len(rows):
            out[rows] = _bohr_scan(A, phi, Q, rho, rows, strat)
        return out, rho, member

    def __call__(self, p) -> float:
        val, _, _ = self._raw(self.cloud.metric.as_point(p))
        return float(val[0])

    def evaluate_detailed(self, p) -> EvalResult:
        val, rho, member = self._raw(self.cloud.metric.as_point(p))
        branch = "member" if member[0] and self.is_extension else "exterior"
        return EvalResult(float(val[0]), float(rho[0]), branch)

    def evaluate_many(self, queries, threads: int | None = None,
                      chunk: int = 256) -> np.ndarray:
        """Evaluate at every query; output order follows input order."""
        Q = self.cloud.as_queries(queries)
        if len(Q) == 0:
            return np.empty(0)
        workers = resolve_threads(threads)
        if workers <= 1 or len(Q) <= chunk:
            return self._raw(Q)[0]
        parts = [Q[i:i + chunk] for i in range(0, len(Q), chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return np.concatenate([r[0] for r in pool.map(self._raw, parts)])

    def restricted_values(self) -> np.ndarray:
        """Values at the sample points themselves."""
        return self._raw(self.cloud.points)[0]


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``EXTENDKIT_THREADS`` (0 = all cores)."""
    if threads is None:
        try:
            threads = int(os.environ.get("EXTENDKIT_THREADS", "1"))
        except ValueError:
            threads = 1
    if threads <= 0:
        threads = os.cpu_count() or 1
    return threads
