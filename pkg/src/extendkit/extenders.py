"""Weight functions on ``{(s, t): s >= t > 0}`` and their axiom validation.

``s`` plays the role of ``d(a, p)`` and ``t`` that of ``d(p, A)``.  An
*extender* takes values in ``(0, 1]``, tends to 1 along the diagonal and to 0
off it as ``t -> 0``, decreases in ``s`` and is uniformly continuous away from
``t = 0``.  A *dual weight* takes values in ``[1, inf)`` and is used with an
infimum instead of a supremum.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

TINY = np.finfo(float).tiny

#: Upper end of the validation grids.
GRID_MAX = 1e4


class DomainError(ValueError):
    """Arguments outside ``s >= t > 0``."""


def _check_domain(s, t):
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)) or np.any(~(s >= t)):
        raise DomainError("weights are defined only for s >= t > 0")
    return s, t


class Extender:
    """A weight ``F(s, t)`` with values in ``(0, 1]``.

    ``decreasing_in_s`` marks the monotonicity as analytic; only then do the
    operators prune their scans.  User-supplied extenders leave it False.
    """

    name = "custom"
    decreasing_in_s = False

    def __init__(self, fn: Callable | None = None, name: str | None = None):
        self._fn = fn
        if name is not None:
            self.name = name

    def _eval(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.broadcast_to(np.asarray(self._fn(s, t), dtype=float),
                               np.broadcast(s, t).shape)

    def __call__(self, s, t):
        s, t = _check_domain(s, t)
        out = self._eval(s, t)
        return float(out) if out.ndim == 0 else out

    def unchecked(self, s: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Evaluate without the domain check (callers guarantee it)."""
        return self._eval(s, t)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class Riesz(Extender):
    """``R(s, t) = t / s``."""

    name = "riesz"
    decreasing_in_s = True

    def _eval(self, s, t):
        return t / s


class Tietze(Extender):
    """``T(s, t) = (1 + s**2) ** (-1 / t)``, evaluated in log space.

    Values that underflow are clamped to the smallest positive normal so that
    the weight stays strictly positive; :meth:`evaluate` reports where.
    """

    name = "tietze"
    decreasing_in_s = True

    def evaluate(self, s, t) -> tuple[np.ndarray, np.ndarray]:
        s, t = _check_domain(s, t)
        with np.errstate(over="ignore", under="ignore"):
            raw = np.exp(-np.log1p(s * s) / t)
        clamped = raw < TINY
        return np.where(clamped, TINY, raw), clamped

    def _eval(self, s, t):
        with np.errstate(over="ignore", under="ignore"):
            raw = np.exp(-np.log1p(s * s) / t)
        low = raw < TINY
        if np.any(low):
            log.debug("tietze weight underflow clamped at %d entries", int(np.sum(low)))
            raw = np.where(low, TINY, raw)
        return raw


class DualWeight:
    """A weight ``G(s, t) >= 1`` for infimum-type extensions."""

    name = "custom-dual"
    increasing_in_s = False

    def __init__(self, fn: Callable | None = None, name: str | None = None):
        self._fn = fn
        if name is not None:
            self.name = name

    def _eval(self, s, t):
        return np.broadcast_to(np.asarray(self._fn(s, t), dtype=float),
                               np.broadcast(s, t).shape)

    def __call__(self, s, t):
        s, t = _check_domain(s, t)
        out = self._eval(s, t)
        return float(out) if out.ndim == 0 else out

    def unchecked(self, s, t):
        return self._eval(s, t)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class Dieudonne(DualWeight):
    """``D(s, t) = s / t``."""

    name = "dieudonne"
    increasing_in_s = True

    def _eval(self, s, t):
        return s / t


class Reciprocal(DualWeight):
    """``1 / F`` for an extender ``F``."""

    def __init__(self, extender: Extender):
        super().__init__(name=f"reciprocal-of-{extender.name}")
        self.extender = extender
        self.increasing_in_s = extender.decreasing_in_s

    def _eval(self, s, t):
        return 1.0 / self.extender.unchecked(s, t)


EXTENDERS = {"riesz": Riesz, "tietze": Tietze}
DUAL_WEIGHTS = {"dieudonne": Dieudonne}


def get_extender(name: str) -> Extender:
    try:
        return EXTENDERS[name]()
    except KeyError:
        raise ValueError(f"unknown extender {name!r}; choose from {sorted(EXTENDERS)}") from None


def get_dual_weight(name: str) -> DualWeight:
    if name in DUAL_WEIGHTS:
        return DUAL_WEIGHTS[name]()
    if name.startswith("reciprocal-of-"):
        return Reciprocal(get_extender(name[len("reciprocal-of-"):]))
    raise ValueError(f"unknown dual weight {name!r}")


def eval_extender(F: Extender, s, t):
    return F(s, t)


def eval_dual(G: DualWeight, s, t):
    return G(s, t)


@dataclass
class AxiomResult:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)


@dataclass
class ExtenderReport:
    extender: str
    tau: float
    grid_n: int
    grid_max: float
    limit: AxiomResult
    monotone: AxiomResult
    continuity: AxiomResult
    clamped_values: int = 0

    @property
    def passed(self) -> bool:
        return self.limit.passed and self.monotone.passed and self.continuity.passed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


LIMIT_TOL = 1e-3
MODULUS_DELTAS = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6)


def _weights(F, s, t):
    if isinstance(F, Tietze):
        vals, clamped = F.evaluate(s, t)
        return vals, int(np.sum(clamped))
    return np.broadcast_to(np.asarray(F(s, t), dtype=float), np.broadcast(s, t).shape), 0


def validate_extender(F: Extender, tau: float, grid_n: int = 64) -> ExtenderReport:
    """Sample the three extender axioms on fixed grids.

    Failures are reported, never raised.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    if grid_n < 16:
        raise ValueError("grid_n must be at least 16")
    clamped = 0

    # axiom 1: limits as t -> 0 along and off the diagonal
    ts = tau * 2.0 ** -np.arange(21)
    diag, c = _weights(F, ts, ts)
    clamped += c
    diag_residual = np.abs(1.0 - diag)
    approaching = bool(np.all(np.diff(diag_residual) <= 1e-15))
    off = {}
    off_ok = True
    for s_fixed in (tau, 1.0, 10.0):
        vals, c = _weights(F, np.full_like(ts, s_fixed), ts)
        clamped += c
        off[repr(s_fixed)] = float(vals[-1])
        off_ok &= bool(vals[-1] <= LIMIT_TOL)
    in_range = bool(np.all((diag > 0) & (diag <= 1)))
    limit = AxiomResult(
        "limits",
        bool(diag_residual[-1] <= LIMIT_TOL and approaching and off_ok and in_range),
        {"t_grid": ts.tolist(), "diagonal_residual_at_min_t": float(diag_residual[-1]),
         "diagonal_monotone_approach": approaching, "off_diagonal_at_min_t": off,
         "tolerance": LIMIT_TOL},
    )

    # axiom 2: nonincreasing in s on a log grid over the region
    g = np.geomspace(tau, GRID_MAX, grid_n)
    S, T = np.meshgrid(g, g, indexing="xy")  # rows: fixed t, columns: s
    valid = S >= T
    W = np.full(S.shape, np.nan)
    w, c = _weights(F, S[valid], T[valid])
    clamped += c
    W[valid] = w
    rises = np.diff(W, axis=1) > 0  # NaN compares False
    out_of_range = int(np.sum((w <= 0) | (w > 1)))
    worst = np.nanmax(np.where(np.isnan(np.diff(W, axis=1)), -np.inf, np.diff(W, axis=1)))
    monotone = AxiomResult(
        "decreasing_in_s",
        int(np.sum(rises)) == 0 and out_of_range == 0,
        {"violations": int(np.sum(rises)), "worst_increase": float(max(worst, 0.0)),
         "out_of_range": out_of_range, "grid": [float(tau), GRID_MAX, grid_n]},
    )

    # axiom 3: empirical modulus on s >= t >= tau from fixed perturbations
    base_s, base_t = S[valid], T[valid]
    directions = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1)]
    table = []
    for delta in MODULUS_DELTAS:
        worst_delta = 0.0
        for ds, dt in directions:
            s2 = base_s + ds * delta
            t2 = base_t + dt * delta
            ok = (t2 >= tau) & (s2 >= t2)
            if not np.any(ok):
                continue
            w2, c = _weights(F, s2[ok], t2[ok])
            clamped += c
            w1, _ = _weights(F, base_s[ok], base_t[ok])
            worst_delta = max(worst_delta, float(np.max(np.abs(w2 - w1))))
        table.append([delta, worst_delta])
    omegas = np.maximum.accumulate([w for _, w in table][::-1])[::-1]
    table = [[d, float(w)] for (d, _), w in zip(table, omegas)]
    shrinking = omegas[-1] <= LIMIT_TOL and (omegas[0] == 0 or omegas[-1] < omegas[0])
    continuity = AxiomResult(
        "uniform_continuity",
        bool(shrinking),
        {"modulus": table, "tolerance": LIMIT_TOL},
    )

    report = ExtenderReport(getattr(F, "name", "custom"), float(tau), int(grid_n), GRID_MAX,
                            limit, monotone, continuity, clamped)
    if clamped:
        log.info("%s: %d weights clamped to the smallest normal", report.extender, clamped)
    return report


def invert_threshold(fn: Callable[[float], float], target: float, hi: float,
                     increasing: bool = True, iters: int = 200) -> float:
    """Largest ``t`` in ``(0, hi]`` with ``fn(t) < target`` (``fn`` increasing),
    or with ``fn(t) > target`` when ``increasing`` is False.

    Plain bisection; used to turn extender limits into explicit radii.
    """
    def good(t):
        v = fn(t)
        return v < target if increasing else v > target

    if good(hi):
        return hi
    lo = hi
    while not good(lo):
        lo /= 2
        if lo < 1e-300:
            return 0.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if good(mid):
            lo = mid
        else:
            hi = mid
    return lo if math.isfinite(lo) else 0.0
