"""Acceptance criteria 1-11.

Each test prints one ``criterion N: PASS|FAIL`` line (visible under
``pytest -v`` and when the file is run directly) and then asserts.
"""

from __future__ import annotations

import time
import warnings

import numpy as np
import pytest

from extendkit import (
    BoundedFunction,
    Dieudonne,
    Extender,
    Extension,
    PointCloudSet,
    RealLineMetric,
    Reciprocal,
    Riesz,
    Tietze,
    validate_extender,
)
from extendkit.verify import (
    DEFAULT_SEED,
    isometry_suite,
    oracle_suite,
    random_cloud,
    random_queries,
    remark_mho_zero,
    remark_omega_negative,
    tietze_diagonal_reference,
    two_lipschitz_suite,
)

RESULTS: dict[int, bool] = {}


@pytest.fixture
def emit(capsys):
    def _emit(n: int, title: str, ok: bool, detail: str):
        RESULTS[n] = ok
        with capsys.disabled():
            print(f"\ncriterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})")
        return ok
    return _emit


def _line(lo, hi, n):
    return PointCloudSet(np.linspace(lo, hi, n), RealLineMetric())


def test_c01_psi_nonlinearity(emit):
    t0 = time.perf_counter()
    A = _line(-1, 0, 1001)
    phi = BoundedFunction.from_callable(A, lambda a: a)
    v1 = Extension(A, phi, "hausdorff")(2.0)
    v2 = Extension(A, 2 * phi, "hausdorff")(2.0)
    dt = time.perf_counter() - t0
    ok = abs(v1 + 0.5) <= 1e-9 and abs(v2 + 1.5) <= 1e-9 and dt < 0.1
    assert emit(1, "hausdorff nonlinearity", ok,
                f"psi[phi](2)={v1!r}, psi[2phi](2)={v2!r}, {dt:.3f}s")


def test_c02_theta_non_isometry(emit):
    t0 = time.perf_counter()
    A = _line(-1, 1, 2001)
    phi = BoundedFunction.from_callable(A, lambda a: (3 * a + 1) / 4)
    psi = BoundedFunction.from_callable(A, lambda a: (3 * a - 1) / 4)
    ps = np.array([3.0, 10.0, 100.0])
    dev = np.abs(Extension(A, phi, "theta", weight=Riesz()).evaluate_many(ps)
                 - Extension(A, psi, "theta", weight=Riesz()).evaluate_many(ps))
    norm = (phi - psi).sup_norm()
    dt = time.perf_counter() - t0
    err = float(np.max(np.abs(dev - ps / (ps + 1))))
    ok = err <= 1e-9 and norm == 0.5 and dt < 0.1
    assert emit(2, "theta non-isometry", ok,
                f"deviation={dev.tolist()}, max err {err:.1e}, norm={norm}, {dt:.3f}s")


def test_c03_omega_tietze_constants(emit):
    rng = np.random.default_rng(DEFAULT_SEED)
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    for _ in range(100):
        A = random_cloud(rng, int(rng.integers(5, 300)), int(rng.integers(1, 4)))
        Q = random_queries(rng, A, 20, margin=0.5)
        vals = Extension(A, BoundedFunction.constant(A, 1.0), "omega",
                         weight=Tietze()).evaluate_many(Q)
        rho, _ = A.nearest(Q)
        for v, r in zip(vals, rho):
            if r > 0:
                ref = tietze_diagonal_reference(r)
                worst = max(worst, abs(v - ref) / ref)
                count += 1
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    assert emit(3, "omega_T on constants", ok,
                f"{count} queries on 100 clouds, worst rel err {worst:.1e}, {dt:.3f}s")


def test_c04_reciprocal_identity(emit):
    rng = np.random.default_rng(DEFAULT_SEED + 4)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        A = random_cloud(rng, int(rng.integers(5, 300)), int(rng.integers(1, 4)))
        phi = BoundedFunction(A, rng.uniform(0.5, 2.0, len(A)))
        Q = random_queries(rng, A, 20)
        m = Extension(A, phi, "mho", weight=Reciprocal(Riesz())).evaluate_many(Q)
        o = Extension(A, phi.reciprocal(), "omega", weight=Riesz()).evaluate_many(Q)
        worst = max(worst, float(np.max(np.abs(m * o - 1.0))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    assert emit(4, "reciprocal identity", ok, f"worst rel err {worst:.1e}, {dt:.3f}s")


def test_c05_isometry_suites(emit):
    t0 = time.perf_counter()
    reports = [isometry_suite(op, trials=100) for op in
               ("hausdorff", "omega-riesz", "omega-tietze", "bohr")]
    dt = time.perf_counter() - t0
    ok = all(r.status == "pass" for r in reports) and dt < 5.0
    worst = max(r.worst_violation for r in reports)
    assert emit(5, "isometry suites", ok,
                f"{len(reports)} x 100 pairs, worst excess {worst:.1e}, {dt:.2f}s")


def test_c06_theta_two_lipschitz(emit):
    r = two_lipschitz_suite(trials=200)
    assert emit(6, "theta 2-Lipschitz", r.status == "pass",
                f"200 pairs, worst excess over 2||phi-psi|| {r.worst_violation:.2e}")


def test_c07_bohr_lipschitz(emit):
    rng = np.random.default_rng(DEFAULT_SEED + 7)
    tau = 0.5
    A = _line(0, 1, 1001)
    phi = BoundedFunction(A, rng.uniform(0, 1, len(A)))
    ext = Extension(A, phi, "bohr")
    # exterior pairs: both ends at distance >= tau from [0, 1], d <= tau/3
    pts = []
    while sum(len(p) for p in pts) < 10_000:
        x = rng.uniform(-5, 6, 20_000)
        p = x + rng.uniform(-tau / 3, tau / 3, 20_000)
        keep = (A.nearest(x)[0] >= tau) & (A.nearest(p)[0] >= tau)
        pts.append(np.stack([x[keep], p[keep]], axis=1))
    xp = np.concatenate(pts)[:10_000]
    d = np.abs(xp[:, 0] - xp[:, 1])
    lhs = np.abs(ext.evaluate_many(xp[:, 0]) - ext.evaluate_many(xp[:, 1]))
    excess = float(np.max(lhs - (4 / tau) * d))
    assert emit(7, "bohr 4/tau Lipschitz", excess <= 1e-9,
                f"{len(xp)} exterior pairs, max excess {excess:.2e}")


def test_c08_pasch_lipschitz(emit):
    rng = np.random.default_rng(DEFAULT_SEED + 8)
    A = random_cloud(rng, 300, 2)
    phi = BoundedFunction(A, rng.uniform(0, 2, len(A)))
    kappa = phi.max()
    ext = Extension(A, phi, "pasch")
    x = rng.uniform(-1, 2, (10_000, 2))
    p = rng.uniform(-1, 2, (10_000, 2))
    d = np.sqrt(np.sum((x - p) ** 2, axis=1))
    excess = float(np.max(np.abs(ext.evaluate_many(x) - ext.evaluate_many(p)) - (kappa + 1) * d))
    Q = rng.uniform(-1, 2, (2000, 2))
    rho, _ = A.nearest(Q)
    h = Extension(A, phi, "hausdorff").evaluate_many(Q)
    via = ext.evaluate_many(Q) / rho - 1.0
    rel = float(np.max(np.abs(h - via) / np.maximum(1.0, np.abs(h))))
    ok = excess <= 1e-9 and rel <= 1e-12
    assert emit(8, "pasch (kappa+1)-Lipschitz and identity", ok,
                f"Lipschitz excess {excess:.2e}, identity rel err {rel:.1e}")


def test_c09_failure_demos(emit):
    om = remark_omega_negative(M=1e3)
    mh = remark_mho_zero()
    ok = (om.status == "expected-fail-reproduced" and mh.status == "expected-fail-reproduced"
          and abs(om.witness["value"] - (-1 / 1001)) <= 1e-9 and mh.witness["value"] == 0.0)
    assert emit(9, "failure demos reproduce", ok,
                f"omega_R[-1](1)={om.witness['value']!r}, mho_D[1+a](0.5)={mh.witness['value']!r}")


def _timed(ext, Q):
    t0 = time.perf_counter()
    v = ext.evaluate_many(Q)
    return v, time.perf_counter() - t0


def test_c10_oracle_equivalence(emit):
    t0 = time.perf_counter()
    r = oracle_suite(clouds=50, max_points=10_000)
    dt = time.perf_counter() - t0
    # performance, informative only
    rng = np.random.default_rng(DEFAULT_SEED + 10)
    A = random_cloud(rng, 10_000, 2, clustered=True)
    Q = A.points[rng.integers(0, len(A), 1000)] + rng.normal(scale=0.05, size=(1000, 2))
    pos = BoundedFunction(A, rng.uniform(0.5, 1.0, len(A)))
    signed = BoundedFunction(A, rng.uniform(-1, 1, len(A)))
    cases = {"hausdorff": (signed, "hausdorff", None), "omega-riesz": (pos, "omega", Riesz()),
             "omega-tietze": (pos, "omega", Tietze()), "mho-dieudonne": (pos, "mho", Dieudonne()),
             "bohr": (signed, "bohr", None), "pasch": (pos, "pasch", None)}
    speed = []
    same = True
    for name, (phi, op, w) in cases.items():
        vb, tb = _timed(Extension(A, phi, op, weight=w, strategy="brute"), Q)
        vp, tp = _timed(Extension(A, phi, op, weight=w, strategy="pruned"), Q)
        same &= bool(np.array_equal(vb, vp))
        speed.append(f"{name} {tb / tp:.1f}x")
    ok = r.status == "pass" and same
    assert emit(10, "pruned == brute", ok,
                f"{r.counts['trials']} clouds, {dt:.1f}s; speedup (informative): "
                + ", ".join(speed))


def test_c11_extender_validator(emit):
    t0 = time.perf_counter()
    riesz = validate_extender(Riesz(), 0.01, 64)
    tietze = validate_extender(Tietze(), 0.01, 64)
    stub = validate_extender(
        Extender(lambda s, t: np.full(np.broadcast(s, t).shape, 0.5), name="half"), 0.01, 64)
    dt = time.perf_counter() - t0
    ok = riesz.passed and tietze.passed and not stub.passed and dt < 2.0
    assert emit(11, "extender validator", ok,
                f"riesz {riesz.passed}, tietze {tietze.passed}, half-stub {stub.passed}, "
                f"{dt:.3f}s")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
