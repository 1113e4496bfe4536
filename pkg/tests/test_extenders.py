from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from extendkit import Dieudonne, Extender, Reciprocal, Riesz, Tietze, get_dual_weight, get_extender
from extendkit.extenders import TINY, DomainError, invert_threshold, validate_extender


def test_tietze_one_one():
    assert Tietze()(1.0, 1.0) == pytest.approx(0.5, rel=1e-15)


def test_riesz_diagonal():
    assert Riesz()(7.0, 7.0) == 1.0


def test_dieudonne():
    assert Dieudonne()(3.0, 1.5) == 2.0


def test_domain_errors():
    with pytest.raises(DomainError):
        Riesz()(1.0, 2.0)
    with pytest.raises(DomainError):
        Tietze()(1.0, 0.0)


def test_tietze_underflow_is_clamped_positive():
    vals, clamped = Tietze().evaluate(1e3, 1e-3)
    assert clamped.all()
    assert vals == TINY


@given(st.floats(1e-6, 1e3), st.floats(1.0, 1e3))
def test_tietze_matches_power_form(t, ratio):
    s = t * ratio
    want = (1 + s * s) ** (-1 / t)
    if want > 1e-300:
        assert Tietze()(s, t) == pytest.approx(want, rel=1e-9)


def test_reciprocal_dual():
    G = Reciprocal(Tietze())
    assert G.name == "reciprocal-of-tietze"
    assert G(1.0, 1.0) == pytest.approx(2.0, rel=1e-15)
    assert isinstance(get_dual_weight("reciprocal-of-riesz"), Reciprocal)


def test_lookup_errors():
    with pytest.raises(ValueError):
        get_extender("dieudonne")
    with pytest.raises(ValueError):
        get_dual_weight("riesz")


@pytest.mark.parametrize("name", ["riesz", "tietze"])
def test_validator_passes_known_extenders(name):
    rep = validate_extender(get_extender(name), 0.01, 64)
    assert rep.passed, rep.to_dict()


def test_validator_rejects_constant_half_on_limits_only():
    stub = Extender(lambda s, t: np.full(np.broadcast(s, t).shape, 0.5), name="half")
    rep = validate_extender(stub, 0.01, 64)
    assert not rep.passed
    assert not rep.limit.passed
    assert rep.monotone.passed and rep.continuity.passed


def test_validator_catches_increasing_weight():
    bad = Extender(lambda s, t: (t / s) ** (1 / (1 + s)), name="wobble")
    rep = validate_extender(bad, 0.01, 64)
    assert not rep.monotone.passed


def test_validator_argument_checks():
    with pytest.raises(ValueError):
        validate_extender(Riesz(), 0.0)
    with pytest.raises(ValueError):
        validate_extender(Riesz(), 0.1, grid_n=4)


def test_invert_threshold_bisection():
    r = invert_threshold(lambda t: t * t, 0.25, 10.0, increasing=True)
    assert math.isclose(r, 0.5, rel_tol=1e-12)
    d = invert_threshold(lambda t: 1 - t, 0.9, 1.0, increasing=False)
    assert math.isclose(d, 0.1, rel_tol=1e-9)
