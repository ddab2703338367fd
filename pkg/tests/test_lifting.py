import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from cfwb.errors import GainRangeError, HeadroomError
from cfwb.lifting import (
    HEADROOM, forward_lift_array, forward_scalar_lift, inverse_lift_array, inverse_scalar_lift)

GAINS = [0.3, 2 ** -0.5, 1.5, 2.0]


def test_identity_gain():
    assert forward_scalar_lift(10, 7, 1.0) == (10, 7)
    assert inverse_scalar_lift(10, 7, 1.0) == (10, 7)


def test_hand_trace_q2():
    # a = 7 - 20 = -13; b = 10 + floor(-6.5) = 3; a = -13 - 6 = -19
    assert forward_scalar_lift(10, 7, 2.0) == (19, 3)
    assert inverse_scalar_lift(19, 3, 2.0) == (10, 7)


def test_zero_fixed_point():
    assert forward_scalar_lift(0, 0, 2.0) == (0, 0)


def _trace_exact(x1, x2, q):
    """Rational-arithmetic trace of the three rounded steps (q given as a Fraction)."""
    fl = math.floor
    a = x2 - fl(q * x1)
    b = x1 + fl(Fraction(a) / q)
    a = a - fl(q * b)
    return -a, b


@pytest.mark.parametrize("q", [Fraction(3, 2), Fraction(2), Fraction(5, 4), Fraction(1, 8)])
def test_forward_matches_rational_trace(q):
    "Dyadic gains are exact in binary64, so a rational trace is an independent oracle"
    for x1 in range(-30, 31, 3):
        for x2 in range(-30, 31, 7):
            assert forward_scalar_lift(x1, x2, float(q)) == _trace_exact(x1, x2, q)


@pytest.mark.parametrize("q", GAINS)
def test_exhaustive_roundtrip(q):
    v = np.arange(-100, 101)
    x1, x2 = (a.ravel() for a in np.meshgrid(v, v, indexing="ij"))
    y1, y2 = forward_lift_array(x1, x2, q)
    r1, r2 = inverse_lift_array(y1, y2, q)
    assert np.array_equal(r1, x1) and np.array_equal(r2, x2)


@pytest.mark.parametrize("q", GAINS + [1 / 64, 64.0, 0.9999])
def test_scaling_error_bounds(q):
    v = np.arange(-100, 101)
    x1, x2 = (a.ravel() for a in np.meshgrid(v, v, indexing="ij"))
    y1, y2 = forward_lift_array(x1, x2, q)
    assert np.all(np.abs(y1 - q * x1) <= 2 + q)
    assert np.all(np.abs(y2 - x2 / q) <= 2 + 1 / q)


def test_array_matches_scalar():
    rng = np.random.default_rng(0)
    x1 = rng.integers(-5000, 5000, 500)
    x2 = rng.integers(-5000, 5000, 500)
    for q in (0.37, 2 ** 0.25, 7.1):
        y1, y2 = forward_lift_array(x1, x2, q)
        for i in range(0, 500, 7):
            assert (y1[i], y2[i]) == forward_scalar_lift(x1[i], x2[i], q)
            assert inverse_scalar_lift(y1[i], y2[i], q) == (x1[i], x2[i])


@settings(max_examples=300, deadline=None)
@given(st.integers(-HEADROOM, HEADROOM), st.integers(-HEADROOM, HEADROOM),
       st.floats(1 / 64, 64, allow_nan=False))
def test_roundtrip_wide(x1, x2, q):
    assert inverse_scalar_lift(*forward_scalar_lift(x1, x2, q), q) == (x1, x2)


def test_fuzz_million_pairs():
    rng = np.random.default_rng(1)
    x1 = rng.integers(-HEADROOM, HEADROOM + 1, 10 ** 6)
    x2 = rng.integers(-HEADROOM, HEADROOM + 1, 10 ** 6)
    q = float(rng.uniform(1 / 64, 64))
    r1, r2 = inverse_lift_array(*forward_lift_array(x1, x2, q), q)
    assert np.array_equal(r1, x1) and np.array_equal(r2, x2)


@pytest.mark.parametrize("q", [0.0, -1.0, 1 / 65, 65.0, math.inf, math.nan])
def test_gain_range(q):
    with pytest.raises(GainRangeError):
        forward_scalar_lift(1, 1, q)
    with pytest.raises(GainRangeError):
        inverse_lift_array(np.ones(2), np.ones(2), q)


def test_headroom():
    with pytest.raises(HeadroomError):
        forward_scalar_lift(HEADROOM + 1, 0, 1.5)
    with pytest.raises(HeadroomError):
        forward_lift_array(np.array([0, -HEADROOM - 1]), np.zeros(2, np.int64), 1.5)
