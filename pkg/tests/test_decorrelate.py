import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from cfwb.analysis import sparsification, synthetic_suite
from cfwb.decorrelate import (
    CAMRA_A, CAMRA_S, apply_pipeline, camra_a_forward, camra_a_inverse, camra_s_forward,
    camra_s_inverse, decorrelate, restore, shift_predict, shift_update, undo_pipeline)
from cfwb.errors import GeometryError
from cfwb.wavelet import SubbandPyramid, dwt2d_forward

H = Fraction(1, 2)
Q = Fraction(1, 4)
# separable kernels, column taps (down the rows) times row taps (along a row)
S1 = np.outer([0, H, H], [H, H, 0])
S2 = np.outer([Q, Q, 0], [0, Q, Q])


def conv_floor(x, kernel):
    """floor of the 2-D convolution with a centred 3x3 kernel, mirrored at the edges."""
    h, w = x.shape

    def mirror(i, n):
        if n == 1:
            return 0
        if i < 0:
            i = -i
        if i >= n:
            i = 2 * n - 2 - i
        return i

    out = np.zeros_like(x)
    for i in range(h):
        for j in range(w):
            acc = Fraction(0)
            for m in range(3):
                for n in range(3):
                    if kernel[m, n]:
                        acc += kernel[m, n] * int(x[mirror(i - (m - 1), h), mirror(j - (n - 1), w)])
            out[i, j] = math.floor(acc)
    return out


def test_camra_a_hand():
    r, s = camra_a_forward(np.array([[5]]), np.array([[3]]))
    assert (r.item(), s.item()) == (2, 4)
    lh, hl = camra_a_inverse(r, s)
    assert (lh.item(), hl.item()) == (5, 3)


def test_camra_a_equal_inputs():
    x = np.arange(-6, 6).reshape(3, 4)
    r, s = camra_a_forward(x, x)
    assert (r == 0).all() and np.array_equal(s, x)


def test_camra_a_exhaustive():
    v = np.arange(-64, 64)
    lh, hl = np.meshgrid(v, v, indexing="ij")
    r, s = camra_a_forward(lh, hl)
    assert np.array_equal(r, lh - hl)
    assert np.array_equal(s, np.floor((lh + hl) / 2).astype(np.int64))
    a, b = camra_a_inverse(r, s)
    assert np.array_equal(a, lh) and np.array_equal(b, hl)


def test_shift_filters_match_convolution():
    rng = np.random.default_rng(0)
    for shape in ((1, 1), (1, 5), (4, 1), (5, 6), (7, 7)):
        x = rng.integers(-300, 300, shape)
        assert np.array_equal(shift_predict(x), conv_floor(x, S1))
        assert np.array_equal(shift_update(x), conv_floor(x, S2))


def test_camra_s_constant():
    c = np.full((6, 5), 37)
    u, v = camra_s_forward(c, c)
    assert (u == 0).all() and (v == 37).all()


def test_camra_s_impulse():
    hl = np.zeros((7, 7), np.int64)
    hl[3, 3] = 4
    u, v = camra_s_forward(np.zeros_like(hl), hl)
    expect_u = -conv_floor(hl, S1)
    assert np.array_equal(u, expect_u)
    # footprint: rows 3..4, cols 2..3, each -1
    assert sorted(zip(*np.nonzero(u))) == [(3, 2), (3, 3), (4, 2), (4, 3)]
    assert np.array_equal(v, hl + conv_floor(u, S2))
    lh, hl2 = camra_s_inverse(u, v)
    assert (lh == 0).all() and np.array_equal(hl2, hl)


def test_camra_s_zero():
    z = np.zeros((3, 3), np.int64)
    for a in camra_s_forward(z, z) + camra_s_inverse(z, z):
        assert (a == 0).all()


def test_camra_s_roundtrip_fuzz():
    rng = np.random.default_rng(1)
    for _ in range(100):
        shape = tuple(rng.integers(1, 24, 2))
        lh = rng.integers(-(2**18), 2**18, shape)
        hl = rng.integers(-(2**18), 2**18, shape)
        u, v = camra_s_forward(lh, hl)
        a, b = camra_s_inverse(u, v)
        assert np.array_equal(a, lh) and np.array_equal(b, hl)
        bound = 2 * max(np.abs(lh).max(), np.abs(hl).max()) + 1
        assert np.abs(u).max() <= bound and np.abs(v).max() <= bound


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.integers(0, 2**32 - 1))
def test_camra_roundtrip_property(h, w, seed):
    rng = np.random.default_rng(seed)
    lh, hl = rng.integers(-5000, 5000, (2, h, w))
    for fwd, inv in ((camra_a_forward, camra_a_inverse), (camra_s_forward, camra_s_inverse)):
        a, b = inv(*fwd(lh, hl))
        assert np.array_equal(a, lh) and np.array_equal(b, hl)


def test_geometry_mismatch():
    with pytest.raises(GeometryError):
        camra_a_forward(np.zeros((2, 2)), np.zeros((2, 3)))
    with pytest.raises(GeometryError):
        camra_s_inverse(np.zeros((2, 2)), np.zeros((3, 2)))


def test_apply_undo_pipeline():
    rng = np.random.default_rng(2)
    pyr = dwt2d_forward(rng.integers(0, 1024, (16, 16)), 2)
    for mode in (CAMRA_A, CAMRA_S):
        out = apply_pipeline(pyr, mode)
        assert np.array_equal(out.ll, pyr.ll)
        assert np.array_equal(out.details[1]["LH"], pyr.details[1]["LH"])
        assert np.array_equal(out.details[0]["HH"], pyr.details[0]["HH"])
        back = undo_pipeline(out, mode)
        for lvl_a, lvl_b in zip(back.details, pyr.details):
            assert all(np.array_equal(lvl_a[k], lvl_b[k]) for k in lvl_a)


def test_apply_camra_a_known():
    lh = np.array([[5, 1], [-2, 0]])
    hl = np.array([[3, 4], [-3, 7]])
    pyr = SubbandPyramid(np.zeros((2, 2), np.int64), [{"LH": lh, "HL": hl, "HH": np.zeros((2, 2))}], (4, 4))
    out = apply_pipeline(pyr, CAMRA_A).details[0]
    assert out["LH"].tolist() == [[2, -3], [1, -7]]
    assert out["HL"].tolist() == [[4, 2], [-3, 3]]


def test_pipeline_errors():
    pyr = dwt2d_forward(np.zeros((4, 4), np.int64), 1)
    with pytest.raises(ValueError):
        apply_pipeline(pyr, "camra_x")
    with pytest.raises(GeometryError):
        apply_pipeline(SubbandPyramid(np.zeros((2, 2)), [], (2, 2)), CAMRA_S)


def test_sparsification_on_tinted_suite():
    "The shift transform leaves smaller residuals than plain differencing"
    for img in synthetic_suite(tint=(2.0, 1.0, 1.0), seeds=range(10)):
        mean_r, mean_u = sparsification(img)
        assert mean_u <= mean_r


def test_pair_helpers():
    lh = np.array([[9, -4], [0, 2]])
    hl = np.array([[1, 1], [-7, 3]])
    for mode in (CAMRA_A, CAMRA_S):
        pair = decorrelate(lh, hl, mode)
        assert pair.mode == mode and pair.first.shape == lh.shape
        a, b = restore(pair)
        assert np.array_equal(a, lh) and np.array_equal(b, hl)
    with pytest.raises(ValueError):
        decorrelate(lh, hl, "mallat")
