"""Decorrelation of the first-level LH/HL subbands of a mosaic Mallat pyramid.

``camra_a`` is the integer S-transform of the pair. ``camra_s`` is a
two-step lifting shift transform: the HL band is interpolated half a sample
onto the LH grid and subtracted, then the residual is smoothed back into HL.
The interpolation kernels are separable 3x3 convolutions::

    S1 = [0; 1/2; 1/2] * [1/2, 1/2, 0]      (rows i-1, i; cols j, j+1)
    S2 = [1/4; 1/4; 0] * [0, 1/4, 1/4]      (rows i, i+1; cols j-1, j)

with the filtered value floored once. All arithmetic is integer.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

CAMRA_A = "camra_a"
CAMRA_S = "camra_s"
MODES = (CAMRA_A, CAMRA_S)


@dataclass
class DecorrelatedPair:
    first: np.ndarray
    second: np.ndarray
    mode: str


def _pair(lh, hl):
    lh = np.asarray(lh, dtype=np.int64)
    hl = np.asarray(hl, dtype=np.int64)
    if lh.shape != hl.shape or lh.ndim != 2:
        raise GeometryError(f"subband shapes differ: {lh.shape} vs {hl.shape}")
    return lh, hl


def camra_a_forward(lh, hl):
    lh, hl = _pair(lh, hl)
    return lh - hl, (lh + hl) >> 1


def camra_a_inverse(r, s):
    r, s = _pair(r, s)
    hl = s - (r >> 1)
    return r + hl, hl


def _sym(n, idx):
    """Whole-sample symmetric index map for offsets of at most one sample."""
    if n == 1:
        return np.zeros_like(idx)
    idx = np.where(idx < 0, -idx, idx)
    return np.where(idx >= n, 2 * n - 2 - idx, idx)


def _box_sum(x, row_offsets, col_offsets):
    h, w = x.shape
    rows = np.arange(h)
    cols = np.arange(w)
    total = np.zeros_like(x)
    for dr in row_offsets:
        ri = _sym(h, rows + dr)
        for dc in col_offsets:
            total += x[ri][:, _sym(w, cols + dc)]
    return total


def shift_predict(hl):
    """floor(S1(hl)): HL interpolated to the LH sample positions."""
    return _box_sum(hl, (-1, 0), (0, 1)) >> 2


def shift_update(u):
    """floor(S2(u)): the LH-grid residual carried back to HL positions."""
    return _box_sum(u, (0, 1), (-1, 0)) >> 4


def camra_s_forward(lh, hl):
    lh, hl = _pair(lh, hl)
    u = lh - shift_predict(hl)
    v = hl + shift_update(u)
    return u, v


def camra_s_inverse(u, v):
    u, v = _pair(u, v)
    hl = v - shift_update(u)
    lh = u + shift_predict(hl)
    return lh, hl


_FORWARD = {CAMRA_A: camra_a_forward, CAMRA_S: camra_s_forward}
_INVERSE = {CAMRA_A: camra_a_inverse, CAMRA_S: camra_s_inverse}


def decorrelate(lh, hl, mode):
    """Forward transform of one LH/HL pair, tagged with its mode."""
    if mode not in MODES:
        raise ValueError(f"unknown decorrelation mode {mode!r}")
    first, second = _FORWARD[mode](lh, hl)
    return DecorrelatedPair(first, second, mode)


def restore(pair):
    """(lh, hl) from a :class:`DecorrelatedPair`."""
    return _INVERSE[pair.mode](pair.first, pair.second)


def _check(pyr, mode):
    if mode not in MODES:
        raise ValueError(f"unknown decorrelation mode {mode!r}")
    if not pyr.details:
        raise GeometryError("pyramid has no level-1 LH/HL pair")


def apply_pipeline(pyr, mode):
    """Replace level-1 (LH, HL) with the decorrelated pair; other bands pass through."""
    _check(pyr, mode)
    out = pyr.copy()
    lvl = out.details[0]
    lvl["LH"], lvl["HL"] = _FORWARD[mode](lvl["LH"], lvl["HL"])
    return out


def undo_pipeline(pyr, mode):
    _check(pyr, mode)
    out = pyr.copy()
    lvl = out.details[0]
    lvl["LH"], lvl["HL"] = _INVERSE[mode](lvl["LH"], lvl["HL"])
    return out
