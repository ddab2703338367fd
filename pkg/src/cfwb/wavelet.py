"""Reversible integer LeGall 5/3 wavelet, 1-D and separable 2-D (Mallat recursion).

Subband names use the row-index filter first: ``LH`` is lowpass down the
columns and highpass along the rows, ``HL`` the opposite. Boundaries use
whole-sample symmetric extension. With n samples the approximation band gets
ceil(n/2) coefficients and the detail band floor(n/2).
"""

from dataclasses import dataclass, field

import numpy as np

from .cfa import CfaImage
from .errors import GeometryError

DEFAULT_LEVELS = 5


def _forward_last(x):
    n = x.shape[-1]
    if n < 2:
        raise GeometryError("5/3 lifting needs at least two samples")
    even = x[..., 0::2]
    odd = x[..., 1::2]
    m = odd.shape[-1]
    right = even[..., 1 : m + 1]
    if right.shape[-1] < m:
        right = np.concatenate([right, even[..., -1:]], axis=-1)
    d = odd - ((even[..., :m] + right) >> 1)
    d_prev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
    d_next = d
    if even.shape[-1] > m:
        d_prev = np.concatenate([d_prev, d[..., -1:]], axis=-1)
        d_next = np.concatenate([d, d[..., -1:]], axis=-1)
    a = even + ((d_prev + d_next + 2) >> 2)
    return a, d


def _inverse_last(a, d):
    na, nd = a.shape[-1], d.shape[-1]
    if nd < 1 or na not in (nd, nd + 1):
        raise GeometryError(f"inconsistent 5/3 band lengths {na} and {nd}")
    d_prev = np.concatenate([d[..., :1], d[..., :-1]], axis=-1)
    d_next = d
    if na > nd:
        d_prev = np.concatenate([d_prev, d[..., -1:]], axis=-1)
        d_next = np.concatenate([d, d[..., -1:]], axis=-1)
    even = a - ((d_prev + d_next + 2) >> 2)
    right = even[..., 1 : nd + 1]
    if right.shape[-1] < nd:
        right = np.concatenate([right, even[..., -1:]], axis=-1)
    odd = d + ((even[..., :nd] + right) >> 1)
    out = np.empty(a.shape[:-1] + (na + nd,), dtype=np.int64)
    out[..., 0::2] = even
    out[..., 1::2] = odd
    return out


def legall53_forward_1d(signal):
    x = np.asarray(signal, dtype=np.int64)
    if x.ndim != 1:
        raise GeometryError("expected a 1-D signal")
    return _forward_last(x)


def legall53_inverse_1d(approx, detail):
    return _inverse_last(np.asarray(approx, dtype=np.int64), np.asarray(detail, dtype=np.int64))


def forward_axis(x, axis):
    a, d = _forward_last(np.moveaxis(np.asarray(x, dtype=np.int64), axis, -1))
    return np.moveaxis(a, -1, axis), np.moveaxis(d, -1, axis)


def inverse_axis(a, d, axis):
    a = np.moveaxis(np.asarray(a, dtype=np.int64), axis, -1)
    d = np.moveaxis(np.asarray(d, dtype=np.int64), axis, -1)
    return np.moveaxis(_inverse_last(a, d), -1, axis)


@dataclass
class SubbandPyramid:
    """Mallat decomposition: ``details[0]`` is the finest level."""

    ll: np.ndarray
    details: list = field(default_factory=list)  # [{"LH":..., "HL":..., "HH":...}, ...]
    shape: tuple = (0, 0)

    @property
    def levels(self):
        return len(self.details)

    def coefficient_count(self):
        return self.ll.size + sum(b.size for lvl in self.details for b in lvl.values())

    def copy(self):
        return SubbandPyramid(
            self.ll.copy(), [{k: v.copy() for k, v in lvl.items()} for lvl in self.details], self.shape)


def max_levels(shape):
    """Largest level count whose every stage sees at least two samples per axis."""
    n = min(shape)
    levels = 0
    while n >= 2:
        levels += 1
        n = (n + 1) // 2
    return levels


def clamp_levels(shape, levels):
    return max(1, min(int(levels), max_levels(shape)))


def dwt2d_forward(plane, levels=DEFAULT_LEVELS):
    x = np.asarray(plane, dtype=np.int64)
    if x.ndim != 2:
        raise GeometryError("expected a 2-D plane")
    if levels < 1 or levels > max_levels(x.shape):
        raise GeometryError(f"{levels} levels too many for a {x.shape[1]}x{x.shape[0]} plane")
    details = []
    ll = x
    for _ in range(levels):
        lo, hi = forward_axis(ll, 1)
        ll_next, hl = forward_axis(lo, 0)
        lh, hh = forward_axis(hi, 0)
        details.append({"LH": lh, "HL": hl, "HH": hh})
        ll = ll_next
    return SubbandPyramid(ll, details, x.shape)


def dwt2d_inverse(pyr):
    ll = pyr.ll
    for lvl in reversed(pyr.details):
        lo = inverse_axis(ll, lvl["HL"], 0)
        hi = inverse_axis(lvl["LH"], lvl["HH"], 0)
        ll = inverse_axis(lo, hi, 1)
    return ll


def mallat_cfa_forward(img, levels=DEFAULT_LEVELS):
    """Mallat decomposition of the whole mosaic, without channel separation."""
    return dwt2d_forward(img.samples, levels)


def mallat_cfa_inverse(pyr, bit_depth, phase):
    return CfaImage(dwt2d_inverse(pyr), bit_depth=bit_depth, phase=phase)
