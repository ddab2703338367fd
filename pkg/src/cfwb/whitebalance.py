"""Lossless white balance built from three scalar-lifting blocks per Bayer quad.

Two wirings are provided. The *pyramid* structure lifts (r, g1) by s,
(b, g2) by t, then (r, b) by q, giving channel gains::

    r: s*q    g1: 1/s    g2: 1/t    b: t/q

The *sequential* structure chains (g1, r) by s, (r, g2) by t, (g2, b) by q::

    r: t/s    g1: s      g2: q/t    b: 1/q

In both cases the gains are solved in the log domain so that channel c is
scaled by ``l_bar / l_c`` where ``l_bar`` is the geometric mean of the
illuminant. The gains multiply to one, which keeps the dynamic range.
"""

import logging
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .cfa import QuadPlanes, demux, remux
from .errors import UnsupportedImbalanceError
from .lifting import GAIN_MAX, GAIN_MIN, forward_lift_array, inverse_lift_array

log = logging.getLogger(__name__)

PYRAMID = "pyramid"
SEQUENTIAL = "sequential"
STRUCTURES = (PYRAMID, SEQUENTIAL)

# ln(l_bar / l_c) = BALANCE @ ln(l), rows and columns ordered r, g1, g2, b
BALANCE = np.full((4, 4), 0.25) - np.eye(4)

# ln(gain_c) = EXPONENTS[structure] @ (ln s, ln t, ln q, ln k)
EXPONENTS = {
    PYRAMID: np.array(
        [[1, 0, 1, 1],
         [-1, 0, 0, 1],
         [0, -1, 0, 1],
         [0, 1, -1, 1]], dtype=np.float64),
    SEQUENTIAL: np.array(
        [[-1, 1, 0, 1],
         [1, 0, 0, 1],
         [0, -1, 1, 1],
         [0, 0, -1, 1]], dtype=np.float64),
}


@dataclass(frozen=True)
class IlluminantColor:
    l_r: float
    l_g1: float
    l_g2: float
    l_b: float
    degenerate: tuple = field(default=(), compare=False)

    def __post_init__(self):
        for v in self.as_tuple():
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"illuminant components must be positive and finite: {self.as_tuple()}")

    def as_tuple(self):
        return (self.l_r, self.l_g1, self.l_g2, self.l_b)

    @property
    def l_bar(self):
        return math.exp(sum(math.log(v) for v in self.as_tuple()) / 4.0)

    def target_gains(self):
        """The ideal per-channel white balance ``l_bar / l_c``."""
        lb = self.l_bar
        return tuple(lb / v for v in self.as_tuple())


@dataclass(frozen=True)
class LiftingCoeffs:
    s: float
    t: float
    q: float
    structure: str = PYRAMID

    def __post_init__(self):
        if self.structure not in STRUCTURES:
            raise ValueError(f"unknown white balance structure {self.structure!r}")
        for name in ("s", "t", "q"):
            v = getattr(self, name)
            if not (math.isfinite(v) and GAIN_MIN <= v <= GAIN_MAX):
                raise UnsupportedImbalanceError(
                    f"lifting coefficient {name}={v!r} outside [1/64, 64]")

    @property
    def k(self):
        return 1.0

    def diagonal(self):
        """Channel gains (r, g1, g2, b) realised by this structure in exact arithmetic."""
        logs = EXPONENTS[self.structure] @ np.log([self.s, self.t, self.q, self.k])
        return tuple(float(v) for v in np.exp(logs))

    def is_identity(self):
        return self.s == 1.0 and self.t == 1.0 and self.q == 1.0

    def to_bits(self):
        """The three coefficients as raw little-endian binary64 bytes."""
        return struct.pack("<3d", self.s, self.t, self.q)

    @classmethod
    def from_bits(cls, raw, structure=PYRAMID):
        s, t, q = struct.unpack("<3d", raw)
        return cls(s, t, q, structure)

    def hex(self):
        return tuple(struct.pack(">d", v).hex() for v in (self.s, self.t, self.q))


IDENTITY = LiftingCoeffs(1.0, 1.0, 1.0)


def estimate_gray_world(img):
    """Gray-world illuminant: the mean of each of the four Bayer channels.

    A channel whose mean is zero is clamped to the smallest positive double
    and reported in ``degenerate``.
    """
    planes = demux(img).planes()
    means = []
    degenerate = []
    for name, p in zip(("r", "g1", "g2", "b"), planes):
        m = float(np.mean(p, dtype=np.float64))
        if m < 0:
            raise ValueError("gray-world estimate needs nonnegative samples")
        if m == 0.0:
            m = math.nextafter(0.0, 1.0)
            degenerate.append(name)
        means.append(m)
    if degenerate:
        log.warning("degenerate illuminant: zero mean in channel(s) %s", ", ".join(degenerate))
    return IlluminantColor(*means, degenerate=tuple(degenerate))


def solve_lifting_coeffs(ill, structure=PYRAMID):
    """Solve (s, t, q) so the structure realises ``l_bar / l_c`` on every channel."""
    if structure not in STRUCTURES:
        raise ValueError(f"unknown white balance structure {structure!r}")
    if len(set(ill.as_tuple())) == 1:
        # already balanced: exact identity rather than exp(+-ulp)
        return LiftingCoeffs(1.0, 1.0, 1.0, structure)
    ln_l = np.log(np.array(ill.as_tuple(), dtype=np.float64))
    target = BALANCE @ ln_l
    ln_s, ln_t, ln_q, ln_k = np.linalg.solve(EXPONENTS[structure], target)
    # target sums to zero, so ln k vanishes up to rounding
    if abs(ln_k) > 1e-9 * (1.0 + np.abs(ln_l).max()):
        raise ArithmeticError(f"log-domain solve produced k != 1 (ln k = {ln_k})")
    return LiftingCoeffs(math.exp(ln_s), math.exp(ln_t), math.exp(ln_q), structure)


def closed_form_coeffs(ill):
    """Direct closed-form pyramid coefficients; used as a cross-check of the solver."""
    r, g1, g2, b = ill.as_tuple()
    s = (g1 ** 3 / (r * g2 * b)) ** 0.25
    t = (g2 ** 3 / (r * g1 * b)) ** 0.25
    q = (b * g2 / (r * g1)) ** 0.5
    return LiftingCoeffs(s, t, q, PYRAMID)


def _planes64(img):
    return [p.astype(np.int64) for p in demux(img).planes()]


def _rebuild(img, r, g1, g2, b):
    return remux(QuadPlanes(r, g1, g2, b, bit_depth=img.bit_depth, phase=img.phase))


def wb_forward_pyramid(img, c):
    r, g1, g2, b = _planes64(img)
    if c.is_identity():
        return img
    r, g1 = forward_lift_array(r, g1, c.s)
    b, g2 = forward_lift_array(b, g2, c.t)
    r, b = forward_lift_array(r, b, c.q)
    return _rebuild(img, r, g1, g2, b)


def wb_inverse_pyramid(img, c):
    r, g1, g2, b = _planes64(img)
    if c.is_identity():
        return img
    r, b = inverse_lift_array(r, b, c.q)
    b, g2 = inverse_lift_array(b, g2, c.t)
    r, g1 = inverse_lift_array(r, g1, c.s)
    return _rebuild(img, r, g1, g2, b)


def wb_forward_sequential(img, c):
    r, g1, g2, b = _planes64(img)
    if c.is_identity():
        return img
    g1, r = forward_lift_array(g1, r, c.s)
    r, g2 = forward_lift_array(r, g2, c.t)
    g2, b = forward_lift_array(g2, b, c.q)
    return _rebuild(img, r, g1, g2, b)


def wb_inverse_sequential(img, c):
    r, g1, g2, b = _planes64(img)
    if c.is_identity():
        return img
    g2, b = inverse_lift_array(g2, b, c.q)
    r, g2 = inverse_lift_array(r, g2, c.t)
    g1, r = inverse_lift_array(g1, r, c.s)
    return _rebuild(img, r, g1, g2, b)


def wb_forward(img, c):
    if c.structure == SEQUENTIAL:
        return wb_forward_sequential(img, c)
    return wb_forward_pyramid(img, c)


def wb_inverse(img, c):
    if c.structure == SEQUENTIAL:
        return wb_inverse_sequential(img, c)
    return wb_inverse_pyramid(img, c)
