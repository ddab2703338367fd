"""Integer scalar multiplication by a (q, 1/q) pair via three rounded lifting steps.

Forward, for a sample pair (x1, x2)::

    a = x2 - floor(q * x1)
    b = x1 + floor(a / q)
    a = a - floor(q * b)
    return (-a, b)              # ~ (q * x1, x2 / q)

The inverse replays the same three rounded quantities in reverse order, so it
is exact for every integer pair no matter how q rounds. Products and
quotients are IEEE-754 binary64, floored toward negative infinity.
"""

import math

import numpy as np

from . import kernels
from .errors import GainRangeError, HeadroomError

GAIN_MIN = 1.0 / 64.0
GAIN_MAX = 64.0
HEADROOM = 1 << 24


def check_gain(q):
    q = float(q)
    if not (math.isfinite(q) and GAIN_MIN <= q <= GAIN_MAX):
        raise GainRangeError(f"lifting gain {q!r} outside [1/64, 64]")
    return q


def _check_headroom(*arrays):
    for a in arrays:
        a = np.asarray(a)
        if a.size and (a.max() > HEADROOM or a.min() < -HEADROOM):
            raise HeadroomError("sample magnitude exceeds 2**24 lifting headroom")


def forward_scalar_lift(x1, x2, q):
    q = check_gain(q)
    x1, x2 = int(x1), int(x2)
    if abs(x1) > HEADROOM or abs(x2) > HEADROOM:
        raise HeadroomError("sample magnitude exceeds 2**24 lifting headroom")
    a = x2 - math.floor(q * x1)
    b = x1 + math.floor(a / q)
    a = a - math.floor(q * b)
    return -a, b


def inverse_scalar_lift(x1p, x2p, q):
    q = check_gain(q)
    b = int(x2p)
    a = -int(x1p)
    a = a + math.floor(q * b)
    b = b - math.floor(a / q)
    a = a + math.floor(q * b)
    return b, a


def forward_lift_array(x1, x2, q):
    """Elementwise :func:`forward_scalar_lift` over integer arrays (int64 out)."""
    q = check_gain(q)
    _check_headroom(x1, x2)
    return kernels.lift_forward(x1, x2, q)


def inverse_lift_array(x1p, x2p, q):
    q = check_gain(q)
    return kernels.lift_inverse(x1p, x2p, q)
