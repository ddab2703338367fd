"""Small exhaustive oracles run by ``cfwb selftest``."""

import itertools

import numpy as np

from .cfa import CfaImage, Phase
from .codec import PIPELINES, decode_container, encode_container, rice_decode, rice_encode, unzigzag, zigzag
from .decorrelate import camra_a_forward, camra_a_inverse, camra_s_forward, camra_s_inverse
from .lifting import forward_lift_array, forward_scalar_lift, inverse_lift_array
from .wavelet import legall53_forward_1d, legall53_inverse_1d
from .whitebalance import STRUCTURES, LiftingCoeffs

GAINS = (2 ** -0.5, 2 ** -0.25, 0.37, 1.0, 1.5, 2 ** 0.5, 3.7, 11.0)


def _grid(lo, hi):
    v = np.arange(lo, hi + 1, dtype=np.int64)
    x1, x2 = np.meshgrid(v, v, indexing="ij")
    return x1.ravel(), x2.ravel()


def check_scalar_lifting():
    x1, x2 = _grid(-40, 40)
    bad = 0
    for q in GAINS:
        y1, y2 = forward_lift_array(x1, x2, q)
        r1, r2 = inverse_lift_array(y1, y2, q)
        bad += int(np.count_nonzero((r1 != x1) | (r2 != x2)))
        # spot-check the array kernel against the scalar reference
        for i in range(0, x1.size, 97):
            bad += forward_scalar_lift(x1[i], x2[i], q) != (y1[i], y2[i])
    return bad == 0, f"{len(GAINS) * x1.size} pairs, {bad} failures"


def check_wavelet():
    bad = 0
    n = 0
    for length in (2, 3, 6):
        for sig in itertools.product(range(4), repeat=length):
            a, d = legall53_forward_1d(sig)
            bad += not np.array_equal(legall53_inverse_1d(a, d), sig)
            n += 1
    return bad == 0, f"{n} signals, {bad} failures"


def check_camra():
    lh, hl = _grid(-32, 31)
    r, s = camra_a_forward(lh[None, :], hl[None, :])
    a_ok = all(np.array_equal(x, y) for x, y in zip(camra_a_inverse(r, s), (lh[None, :], hl[None, :])))
    rng = np.random.default_rng(0)
    s_ok = True
    for shape in ((1, 1), (3, 5), (8, 8)):
        lh2 = rng.integers(-500, 500, shape)
        hl2 = rng.integers(-500, 500, shape)
        back = camra_s_inverse(*camra_s_forward(lh2, hl2))
        s_ok &= np.array_equal(back[0], lh2) and np.array_equal(back[1], hl2)
    return bool(a_ok and s_ok), f"camra_a {lh.size} pairs, camra_s 3 shapes"


def check_rice():
    v = np.arange(-2000, 2001)
    ok = np.array_equal(unzigzag(zigzag(v)), v)
    u = zigzag(v)
    for k in (0, 3, 8):
        ok &= np.array_equal(rice_decode(rice_encode(u, k), u.size, k), u)
    return bool(ok), "zigzag and rice k=0,3,8"


def check_container():
    rng = np.random.default_rng(1)
    bad = 0
    n = 0
    for phase in Phase:
        img = CfaImage(rng.integers(0, 1024, (12, 16)), bit_depth=10, phase=phase)
        for pipeline in PIPELINES:
            for wb in (None,) + tuple(LiftingCoeffs(0.8, 1.3, 0.6, st) for st in STRUCTURES):
                bad += decode_container(encode_container(img, pipeline, 3, wb)) != img
                n += 1
    return bad == 0, f"{n} round trips, {bad} failures"


CHECKS = (
    ("scalar_lifting", check_scalar_lifting),
    ("legall53", check_wavelet),
    ("camra", check_camra),
    ("rice", check_rice),
    ("container", check_container),
)


def run_all():
    for name, fn in CHECKS:
        passed, detail = fn()
        yield name, bool(passed), detail
