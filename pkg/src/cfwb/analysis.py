"""Measurement harness: entropy, opponent-colour decomposition, spectra, benchmarks."""

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cfa import QUAD_OFFSETS, Phase, SceneParams, cfa_sample, cfa_select, synth_scene
from .codec import PIPELINES, encode_container, normalize_pipeline
from .decorrelate import camra_a_forward, camra_s_forward
from .errors import GeometryError, UnsupportedImbalanceError
from .wavelet import DEFAULT_LEVELS, mallat_cfa_forward
from .whitebalance import PYRAMID, estimate_gray_world, solve_lifting_coeffs, wb_forward

log = logging.getLogger(__name__)

# opponent-colour transform: (mu, gamma, beta) = OPPONENT @ (r, g, b)
OPPONENT = np.array([[0.25, 0.5, 0.25], [0.25, 0.0, -0.25], [0.25, -0.5, 0.25]])
OPPONENT_INV = np.array([[1.0, 2.0, 1.0], [1.0, 0.0, -1.0], [1.0, -2.0, 1.0]])

CARRIER_RADIUS_DIVISOR = 16


def shannon_entropy(plane):
    """Empirical entropy in bits/sample of the integer histogram of ``plane``."""
    x = np.asarray(plane).ravel()
    if x.size == 0:
        raise ValueError("entropy of an empty plane")
    _, counts = np.unique(x, return_counts=True)
    p = counts / x.size
    return float(-(p * np.log2(p)).sum()) + 0.0  # no negative zero


def lum_chrom_decompose(c):
    mu = 0.25 * c.r + 0.5 * c.g + 0.25 * c.b
    gamma = 0.25 * c.r - 0.25 * c.b
    beta = 0.25 * c.r - 0.5 * c.g + 0.25 * c.b
    return mu, gamma, beta


def lum_chrom_compose(mu, gamma, beta):
    """Inverse opponent transform, back to (r, g, b)."""
    return mu + 2 * gamma + beta, mu - beta, mu - 2 * gamma + beta


def modulated_mosaic(c, phase=Phase.RGGB):
    """Luminance plus chrominance on the CFA carriers, evaluated per pixel."""
    mu, gamma, beta = lum_chrom_decompose(c)
    h, w = c.shape
    ry, rx = QUAD_OFFSETS[Phase.parse(phase)][0]
    si = np.where((np.arange(h) - ry) % 2, -1.0, 1.0)[:, None]
    sj = np.where((np.arange(w) - rx) % 2, -1.0, 1.0)[None, :]
    return mu + (si + sj) * gamma + (si * sj) * beta


def verify_modulation_identity(c, phase=Phase.RGGB):
    """Max deviation between lattice selection and the carrier-modulation form."""
    return float(np.abs(cfa_select(c, phase) - modulated_mosaic(c, phase)).max())


@dataclass
class SpectrumReport:
    plane_id: str
    total_energy: float
    carrier_pi_0: float
    carrier_0_pi: float
    carrier_pi_pi: float
    highpass_fraction: float

    def rows(self):
        return [
            ("plane", self.plane_id),
            ("total_energy", f"{self.total_energy:.6g}"),
            ("carrier_pi_0", f"{self.carrier_pi_0:.6f}"),
            ("carrier_0_pi", f"{self.carrier_0_pi:.6f}"),
            ("carrier_pi_pi", f"{self.carrier_pi_pi:.6f}"),
            ("highpass_fraction", f"{self.highpass_fraction:.6f}"),
        ]


def _is_pow2(n):
    return n >= 1 and not n & (n - 1)


def power_spectrum(plane):
    x = np.asarray(plane, dtype=np.float64)
    if x.ndim != 2 or not all(_is_pow2(n) for n in x.shape):
        raise GeometryError(f"spectral analysis needs power-of-two dimensions, got {x.shape}")
    return np.abs(np.fft.fft2(x)) ** 2


def _circ_dist(n, centre):
    k = np.arange(n)
    d = np.abs(k - centre)
    return np.minimum(d, n - d)


def spectrum_report(plane, cutoff=0.1, plane_id="plane", radius_divisor=CARRIER_RADIUS_DIVISOR):
    """DC-excluded energy fractions near each CFA carrier and above ``cutoff``.

    Carrier windows are squares of half-width ``dim / radius_divisor`` bins
    around (pi, 0), (0, pi) and (pi, pi); the highpass fraction counts bins
    whose radial frequency (cycles/sample) exceeds ``cutoff``.
    """
    p = power_spectrum(plane)
    h, w = p.shape
    p[0, 0] = 0.0
    total = float(p.sum())
    ry, rx = max(h // radius_divisor, 0), max(w // radius_divisor, 0)

    def window(cy, cx):
        return (_circ_dist(h, cy)[:, None] <= ry) & (_circ_dist(w, cx)[None, :] <= rx)

    radius = np.hypot(np.fft.fftfreq(h)[:, None], np.fft.fftfreq(w)[None, :])
    if total <= 0.0:
        return SpectrumReport(plane_id, 0.0, 0.0, 0.0, 0.0, 0.0)
    frac = lambda mask: float(p[mask].sum() / total)  # noqa: E731
    return SpectrumReport(
        plane_id,
        total,
        frac(window(h // 2, 0)),
        frac(window(0, w // 2)),
        frac(window(h // 2, w // 2)),
        frac(radius > cutoff),
    )


def highpass_fraction(plane, cutoff):
    return spectrum_report(plane, cutoff).highpass_fraction


def white_balanced_color(c):
    """Scale each colour plane by ``l_bar / l_c`` with a gray-world illuminant ``l``."""
    means = [float(np.mean(p)) for p in (c.r, c.g, c.b)]
    if min(means) <= 0:
        raise ValueError("gray-world white balance needs positive channel means")
    l_bar = float(np.exp(np.mean(np.log(means))))
    return c.scaled(tuple(l_bar / m for m in means))


def bandwidth_report(c, cutoff=0.1):
    """Highpass energy fractions of the chrominances before and after white balance."""
    _, yg, yb = lum_chrom_decompose(c)
    _, zg, zb = lum_chrom_decompose(white_balanced_color(c))
    return {
        "gamma_raw": highpass_fraction(yg, cutoff),
        "gamma_wb": highpass_fraction(zg, cutoff),
        "beta_raw": highpass_fraction(yb, cutoff),
        "beta_wb": highpass_fraction(zb, cutoff),
    }


def gray_world_coeffs(img, structure=PYRAMID):
    """Gray-world lifting coefficients, or None when the imbalance is unsupported."""
    try:
        return solve_lifting_coeffs(estimate_gray_world(img), structure)
    except UnsupportedImbalanceError as exc:
        log.warning("white balance skipped: %s", exc)
        return None


def sparsification(img, levels=DEFAULT_LEVELS, white_balance=True):
    """Mean |residual| of the level-1 LH/HL pair under CAMRA-A and CAMRA-S."""
    if white_balance:
        wb = gray_world_coeffs(img)
        if wb is not None:
            img = wb_forward(img, wb)
    lvl = mallat_cfa_forward(img, min(levels, 1) or 1).details[0]
    r, _ = camra_a_forward(lvl["LH"], lvl["HL"])
    u, _ = camra_s_forward(lvl["LH"], lvl["HL"])
    return float(np.abs(r).mean()), float(np.abs(u).mean())


@dataclass
class BenchRow:
    pipeline: str
    bpp_raw: float
    bpp_wb: float

    @property
    def gain_percent(self):
        return (self.bpp_raw - self.bpp_wb) / self.bpp_raw * 100.0


def _threads():
    cap = os.environ.get("CFWB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = max(1, min(n, int(cap)))
    return n


def _encode_cell(args):
    img, pipeline, levels, wb = args
    return len(encode_container(img, pipeline, levels, wb)) * 8 / (img.width * img.height)


def run_bench(images, pipelines=PIPELINES, levels=DEFAULT_LEVELS, structure=PYRAMID):
    """Mean bits per pixel (header included) per pipeline, without and with white balance."""
    images = list(images)
    if not images:
        raise ValueError("benchmark needs at least one image")
    pipelines = [normalize_pipeline(p) for p in pipelines]
    coeffs = [gray_world_coeffs(img, structure) for img in images]
    cells = [(img, p, levels, wb) for p in pipelines for img, c in zip(images, coeffs)
             for wb in (None, c)]
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        bpp = list(pool.map(_encode_cell, cells))
    rows = []
    n = len(images)
    for i, p in enumerate(pipelines):
        block = bpp[2 * n * i : 2 * n * (i + 1)]
        rows.append(BenchRow(p, float(np.mean(block[0::2])), float(np.mean(block[1::2]))))
    return rows


def write_csv(rows, fh):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["pipeline", "bpp_raw", "bpp_wb", "gain_percent"])
    for r in rows:
        w.writerow([r.pipeline, f"{r.bpp_raw:.6f}", f"{r.bpp_wb:.6f}", f"{r.gain_percent:.4f}"])


def synthetic_suite(tint=(2.0, 1.0, 1.0), seeds=range(10), size=128, bit_depth=10,
                    phase=Phase.RGGB, **scene):
    """Mosaics of seeded synthetic scenes, one per seed."""
    return [
        cfa_sample(synth_scene(SceneParams(tint=tuple(tint), rng_seed=s, **scene), size, size),
                   phase, bit_depth)
        for s in seeds
    ]
