"""Bayer mosaic data model, channel split/merge, CFA sampling and PGM I/O."""

import enum
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, GeometryError

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


class Phase(enum.IntEnum):
    """Bayer layout, named by the colours of the top-left 2x2 quad read row-major."""

    RGGB = 0
    GRBG = 1
    GBRG = 2
    BGGR = 3

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, (int, np.integer)):
            return cls(int(value))
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValueError(f"unknown CFA phase {value!r}") from None


# (row, col) offset of r, g1, g2, b inside a 2x2 quad. g1 shares a row with
# red, g2 shares a row with blue.
QUAD_OFFSETS = {
    Phase.RGGB: ((0, 0), (0, 1), (1, 0), (1, 1)),
    Phase.GRBG: ((0, 1), (0, 0), (1, 1), (1, 0)),
    Phase.GBRG: ((1, 0), (1, 1), (0, 0), (0, 1)),
    Phase.BGGR: ((1, 1), (1, 0), (0, 1), (0, 0)),
}

CHANNELS = ("r", "g1", "g2", "b")


@dataclass(frozen=True, eq=False)
class CfaImage:
    """A single-plane Bayer mosaic.

    ``samples`` is a (height, width) int32 array. Raw inputs lie in
    ``[0, 2**bit_depth - 1]``; transformed mosaics may leave that range.
    """

    samples: np.ndarray
    bit_depth: int = 16
    phase: Phase = Phase.RGGB

    def __post_init__(self):
        s = np.asarray(self.samples)
        if s.ndim != 2:
            raise GeometryError("mosaic must be two-dimensional")
        h, w = s.shape
        if h < 2 or w < 2 or h % 2 or w % 2:
            raise GeometryError(f"mosaic dimensions must be even and >= 2, got {w}x{h}")
        if not 1 <= int(self.bit_depth) <= 16:
            raise ValueError(f"bit depth must be in 1..16, got {self.bit_depth}")
        if s.dtype != np.int32:
            if s.size and (s.min() < INT32_MIN or s.max() > INT32_MAX):
                raise OverflowError("samples do not fit in int32")
            s = s.astype(np.int32)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "bit_depth", int(self.bit_depth))
        object.__setattr__(self, "phase", Phase.parse(self.phase))

    @property
    def width(self):
        return self.samples.shape[1]

    @property
    def height(self):
        return self.samples.shape[0]

    @property
    def maxval(self):
        return (1 << self.bit_depth) - 1

    def in_range(self):
        """True when every sample is a valid raw value for the bit depth."""
        s = self.samples
        return bool(s.min() >= 0 and s.max() <= self.maxval)

    def __eq__(self, other):
        if not isinstance(other, CfaImage):
            return NotImplemented
        return (
            self.bit_depth == other.bit_depth
            and self.phase == other.phase
            and np.array_equal(self.samples, other.samples)
        )


@dataclass(frozen=True, eq=False)
class ColorImage:
    """Full-colour image with real-valued r, g, b planes of equal shape."""

    r: np.ndarray
    g: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        planes = [np.asarray(p, dtype=np.float64) for p in (self.r, self.g, self.b)]
        if planes[0].ndim != 2 or any(p.shape != planes[0].shape for p in planes):
            raise GeometryError("colour planes must be 2-D and share a shape")
        if not all(np.isfinite(p).all() for p in planes):
            raise ValueError("colour planes must be finite")
        for name, p in zip("rgb", planes):
            object.__setattr__(self, name, p)

    @property
    def shape(self):
        return self.r.shape

    def scaled(self, gains):
        """Per-channel multiplication, e.g. division by an illuminant."""
        gr, gg, gb = gains
        return ColorImage(self.r * gr, self.g * gg, self.b * gb)


@dataclass(frozen=True, eq=False)
class QuadPlanes:
    r: np.ndarray
    g1: np.ndarray
    g2: np.ndarray
    b: np.ndarray
    bit_depth: int = 16
    phase: Phase = Phase.RGGB

    def __post_init__(self):
        shapes = {np.shape(getattr(self, c)) for c in CHANNELS}
        if len(shapes) != 1:
            raise GeometryError(f"quad planes disagree in shape: {sorted(shapes)}")

    def planes(self):
        return [getattr(self, c) for c in CHANNELS]


@dataclass(frozen=True)
class SceneParams:
    """Parameters of a synthetic scene: per-channel lowpass fields plus one
    shared highpass field, multiplied by a channel tint."""

    tint: tuple = (1.0, 1.0, 1.0)
    hp_amplitude: float = 20.0
    lp_cutoff: float = 0.1
    rng_seed: int = 0
    base: float = 160.0
    lp_amplitude: float = 40.0
    achromatic: bool = False

    def __post_init__(self):
        if len(self.tint) != 3 or any(not (t > 0 and math.isfinite(t)) for t in self.tint):
            raise ValueError(f"tint components must be positive and finite, got {self.tint}")
        if self.hp_amplitude < 0:
            raise ValueError("hp_amplitude must be >= 0")
        if not 0 < self.lp_cutoff <= 0.5:
            raise ValueError("lp_cutoff must be in (0, 0.5]")


def demux(img):
    """Split a mosaic into its r, g1, g2, b quarter planes (phase-normalised)."""
    s = img.samples
    h, w = s.shape
    if h % 2 or w % 2:
        raise GeometryError("mosaic dimensions must be even")
    planes = [s[dy::2, dx::2].copy() for dy, dx in QUAD_OFFSETS[img.phase]]
    return QuadPlanes(*planes, bit_depth=img.bit_depth, phase=img.phase)


def remux(q):
    planes = q.planes()
    shape = np.shape(planes[0])
    if len(shape) != 2:
        raise GeometryError("quad planes must be two-dimensional")
    for p in planes[1:]:
        if np.shape(p) != shape:
            raise GeometryError("quad planes disagree in shape")
    h, w = shape
    out = np.empty((2 * h, 2 * w), dtype=np.int64)
    for p, (dy, dx) in zip(planes, QUAD_OFFSETS[Phase.parse(q.phase)]):
        out[dy::2, dx::2] = p
    return CfaImage(out, bit_depth=q.bit_depth, phase=q.phase)


def channel_masks(shape, phase):
    """Boolean (red, green, blue) lattice masks for a mosaic of ``shape``."""
    h, w = shape
    masks = [np.zeros((h, w), dtype=bool) for _ in range(3)]
    (ry, rx), (g1y, g1x), (g2y, g2x), (by, bx) = QUAD_OFFSETS[Phase.parse(phase)]
    masks[0][ry::2, rx::2] = True
    masks[1][g1y::2, g1x::2] = True
    masks[1][g2y::2, g2x::2] = True
    masks[2][by::2, bx::2] = True
    return masks


def cfa_select(c, phase):
    """Real-valued mosaic: each pixel keeps the lattice-selected colour."""
    mr, mg, mb = channel_masks(c.shape, phase)
    return np.where(mr, c.r, np.where(mg, c.g, c.b))


def cfa_sample(c, phase=Phase.RGGB, bit_depth=10):
    if c.shape[0] % 2 or c.shape[1] % 2:
        raise GeometryError("colour image dimensions must be even")
    x = np.rint(cfa_select(c, phase))
    x = np.clip(x, 0, (1 << bit_depth) - 1).astype(np.int32)
    return CfaImage(x, bit_depth=bit_depth, phase=phase)


def _spectral_fields(rng, shape, cutoff, count):
    """Unit-variance lowpass fields and one unit-variance highpass field."""
    h, w = shape
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    radius = np.hypot(fy, fx)
    low = radius <= cutoff
    low[0, 0] = False
    high = ~low
    high[0, 0] = False

    def shaped(mask):
        noise = rng.standard_normal(shape)
        f = np.real(np.fft.ifft2(np.fft.fft2(noise) * mask))
        sd = f.std()
        return f / sd if sd > 0 else f

    lows = [shaped(low) for _ in range(count)]
    return lows, shaped(high)


def synth_scene(p, width, height):
    """Deterministic synthetic colour scene for bandwidth and coding experiments.

    Each channel is ``tint_c * (base + lp_amplitude * LP_c + hp_amplitude * HP)``
    where LP_c are independent band-limited fields (spectral support within
    ``lp_cutoff`` of DC) and HP is a single field with support only above it.
    """
    for n in (width, height):
        if n < 2 or n & (n - 1):
            raise GeometryError(f"scene dimensions must be powers of two, got {width}x{height}")
    rng = np.random.default_rng(p.rng_seed)
    lows, hp = _spectral_fields(rng, (height, width), p.lp_cutoff, 1 if p.achromatic else 3)
    if p.achromatic:
        lows = lows * 3
    planes = [
        t * (p.base + p.lp_amplitude * lp + p.hp_amplitude * hp)
        for t, lp in zip(p.tint, lows)
    ]
    return ColorImage(*planes)


_TOKEN = re.compile(rb"(?:\s|#[^\n]*(?:\n|$))*(\d+)")


def load_pgm(data, phase=Phase.RGGB):
    """Parse a binary (P5) PGM. Bit depth is inferred from maxval."""
    data = bytes(data)
    if not data.startswith(b"P5"):
        raise FormatError("not a binary PGM (missing P5 magic)")
    pos = 2
    values = []
    for _ in range(3):
        m = _TOKEN.match(data, pos)
        if not m or m.start(1) == pos:
            raise FormatError("malformed PGM header")
        values.append(int(m.group(1)))
        pos = m.end(1)
    if pos >= len(data) or data[pos : pos + 1] not in (b" ", b"\t", b"\n", b"\r"):
        raise FormatError("malformed PGM header")
    pos += 1
    width, height, maxval = values
    if maxval == 0 or maxval > 65535:
        raise FormatError(f"PGM maxval {maxval} out of range 1..65535")
    if width == 0 or height == 0:
        raise FormatError("PGM has zero size")
    nbytes = 1 if maxval < 256 else 2
    need = width * height * nbytes
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise FormatError(f"truncated PGM payload: {len(payload)} of {need} bytes")
    dtype = np.uint8 if nbytes == 1 else np.dtype(">u2")
    samples = np.frombuffer(payload, dtype=dtype).reshape(height, width).astype(np.int32)
    if samples.max(initial=0) > maxval:
        raise FormatError("PGM sample exceeds maxval")
    bit_depth = max(1, math.ceil(math.log2(maxval + 1)))
    try:
        return CfaImage(samples, bit_depth=bit_depth, phase=phase)
    except GeometryError as exc:
        raise FormatError(str(exc)) from exc


def save_pgm(img, maxval=None):
    if maxval is None:
        maxval = img.maxval
    s = img.samples
    if s.min() < 0 or s.max() > maxval:
        raise ValueError("samples outside [0, maxval] cannot be stored in PGM")
    header = b"P5\n%d %d\n%d\n" % (img.width, img.height, maxval)
    if maxval < 256:
        body = s.astype(np.uint8).tobytes()
    else:
        body = s.astype(">u2").tobytes()
    return header + body
