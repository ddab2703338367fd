"""Golomb-Rice subband coding and the ``.cfl`` container.

Container layout (all integers little-endian)::

    offset  size  field
    0       4     magic b"CFWB"
    4       1     version (1)
    5       4     width
    9       4     height
    13      1     bit depth
    14      1     phase      0 rggb, 1 grbg, 2 gbrg, 3 bggr
    15      1     pipeline   0 direct, 1 demux, 2 mallat, 3 camra_a, 4 camra_s
    16      1     wavelet levels (0 for direct and demux)
    17      1     white balance applied (0/1)
    18      1     white balance structure  0 pyramid, 1 sequential
    19      24    s, t, q as raw binary64 bit patterns
    43      ...   streams

Each stream is ``id:u8 k:u8 count:u32 nbytes:u32`` followed by ``nbytes`` of
Rice payload (MSB-first, zero-padded to a byte). Stream ids are
``4 * level + band`` with band 0 LL, 1 LH, 2 HL, 3 HH for wavelet pipelines,
and the plane index for direct (0) and demux (r, g1, g2, b = 0..3).
"""

import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cfa import CfaImage, Phase, QuadPlanes, demux, remux
from .decorrelate import CAMRA_A, CAMRA_S, apply_pipeline, undo_pipeline
from .errors import FormatError
from .wavelet import (
    DEFAULT_LEVELS, SubbandPyramid, clamp_levels, dwt2d_forward, dwt2d_inverse, max_levels)
from .whitebalance import PYRAMID, SEQUENTIAL, LiftingCoeffs, wb_forward, wb_inverse

MAGIC = b"CFWB"
VERSION = 1
HEADER = struct.Struct("<4sBIIBBBBBB24s")
STREAM = struct.Struct("<BBII")

ESCAPE_RUN = 48
K_MAX = 24

PIPELINES = ("direct", "demux", "mallat", "camra_a", "camra_s")
WB_STRUCTURES = (PYRAMID, SEQUENTIAL)
BANDS = ("LL", "LH", "HL", "HH")


def normalize_pipeline(name):
    key = str(name).lower().replace("-", "_")
    if key not in PIPELINES:
        raise ValueError(f"unknown pipeline {name!r}; choose from {', '.join(PIPELINES)}")
    return key


def zigzag(v):
    v = np.asarray(v, dtype=np.int64)
    return np.where(v >= 0, 2 * v, -2 * v - 1).astype(np.uint64)


def unzigzag(u):
    u = np.asarray(u, dtype=np.uint64)
    half = (u >> np.uint64(1)).astype(np.int64)
    return np.where(u & np.uint64(1), -half - 1, half)


def rice_param_estimate(plane):
    """Smallest k with mean(zigzag(plane)) < 2**k, capped at 24."""
    u = zigzag(np.asarray(plane).ravel())
    if u.size == 0:
        return 0
    mean = float(np.mean(u, dtype=np.float64))
    k = 0
    while k < K_MAX and mean >= float(1 << k):
        k += 1
    return k


def rice_cost(u, k):
    """Exact payload size in bits of zigzagged values ``u`` at parameter k."""
    quot = u >> np.uint64(k)
    esc = quot >= ESCAPE_RUN
    plain_bits = int(quot[~esc].sum()) + int((~esc).sum()) * (1 + k)
    return plain_bits + int(esc.sum()) * (ESCAPE_RUN + 32)


def choose_rice_param(u):
    """Cheapest k at or below the mean-based estimate.

    The mean rule overshoots for two-sided Laplacian residuals, so the
    estimate is refined by exact cost over the three parameters below it.
    """
    u = np.asarray(u, dtype=np.uint64).ravel()
    if u.size == 0:
        return 0
    est = rice_param_estimate(unzigzag(u))
    candidates = range(max(0, est - 3), est + 1)
    return min(candidates, key=lambda k: (rice_cost(u, k), k))


def rice_encode(values, k):
    """Rice-code already-zigzagged unsigned values; returns byte-aligned payload."""
    if not 0 <= k <= K_MAX:
        raise ValueError(f"rice parameter {k} outside 0..{K_MAX}")
    u = np.ascontiguousarray(values, dtype=np.uint64).ravel()
    if u.size and int(u.max()) >> 32:
        raise OverflowError("value does not fit the 32-bit escape code")
    return kernels.rice_encode(u, k)


def rice_decode(payload, count, k):
    if not 0 <= k <= K_MAX:
        raise FormatError(f"rice parameter {k} outside 0..{K_MAX}")
    try:
        return kernels.rice_decode(bytes(payload), int(count), int(k))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def dpcm_forward(plane):
    """Left-neighbour prediction residual; the first column predicts from above."""
    x = np.asarray(plane, dtype=np.int64)
    res = np.empty_like(x)
    res[:, 1:] = x[:, 1:] - x[:, :-1]
    res[0, 0] = x[0, 0]
    res[1:, 0] = x[1:, 0] - x[:-1, 0]
    return res


def dpcm_inverse(res):
    res = np.asarray(res, dtype=np.int64)
    x = res.copy()
    x[:, 0] = np.cumsum(res[:, 0])
    return np.cumsum(x, axis=1)


@dataclass
class ContainerHeader:
    width: int
    height: int
    bit_depth: int
    phase: Phase
    pipeline: str
    levels: int
    wb: LiftingCoeffs = None

    def pack(self):
        wb = self.wb
        coeff_bits = (wb or LiftingCoeffs(1.0, 1.0, 1.0)).to_bits()
        structure = WB_STRUCTURES.index(wb.structure) if wb else 0
        return HEADER.pack(
            MAGIC, VERSION, self.width, self.height, self.bit_depth, int(self.phase),
            PIPELINES.index(self.pipeline), self.levels, 1 if wb else 0, structure, coeff_bits)

    @classmethod
    def unpack(cls, data):
        if len(data) < HEADER.size:
            raise FormatError("container shorter than its header")
        (magic, version, width, height, depth, phase, pipeline, levels, wb_flag,
         structure, coeff_bits) = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise FormatError(f"bad container magic {magic!r}")
        if version != VERSION:
            raise FormatError(f"unsupported container version {version}")
        try:
            phase = Phase(phase)
            pipeline = PIPELINES[pipeline]
            structure = WB_STRUCTURES[structure]
        except (ValueError, IndexError):
            raise FormatError("container header has an out-of-range enum") from None
        if wb_flag not in (0, 1) or not 1 <= depth <= 16:
            raise FormatError("container header flags are invalid")
        wb = None
        if wb_flag:
            try:
                wb = LiftingCoeffs.from_bits(coeff_bits, structure)
            except ValueError as exc:
                raise FormatError(f"invalid white balance coefficients: {exc}") from None
        return cls(width, height, depth, phase, pipeline, levels, wb)


def _planes_for(img, pipeline, levels):
    """(stream id, integer plane) pairs in container order."""
    if pipeline == "direct":
        return [(0, dpcm_forward(img.samples))]
    if pipeline == "demux":
        return [(i, dpcm_forward(p)) for i, p in enumerate(demux(img).planes())]
    pyr = dwt2d_forward(img.samples, levels)
    if pipeline in (CAMRA_A, CAMRA_S):
        pyr = apply_pipeline(pyr, pipeline)
    out = [(4 * pyr.levels, pyr.ll)]
    for lvl in range(pyr.levels, 0, -1):
        bands = pyr.details[lvl - 1]
        out += [(4 * lvl + 1, bands["LH"]), (4 * lvl + 2, bands["HL"]), (4 * lvl + 3, bands["HH"])]
    return out


def _stream_shapes(header):
    """Expected (id, shape) of every stream, derived from the header alone."""
    w, h = header.width, header.height
    if header.pipeline == "direct":
        return [(0, (h, w))]
    if header.pipeline == "demux":
        return [(i, (h // 2, w // 2)) for i in range(4)]
    shapes = []
    rows, cols = h, w
    for _ in range(header.levels):
        lo_r, hi_r = (rows + 1) // 2, rows // 2
        lo_c, hi_c = (cols + 1) // 2, cols // 2
        shapes.append({"LH": (lo_r, hi_c), "HL": (hi_r, lo_c), "HH": (hi_r, hi_c)})
        rows, cols = lo_r, lo_c
    out = [(4 * header.levels, (rows, cols))]
    for lvl in range(header.levels, 0, -1):
        s = shapes[lvl - 1]
        out += [(4 * lvl + 1, s["LH"]), (4 * lvl + 2, s["HL"]), (4 * lvl + 3, s["HH"])]
    return out


def encode_container(img, pipeline="mallat", levels=DEFAULT_LEVELS, wb=None):
    """Encode a raw mosaic. ``wb`` is an optional :class:`LiftingCoeffs`."""
    pipeline = normalize_pipeline(pipeline)
    if not img.in_range():
        raise ValueError(f"samples outside the {img.bit_depth}-bit raw range")
    if pipeline in ("direct", "demux"):
        levels = 0
    else:
        levels = clamp_levels(img.samples.shape, levels)
    work = wb_forward(img, wb) if wb is not None else img
    header = ContainerHeader(img.width, img.height, img.bit_depth, img.phase, pipeline, levels, wb)
    parts = [header.pack()]
    for sid, plane in _planes_for(work, pipeline, levels):
        u = zigzag(plane.ravel())
        k = choose_rice_param(u)
        payload = rice_encode(u, k)
        parts.append(STREAM.pack(sid, k, plane.size, len(payload)))
        parts.append(payload)
    return b"".join(parts)


def decode_container(data):
    data = bytes(data)
    header = ContainerHeader.unpack(data)
    if header.width < 2 or header.height < 2 or header.width % 2 or header.height % 2:
        raise FormatError("container geometry is not an even mosaic")
    if header.pipeline not in ("direct", "demux"):
        if not 1 <= header.levels <= max_levels((header.height, header.width)):
            raise FormatError("container level count does not fit its geometry")
    pos = HEADER.size
    planes = {}
    for sid, shape in _stream_shapes(header):
        if pos + STREAM.size > len(data):
            raise FormatError("container truncated in a stream header")
        got_id, k, count, nbytes = STREAM.unpack_from(data, pos)
        pos += STREAM.size
        if got_id != sid:
            raise FormatError(f"expected stream {sid}, found {got_id}")
        if count != shape[0] * shape[1]:
            raise FormatError(f"stream {sid} holds {count} samples, geometry needs {shape[0] * shape[1]}")
        if pos + nbytes > len(data):
            raise FormatError(f"stream {sid} payload truncated")
        values = rice_decode(data[pos : pos + nbytes], count, k)
        pos += nbytes
        planes[sid] = unzigzag(values).reshape(shape)
    if pos != len(data):
        raise FormatError("trailing bytes after the last stream")

    if header.pipeline == "direct":
        samples = dpcm_inverse(planes[0])
    elif header.pipeline == "demux":
        q = QuadPlanes(*(dpcm_inverse(planes[i]) for i in range(4)),
                       bit_depth=header.bit_depth, phase=header.phase)
        samples = remux(q).samples
    else:
        n = header.levels
        details = [{b: planes[4 * lvl + i] for i, b in enumerate(BANDS) if i} for lvl in range(1, n + 1)]
        pyr = SubbandPyramid(planes[4 * n], details, (header.height, header.width))
        if header.pipeline in (CAMRA_A, CAMRA_S):
            pyr = undo_pipeline(pyr, header.pipeline)
        samples = dwt2d_inverse(pyr)
    try:
        img = CfaImage(samples, bit_depth=header.bit_depth, phase=header.phase)
        if header.wb is not None:
            img = wb_inverse(img, header.wb)
    except (OverflowError, ValueError) as exc:
        raise FormatError(f"container does not decode to a valid image: {exc}") from None
    if not img.in_range():
        raise FormatError("decoded samples fall outside the declared bit depth")
    return img


def read_header(data):
    return ContainerHeader.unpack(bytes(data))
