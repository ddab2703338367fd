"""Pure numpy implementations of the hot kernels.

These mirror ``cfwb._kernels`` exactly, bit for bit. They are used when the
compiled extension is not available, or when ``CFWB_PURE=1`` is set.
"""

import numpy as np

ESCAPE_RUN = 48
ESCAPE_BITS = 32


def lift_forward(x1, x2, q):
    x1 = np.asarray(x1, dtype=np.int64)
    x2 = np.asarray(x2, dtype=np.int64)
    a = x2 - np.floor(q * x1.astype(np.float64)).astype(np.int64)
    b = x1 + np.floor(a.astype(np.float64) / q).astype(np.int64)
    a = a - np.floor(q * b.astype(np.float64)).astype(np.int64)
    return -a, b


def lift_inverse(x1p, x2p, q):
    b = np.asarray(x2p, dtype=np.int64).copy()
    a = -np.asarray(x1p, dtype=np.int64)
    a = a + np.floor(q * b.astype(np.float64)).astype(np.int64)
    b = b - np.floor(a.astype(np.float64) / q).astype(np.int64)
    a = a + np.floor(q * b.astype(np.float64)).astype(np.int64)
    return b, a


def rice_encode(values, k):
    v = np.ascontiguousarray(values, dtype=np.uint64)
    if v.size == 0:
        return b""
    kk = np.uint64(k)
    quot = v >> kk
    esc = quot >= ESCAPE_RUN
    run = np.where(esc, ESCAPE_RUN, quot).astype(np.int64)
    length = np.where(esc, ESCAPE_RUN + ESCAPE_BITS, run + 1 + k)
    starts = np.cumsum(length) - length
    total = int(length.sum())

    # unary runs via a difference array
    diff = np.zeros(total + 1, dtype=np.int32)
    diff[starts] += 1
    diff[starts + run] -= 1
    bits = (np.cumsum(diff[:total]) > 0).astype(np.uint8)

    plain = ~esc
    if k and plain.any():
        rem = v[plain] & np.uint64((1 << k) - 1)
        base = starts[plain] + run[plain] + 1
        for b in range(k):
            bits[base + b] = ((rem >> np.uint64(k - 1 - b)) & np.uint64(1)).astype(np.uint8)
    if esc.any():
        raw = v[esc]
        base = starts[esc] + ESCAPE_RUN
        for b in range(ESCAPE_BITS):
            bits[base + b] = ((raw >> np.uint64(ESCAPE_BITS - 1 - b)) & np.uint64(1)).astype(np.uint8)
    return np.packbits(bits).tobytes()


def rice_decode(buf, count, k):
    if count == 0:
        if len(buf):
            raise ValueError("trailing bytes after empty stream")
        return np.zeros(0, dtype=np.uint64)
    bits = np.unpackbits(np.frombuffer(buf, dtype=np.uint8))
    n = bits.size
    pos_all = np.arange(n, dtype=np.int64)

    # next zero at or after p; n when none remain
    zero_at = np.where(bits == 0, pos_all, n)
    nz = np.minimum.accumulate(zero_at[::-1])[::-1]
    run = nz - pos_all
    esc = run >= ESCAPE_RUN
    nxt = np.where(esc, pos_all + ESCAPE_RUN + ESCAPE_BITS, nz + 1 + k)

    # state n is "exactly at the end", n + 1 is "ran off the end"
    jump = np.empty(n + 2, dtype=np.int64)
    jump[:n] = np.where(nxt > n, n + 1, nxt)
    jump[n] = n + 1
    jump[n + 1] = n + 1

    # codeword start positions by pointer doubling
    idx = np.arange(count + 1, dtype=np.int64)
    pos = np.zeros(count + 1, dtype=np.int64)
    m = 0
    while (count >> m) > 0:
        sel = ((idx >> m) & 1).astype(bool)
        pos[sel] = jump[pos[sel]]
        jump = jump[jump]
        m += 1

    if pos[count] > n:
        raise ValueError("truncated rice stream")
    if n - pos[count] >= 8 or np.any(bits[pos[count]:]):
        raise ValueError("bad padding after rice stream")

    starts = pos[:count]
    is_esc = esc[starts]
    out = np.zeros(count, dtype=np.uint64)

    plain = ~is_esc
    if plain.any():
        p = starts[plain]
        quot = run[p].astype(np.uint64)
        rem = np.zeros(p.size, dtype=np.uint64)
        base = nz[p] + 1
        for b in range(k):
            rem = (rem << np.uint64(1)) | bits[base + b].astype(np.uint64)
        out[plain] = (quot << np.uint64(k)) | rem
    if is_esc.any():
        p = starts[is_esc] + ESCAPE_RUN
        raw = np.zeros(p.size, dtype=np.uint64)
        for b in range(ESCAPE_BITS):
            raw = (raw << np.uint64(1)) | bits[p + b].astype(np.uint64)
        if np.any((raw >> np.uint64(k)) < ESCAPE_RUN):
            raise ValueError("malformed rice escape")
        out[is_esc] = raw
    return out
