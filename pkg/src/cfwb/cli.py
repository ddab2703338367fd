"""Command-line front end.

Exit codes: 0 success, 1 selftest failure, 2 usage, 3 I/O, 4 format/data.
Machine-readable results go to stdout, diagnostics to stderr.
"""

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .analysis import run_bench, shannon_entropy, spectrum_report, synthetic_suite, write_csv
from .cfa import CfaImage, Phase, demux, load_pgm, save_pgm
from .codec import PIPELINES, decode_container, encode_container, normalize_pipeline
from .errors import FormatError, GeometryError, UnsupportedImbalanceError
from .wavelet import DEFAULT_LEVELS
from .whitebalance import (
    STRUCTURES, LiftingCoeffs, estimate_gray_world, solve_lifting_coeffs, wb_forward, wb_inverse)

log = logging.getLogger("cfwb")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_FORMAT = 0, 1, 2, 3, 4
SIGNED_OFFSET = 1 << 15


class UsageError(Exception):
    pass


def _phase(text):
    try:
        return Phase.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _pipeline(text):
    try:
        return normalize_pipeline(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _tint(text):
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"tint must be r,g,b numbers, got {text!r}") from None
    if len(vals) != 3 or min(vals) <= 0:
        raise argparse.ArgumentTypeError("tint needs three positive values")
    return vals


def build_parser():
    ap = argparse.ArgumentParser(prog="cfwb", description="Lossless white balance and coding of Bayer raw mosaics.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="PGM mosaic -> .cfl container")
    enc.add_argument("input")
    enc.add_argument("-o", "--output", required=True)
    enc.add_argument("--phase", type=_phase, default=Phase.RGGB, help="rggb, grbg, gbrg or bggr")
    enc.add_argument("--pipeline", type=_pipeline, default="mallat", help=", ".join(PIPELINES))
    enc.add_argument("--levels", type=int, default=DEFAULT_LEVELS, help="wavelet levels, clamped to the geometry")
    enc.add_argument("--wb", action="store_true", help="apply gray-world lossless white balance")
    enc.add_argument("--structure", choices=STRUCTURES, default=STRUCTURES[0])

    dec = sub.add_parser("decode", help=".cfl container -> PGM mosaic")
    dec.add_argument("input")
    dec.add_argument("-o", "--output", required=True)

    wb = sub.add_parser("wb", help="white balance a PGM mosaic (interchange preview)")
    wb.add_argument("input")
    wb.add_argument("-o", "--output", required=True)
    wb.add_argument("--phase", type=_phase, default=Phase.RGGB)
    wb.add_argument("--structure", choices=STRUCTURES, default=STRUCTURES[0])
    wb.add_argument("--sidecar", help="metadata path (default: OUTPUT.json)")

    unwb = sub.add_parser("unwb", help="undo `wb` using its sidecar")
    unwb.add_argument("input")
    unwb.add_argument("-o", "--output", required=True)
    unwb.add_argument("--sidecar", help="metadata path (default: INPUT.json)")

    an = sub.add_parser("analyze", help="entropy and spectrum report of a PGM mosaic")
    an.add_argument("input")
    an.add_argument("--phase", type=_phase, default=Phase.RGGB)
    an.add_argument("--cutoff", type=float, default=0.1, help="highpass radius in cycles/sample")
    an.add_argument("--wb", action="store_true", help="also report the white-balanced mosaic")

    be = sub.add_parser("bench", help="bits-per-pixel table with and without white balance, as CSV")
    be.add_argument("inputs", nargs="*", help="PGM mosaics (omit with --synthetic)")
    be.add_argument("--synthetic", action="store_true", help="generate tinted synthetic scenes")
    be.add_argument("--seed", type=int, default=0, help="first scene seed")
    be.add_argument("--count", type=int, default=10, help="number of synthetic scenes")
    be.add_argument("--size", type=int, default=128, help="synthetic scene side, a power of two")
    be.add_argument("--tint", type=_tint, default=(2.0, 1.0, 1.0), help="r,g,b illuminant tint")
    be.add_argument("--hp", type=float, default=20.0, help="shared highpass amplitude")
    be.add_argument("--lp-cutoff", type=float, default=0.1, help="chroma lowpass cutoff")
    be.add_argument("--bit-depth", type=int, default=10, help="synthetic sample depth")
    be.add_argument("--phase", type=_phase, default=Phase.RGGB)
    be.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    be.add_argument("--pipelines", type=lambda s: [_pipeline(p) for p in s.split(",")], default=list(PIPELINES),
                    help="comma-separated subset of " + ",".join(PIPELINES))
    be.add_argument("--structure", choices=STRUCTURES, default=STRUCTURES[0])
    be.add_argument("-o", "--output", help="CSV path (default stdout)")

    sub.add_parser("selftest", help="run the small exhaustive oracles")
    return ap


def _validate(args):
    if getattr(args, "levels", 1) < 1:
        raise UsageError("--levels must be at least 1")
    if args.command == "bench":
        if args.synthetic == bool(args.inputs):
            raise UsageError("bench takes either --synthetic or input PGM files")
        if args.count < 1 or args.size < 4 or args.size & (args.size - 1):
            raise UsageError("--count must be positive and --size a power of two >= 4")
        if not 1 <= args.bit_depth <= 16:
            raise UsageError("--bit-depth must be in 1..16")
        if args.hp < 0:
            raise UsageError("--hp must be nonnegative")
    if args.command == "analyze" and not 0 < args.cutoff < 0.5 * 2 ** 0.5:
        raise UsageError("--cutoff must lie in (0, 0.707)")


def _read(path):
    return Path(path).read_bytes()


def _write(path, data):
    Path(path).write_bytes(data)


def _gray_world(img, structure):
    return solve_lifting_coeffs(estimate_gray_world(img), structure)


def cmd_encode(args):
    img = load_pgm(_read(args.input), args.phase)
    coeffs = None
    if args.wb:
        try:
            coeffs = _gray_world(img, args.structure)
        except UnsupportedImbalanceError as exc:
            log.warning("white balance disabled: %s", exc)
    data = encode_container(img, args.pipeline, args.levels, coeffs)
    _write(args.output, data)
    print(f"{args.output},{len(data)},{len(data) * 8 / (img.width * img.height):.6f}")
    return EXIT_OK


def cmd_decode(args):
    img = decode_container(_read(args.input))
    _write(args.output, save_pgm(img))
    print(f"{args.output},{img.width},{img.height},{img.bit_depth},{img.phase.name.lower()}")
    return EXIT_OK


def cmd_wb(args):
    img = load_pgm(_read(args.input), args.phase)
    coeffs = _gray_world(img, args.structure)
    out = wb_forward(img, coeffs).samples
    lo, hi = int(out.min()), int(out.max())
    if lo >= 0 and hi <= img.maxval:
        offset, maxval = 0, img.maxval
    elif -SIGNED_OFFSET <= lo and hi < SIGNED_OFFSET:
        offset, maxval = SIGNED_OFFSET, 65535
    else:
        raise FormatError(f"white-balanced samples [{lo}, {hi}] do not fit a signed 16-bit PGM")
    shifted = CfaImage(out.astype(np.int64) + offset, bit_depth=16, phase=img.phase)
    _write(args.output, save_pgm(shifted, maxval))
    meta = {
        "offset": offset,
        "bit_depth": img.bit_depth,
        "phase": img.phase.name.lower(),
        "structure": coeffs.structure,
        "s": coeffs.hex()[0],
        "t": coeffs.hex()[1],
        "q": coeffs.hex()[2],
    }
    _write(args.sidecar or args.output + ".json", (json.dumps(meta, indent=2) + "\n").encode())
    print(",".join(coeffs.hex()))
    return EXIT_OK


def _coeff_from_hex(text):
    try:
        return float(np.frombuffer(bytes.fromhex(text), dtype=">f8")[0])
    except (ValueError, IndexError):
        raise FormatError(f"bad coefficient bit pattern {text!r}") from None


def cmd_unwb(args):
    try:
        meta = json.loads(_read(args.sidecar or args.input + ".json"))
        phase = Phase.parse(meta["phase"])
        offset, depth = int(meta["offset"]), int(meta["bit_depth"])
        coeffs = LiftingCoeffs(*(_coeff_from_hex(meta[k]) for k in "stq"), structure=meta["structure"])
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise FormatError(f"unreadable sidecar: {exc}") from None
    if not 1 <= depth <= 16:
        raise FormatError("sidecar bit depth out of range")
    shifted = load_pgm(_read(args.input), phase)
    wbd = CfaImage(shifted.samples.astype(np.int64) - offset, bit_depth=depth, phase=phase)
    img = wb_inverse(wbd, coeffs)
    if not img.in_range():
        raise FormatError("sidecar does not match the image: inverse leaves the raw range")
    _write(args.output, save_pgm(img))
    print(args.output)
    return EXIT_OK


def _report_rows(tag, img, cutoff):
    rows = [(f"{tag}.entropy", f"{shannon_entropy(img.samples):.6f}")]
    for name, plane in zip(("r", "g1", "g2", "b"), demux(img).planes()):
        rows.append((f"{tag}.entropy_{name}", f"{shannon_entropy(plane):.6f}"))
    try:
        rep = spectrum_report(img.samples, cutoff, plane_id=tag)
    except GeometryError as exc:
        log.warning("spectrum skipped: %s", exc)
    else:
        rows += [(f"{tag}.{k}", v) for k, v in rep.rows() if k != "plane"]
    return rows


def cmd_analyze(args):
    img = load_pgm(_read(args.input), args.phase)
    rows = _report_rows("raw", img, args.cutoff)
    if args.wb:
        try:
            coeffs = _gray_world(img, STRUCTURES[0])
        except UnsupportedImbalanceError as exc:
            log.warning("white balance skipped: %s", exc)
        else:
            rows.append(("wb.coefficients", " ".join(coeffs.hex())))
            rows += _report_rows("wb", wb_forward(img, coeffs), args.cutoff)
    print("metric,value")
    for k, v in rows:
        print(f"{k},{v}")
    return EXIT_OK


def cmd_bench(args):
    if args.synthetic:
        images = synthetic_suite(
            args.tint, range(args.seed, args.seed + args.count), args.size, args.bit_depth,
            args.phase, hp_amplitude=args.hp, lp_cutoff=args.lp_cutoff)
    else:
        images = [load_pgm(_read(p), args.phase) for p in args.inputs]
    t0 = time.perf_counter()
    rows = run_bench(images, args.pipelines, args.levels, args.structure)
    log.info("bench: %d images in %.2fs (%s kernels)", len(images), time.perf_counter() - t0, kernels.BACKEND)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_selftest(args):
    from .selftest import run_all

    ok = True
    for name, passed, detail in run_all():
        print(f"{'ok' if passed else 'FAIL'},{name},{detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "wb": cmd_wb,
    "unwb": cmd_unwb,
    "analyze": cmd_analyze,
    "bench": cmd_bench,
    "selftest": cmd_selftest,
}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="cfwb: %(levelname)s: %(message)s", stream=sys.stderr)
    try:
        _validate(args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"cfwb: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cfwb: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (FormatError, ValueError, OverflowError) as exc:
        print(f"cfwb: format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
