"""Lossless white balance and coding of Bayer colour filter array mosaics."""

from .cfa import CfaImage, ColorImage, Phase, QuadPlanes, SceneParams, cfa_sample, demux, load_pgm, remux, save_pgm, synth_scene
from .codec import decode_container, encode_container, read_header
from .errors import (
    CfwbError, FormatError, GainRangeError, GeometryError, HeadroomError, UnsupportedImbalanceError)
from .kernels import BACKEND
from .lifting import forward_scalar_lift, inverse_scalar_lift
from .whitebalance import (
    IlluminantColor, LiftingCoeffs, estimate_gray_world, solve_lifting_coeffs, wb_forward, wb_inverse)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CfaImage", "CfwbError", "ColorImage", "FormatError", "GainRangeError",
    "GeometryError", "HeadroomError", "IlluminantColor", "LiftingCoeffs", "Phase", "QuadPlanes",
    "SceneParams", "UnsupportedImbalanceError", "cfa_sample", "decode_container", "demux",
    "encode_container", "estimate_gray_world", "forward_scalar_lift", "inverse_scalar_lift",
    "load_pgm", "read_header", "remux", "save_pgm", "solve_lifting_coeffs", "synth_scene",
    "wb_forward", "wb_inverse",
]
