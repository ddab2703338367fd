class CfwbError(Exception):
    """Base class for all errors raised by cfwb."""


class GeometryError(CfwbError, ValueError):
    """Image or plane dimensions violate a transform's requirements."""


class FormatError(CfwbError, ValueError):
    """Malformed or truncated PGM file or container."""


class GainRangeError(CfwbError, ValueError):
    """A lifting gain is outside the supported range."""


class HeadroomError(CfwbError, OverflowError):
    """Sample magnitudes exceed what the integer transforms can carry."""


class UnsupportedImbalanceError(GainRangeError):
    """The illuminant is too unbalanced for bounded lifting gains."""
