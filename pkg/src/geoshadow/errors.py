"""Exception hierarchy for the geoshadow package."""


class GeoShadowError(Exception):
    """Base class for all geoshadow errors."""


class RasterBoundsError(GeoShadowError):
    """A sample query fell outside the raster grid."""


class GeoTiffFormatError(GeoShadowError):
    """A GeoTIFF file is malformed or uses an unsupported layout."""


class RpcParseError(GeoShadowError):
    """An RPC file could not be parsed."""


class SingularCameraError(GeoShadowError):
    """An RPC denominator polynomial evaluated to (near) zero."""


class LocalizationError(GeoShadowError):
    """Iterative image-to-ground localization failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(GeoShadowError):
    """A run configuration document is invalid."""
