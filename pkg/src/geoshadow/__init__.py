"""Geometric shadow masks for satellite images.

Casts shadows over a digital surface model from the sun position, projects
them into image coordinates through an RPC camera model, and derives the
auxiliary masks (uncertainty, vegetation, min/max agreement) plus the
shadow-supervision loss built on them.
"""

from .config import RunConfig, crs_from_string, crs_to_string
from .errors import (
    ConfigError,
    GeoShadowError,
    GeoTiffFormatError,
    LocalizationError,
    RasterBoundsError,
    RpcParseError,
    SingularCameraError,
)
from .geotiff import read_geotiff, write_geotiff
from .masks import (
    SupervisionBundle,
    agreement_masks,
    ndvi,
    remove_small_regions,
    shadow_loss,
    vegetation_mask,
)
from .projection import DEFAULT_MIN_REGION_PX, ShadowProduct, finalize, project_shadows
from .raster import Crs, Point3, Raster, bilinear_sample, grid_points, upsample
from .rpc import RpcModel, eval_rational, localize
from .rpc_io import read_rpc, write_rpc_json, write_rpc_text
from .shadowcast import RayPath, cast_shadows, cast_shadows_oracle, compute_paths
from .solar import SunGeometry, sun_direction
from .utm import geographic_to_utm, utm_to_geographic

__version__ = "0.1.0"

__all__ = [
    "Crs", "Point3", "Raster", "bilinear_sample", "grid_points", "upsample",
    "SunGeometry", "sun_direction",
    "RayPath", "compute_paths", "cast_shadows", "cast_shadows_oracle",
    "RpcModel", "eval_rational", "localize",
    "utm_to_geographic", "geographic_to_utm",
    "ShadowProduct", "project_shadows", "finalize", "DEFAULT_MIN_REGION_PX",
    "SupervisionBundle", "remove_small_regions", "ndvi", "vegetation_mask",
    "agreement_masks", "shadow_loss",
    "read_geotiff", "write_geotiff", "read_rpc", "write_rpc_text", "write_rpc_json",
    "RunConfig", "crs_from_string", "crs_to_string",
    "GeoShadowError", "RasterBoundsError", "GeoTiffFormatError", "RpcParseError",
    "SingularCameraError", "LocalizationError", "ConfigError",
]
