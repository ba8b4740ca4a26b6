"""Georeferenced raster grid container and resampling primitives.

A :class:`Raster` couples a 2-D array of samples with an affine geotransform
mapping pixel *centers* to world coordinates.  The pixel-center convention is
used consistently across the whole package: pixel (col, row) sits at world
position ``(origin_x + col * pixel_size_x, origin_y + row * pixel_size_y)``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import RasterBoundsError

__all__ = [
    "Crs",
    "Raster",
    "Point3",
    "bilinear_sample",
    "bilinear_sample_many",
    "upsample",
    "grid_points",
]


@dataclass(frozen=True)
class Crs:
    """Coordinate system tag: geographic degrees, a UTM zone, or bare pixels."""

    kind: str  # "geographic" | "utm" | "pixel"
    zone: Optional[int] = None
    hemisphere: Optional[str] = None  # "N" | "S"

    @classmethod
    def geographic(cls):
        return cls("geographic")

    @classmethod
    def utm(cls, zone, hemisphere):
        hemisphere = hemisphere.upper()
        if not 1 <= zone <= 60:
            raise ValueError(f"UTM zone must be in 1..60, got {zone}")
        if hemisphere not in ("N", "S"):
            raise ValueError(f"hemisphere must be 'N' or 'S', got {hemisphere!r}")
        return cls("utm", zone, hemisphere)

    @classmethod
    def pixel_only(cls):
        return cls("pixel")


@dataclass(frozen=True)
class Point3:
    """A 3-D world point (x, y in world units, z in meters)."""

    x: float
    y: float
    z: float


@dataclass(frozen=True)
class Raster:
    """A single-band raster with pixel-center georeferencing.

    Attributes:
        values: 2-D float64 array, shape (height, width), row-major.
        geotransform: (origin_x, origin_y, pixel_size_x, pixel_size_y) mapping
            pixel centers to world coordinates.  pixel_size_x > 0;
            pixel_size_y is negative for north-up rasters.
        nodata: optional sentinel marking invalid samples (may be NaN).
        crs: coordinate system tag for the geotransform.
    """

    values: np.ndarray
    geotransform: tuple = (0.0, 0.0, 1.0, 1.0)
    nodata: Optional[float] = None
    crs: Crs = field(default_factory=Crs.pixel_only)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"raster values must be a non-empty 2-D array, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        gt = tuple(float(v) for v in self.geotransform)
        if len(gt) != 4:
            raise ValueError("geotransform must be (origin_x, origin_y, pixel_size_x, pixel_size_y)")
        if gt[2] <= 0:
            raise ValueError(f"pixel_size_x must be positive, got {gt[2]}")
        object.__setattr__(self, "geotransform", gt)

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def width(self):
        return self.values.shape[1]

    def is_nodata(self, v):
        """Elementwise nodata test, NaN-aware.  Works on scalars and arrays."""
        if self.nodata is None:
            return np.zeros(np.shape(v), dtype=bool) if np.ndim(v) else False
        if math.isnan(self.nodata):
            return np.isnan(v)
        return np.asarray(v) == self.nodata if np.ndim(v) else v == self.nodata

    def valid_mask(self):
        """Boolean array, True where the sample is not nodata."""
        if self.nodata is None:
            return np.ones(self.values.shape, dtype=bool)
        return ~np.asarray(self.is_nodata(self.values))

    def pixel_to_world(self, col, row):
        """World coordinates of (fractional) pixel-center coordinates."""
        ox, oy, px, py = self.geotransform
        return ox + np.asarray(col) * px, oy + np.asarray(row) * py

    def with_values(self, values, nodata="keep"):
        """Copy of this raster with replaced sample values (same grid)."""
        nd = self.nodata if nodata == "keep" else nodata
        return Raster(values, self.geotransform, nd, self.crs)


def bilinear_sample(raster, x, y):
    """Bilinearly interpolate the raster at fractional pixel coordinates.

    ``x`` is the fractional column, ``y`` the fractional row.  Exact
    pixel-center queries return the stored sample bit-for-bit.  If any
    neighbor entering the blend is nodata the result is nodata.

    Raises:
        RasterBoundsError: if (x, y) lies outside [0, width-1] x [0, height-1].
    """
    h, w = raster.values.shape
    if not (0 <= x <= w - 1 and 0 <= y <= h - 1):
        raise RasterBoundsError(
            f"query ({x}, {y}) outside grid [0, {w - 1}] x [0, {h - 1}]"
        )
    out = bilinear_sample_many(raster, np.array([x]), np.array([y]))
    v = float(out[0])
    if math.isnan(v) and raster.nodata is not None:
        return raster.nodata
    return v


def bilinear_sample_many(raster, xs, ys):
    """Vectorized bilinear sampling; out-of-range coordinates are clamped.

    Returns a float64 array with NaN wherever a contributing neighbor is
    nodata.  Callers that need the raster's own sentinel should map NaN back
    themselves (see :func:`bilinear_sample`).
    """
    h, w = raster.values.shape
    xs = np.clip(np.asarray(xs, dtype=np.float64), 0.0, float(w - 1))
    ys = np.clip(np.asarray(ys, dtype=np.float64), 0.0, float(h - 1))

    x0 = np.floor(xs).astype(np.intp)
    y0 = np.floor(ys).astype(np.intp)
    fx = xs - x0
    fy = ys - y0
    # Exact-center queries keep a single neighbor per axis so that the stored
    # value is reproduced bit-for-bit and off-grid columns are never touched.
    x1 = np.where(fx == 0.0, x0, x0 + 1)
    y1 = np.where(fy == 0.0, y0, y0 + 1)

    v = raster.values
    v00 = v[y0, x0]
    v10 = v[y0, x1]
    v01 = v[y1, x0]
    v11 = v[y1, x1]

    out = (
        v00 * (1.0 - fx) * (1.0 - fy)
        + v10 * fx * (1.0 - fy)
        + v01 * (1.0 - fx) * fy
        + v11 * fx * fy
    )
    if raster.nodata is not None:
        bad = (
            raster.is_nodata(v00)
            | raster.is_nodata(v10)
            | raster.is_nodata(v01)
            | raster.is_nodata(v11)
        )
        out = np.where(bad, np.nan, out)
    return out


def upsample(raster, factor):
    """Upsample by an integer factor with bilinear interpolation.

    Output pixel (c, r) samples the input at fractional coordinates
    (c / factor, r / factor), clamped to the input grid at the far edges.
    Pixel sizes are divided by ``factor`` so pixel centers keep their world
    positions; factor 1 returns an identical raster.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError(f"upsample factor must be >= 1, got {factor}")
    if factor == 1:
        return raster
    h, w = raster.values.shape
    xs = np.arange(w * factor, dtype=np.float64) / factor
    ys = np.arange(h * factor, dtype=np.float64) / factor
    gx, gy = np.meshgrid(np.minimum(xs, w - 1.0), np.minimum(ys, h - 1.0))
    out = bilinear_sample_many(raster, gx.ravel(), gy.ravel()).reshape(h * factor, w * factor)
    nodata = raster.nodata
    if nodata is not None and not math.isnan(nodata):
        out = np.where(np.isnan(out), nodata, out)
    ox, oy, px, py = raster.geotransform
    return Raster(out, (ox, oy, px / factor, py / factor), nodata, raster.crs)


def grid_points(points, bbox, resolution, agg="min", nodata=float("nan")):
    """Rasterize a 3-D point cloud by per-cell min or max elevation.

    Args:
        points: iterable of :class:`Point3` (or (x, y, z) triples).
        bbox: (xmin, ymin, xmax, ymax) world rectangle.
        resolution: cell size in world units per pixel (> 0).
        agg: "min" or "max".

    Cell membership uses half-open intervals [cell_min, cell_max) on both
    axes; empty cells hold nodata.  An empty point list yields an all-nodata
    raster.
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    xmin, ymin, xmax, ymax = (float(v) for v in bbox)
    if not (xmax > xmin and ymax > ymin):
        raise ValueError(f"degenerate bbox {bbox}")
    if agg not in ("min", "max"):
        raise ValueError(f"agg must be 'min' or 'max', got {agg!r}")

    width = int(math.ceil((xmax - xmin) / resolution))
    height = int(math.ceil((ymax - ymin) / resolution))

    pts = np.array([(p.x, p.y, p.z) if isinstance(p, Point3) else tuple(p) for p in points],
                   dtype=np.float64).reshape(-1, 3)

    fill = np.inf if agg == "min" else -np.inf
    grid = np.full((height, width), fill)
    if len(pts):
        cols = np.floor((pts[:, 0] - xmin) / resolution).astype(np.intp)
        rows_up = np.floor((pts[:, 1] - ymin) / resolution).astype(np.intp)
        keep = (cols >= 0) & (cols < width) & (rows_up >= 0) & (rows_up < height)
        cols, rows_up, zs = cols[keep], rows_up[keep], pts[keep, 2]
        rows = height - 1 - rows_up  # row 0 at the top
        if agg == "min":
            np.minimum.at(grid, (rows, cols), zs)
        else:
            np.maximum.at(grid, (rows, cols), zs)

    empty = ~np.isfinite(grid)
    grid[empty] = nodata
    geotransform = (
        xmin + resolution / 2.0,
        ymin + (height - 0.5) * resolution,
        resolution,
        -resolution,
    )
    return Raster(grid, geotransform, nodata)
