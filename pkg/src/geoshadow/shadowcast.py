"""Sweep-based shadow casting over a DSM.

The DSM is decomposed into ray paths marching in the shadow direction
(p, q).  Along each path a single running occluder is maintained: a sample at
horizontal distance d (in pixels) below the occluder's shadow line,
d < (Z_occluder - Z_current) / tan(elevation), is shadow; otherwise it is lit
and becomes the new occluder.  :func:`cast_shadows_oracle` re-derives the
same mask by exhaustively testing every earlier sample on the path and is
used only for verification.
"""

import math
from dataclasses import dataclass

import numpy as np

from .raster import Raster, bilinear_sample_many, upsample

__all__ = ["RayPath", "compute_paths", "cast_shadows", "cast_shadows_oracle"]


@dataclass(frozen=True)
class RayPath:
    """Pixels traversed by one shadow-march ray, in march order.

    ``cols``/``rows`` are the integer pixel indices; ``xs``/``ys`` are the
    subpixel coordinates on the continuous line through the path, within
    0.5 px of the integer pixel on the minor axis.
    """

    cols: np.ndarray
    rows: np.ndarray
    xs: np.ndarray
    ys: np.ndarray

    def __len__(self):
        return self.cols.size


def compute_paths(width, height, sun):
    """Decompose a width x height grid into shadow-march ray paths.

    Paths step one pixel along the major axis (the axis of max |component|
    of (p, q)) in the march direction, tracking the minor coordinate at
    subpixel precision; the pixel index is the nearest integer.  Every grid
    pixel belongs to exactly one path, and path pixels are ordered by
    increasing distance from the sun-facing boundary.

    Raises:
        ValueError: if p = q = 0 (zenith; no march direction exists).
    """
    p, q = sun.p, sun.q
    if p == 0.0 and q == 0.0:
        raise ValueError("degenerate march direction p = q = 0 (zenith sun)")

    column_major = abs(p) >= abs(q)
    if column_major:
        major_len, minor_len = width, height
        step_sign = 1 if p > 0 else -1
        slope = q / p  # minor-axis advance per unit major-axis step
    else:
        major_len, minor_len = height, width
        step_sign = 1 if q > 0 else -1
        slope = p / q

    major = np.arange(major_len, dtype=np.intp)
    # Integer intercepts partition the grid: round(slope*c + k) = round(slope*c) + k.
    g = np.floor(slope * major + 0.5).astype(np.intp)
    order = major if step_sign > 0 else major[::-1]
    g_ord = g[order]

    paths = []
    for k in range(-int(g.max()), minor_len - int(g.min())):
        minor_idx = g_ord + k
        keep = (minor_idx >= 0) & (minor_idx < minor_len)
        if not keep.any():
            continue
        mj = order[keep]
        mn = minor_idx[keep]
        sub = slope * mj + k
        if column_major:
            paths.append(RayPath(mj, mn, mj.astype(np.float64), sub))
        else:
            paths.append(RayPath(mn, mj, sub, mj.astype(np.float64)))
    return paths


def _prepare(dsm, sun):
    """Shared validation for the caster and its oracle.

    Returns (pixel_size, valid_mask).  Rejects anisotropic pixels and
    all-nodata DSMs.
    """
    _, _, px, py = dsm.geotransform
    if abs(px) != abs(py):
        raise ValueError(
            f"shadow casting requires square pixels, got ({px}, {py})"
        )
    valid = dsm.valid_mask()
    if not valid.any():
        raise ValueError("DSM has no valid samples")
    return px, valid


def _sample_heights(dsm, path, pixel_size):
    """Bilinear elevations along a path, converted to pixel units.

    Invalid (nodata-poisoned) samples come back as NaN.
    """
    zs = bilinear_sample_many(dsm, path.xs, path.ys)
    return zs / pixel_size


def cast_shadows(dsm, sun, upscale=4, with_validity=False):
    """Cast terrain shadows over a DSM (binary mask, 1 = shadow).

    The DSM is first upsampled by ``upscale`` (default 4) and the sweep runs
    at the upsampled resolution; the returned mask is at that resolution.
    Samples whose bilinear interpolation touches nodata are forced to 0 and
    flagged invalid.  With ``with_validity=True`` the result is a
    (shadow, validity) raster pair instead of the mask alone.
    """
    if int(upscale) < 1:
        raise ValueError(f"upscale must be >= 1, got {upscale}")
    _prepare(dsm, sun)
    up = upsample(dsm, int(upscale))
    pixel_size = up.geotransform[2]

    mask = np.zeros(up.values.shape, dtype=np.float64)
    valid = np.ones(up.values.shape, dtype=np.float64)

    if sun.zenith:
        valid[~up.valid_mask()] = 0.0
    else:
        a = sun.a
        for path in compute_paths(up.width, up.height, sun):
            zs = _sample_heights(up, path, pixel_size)
            xs = path.xs.tolist()
            ys = path.ys.tolist()
            zl = zs.tolist()
            n = len(zl)
            shadow = [0.0] * n
            path_valid = [1.0] * n
            occ = -1
            for j in range(n):
                zj = zl[j]
                if zj != zj:  # NaN: nodata-poisoned sample
                    path_valid[j] = 0.0
                    continue
                if occ < 0:
                    occ = j
                    continue
                ex = xs[j] - xs[occ]
                ey = ys[j] - ys[occ]
                d = math.sqrt(ex * ex + ey * ey)
                if d < (zl[occ] - zj) / a:
                    shadow[j] = 1.0
                else:
                    occ = j
            mask[path.rows, path.cols] = shadow
            valid[path.rows, path.cols] = path_valid

    shadow_r = Raster(mask, up.geotransform, None, up.crs)
    if with_validity:
        return shadow_r, Raster(valid, up.geotransform, None, up.crs)
    return shadow_r


def cast_shadows_oracle(dsm, sun):
    """Exhaustive shadow caster used to verify the sweep (no upscaling).

    A path sample is shadow iff *any* earlier sample on the same path casts
    over it; O(n^2) per path by design.
    """
    _prepare(dsm, sun)
    pixel_size = dsm.geotransform[2]
    mask = np.zeros(dsm.values.shape, dtype=np.float64)

    if not sun.zenith:
        a = sun.a
        for path in compute_paths(dsm.width, dsm.height, sun):
            zs = _sample_heights(dsm, path, pixel_size)
            dx = path.xs[None, :] - path.xs[:, None]
            dy = path.ys[None, :] - path.ys[:, None]
            d = np.sqrt(dx * dx + dy * dy)
            # cond[s, j]: sample s shadows sample j.  NaN heights compare
            # False on both sides, so nodata samples neither cast nor receive.
            cond = d < (zs[:, None] - zs[None, :]) / a
            earlier = np.tri(len(path), k=-1, dtype=bool).T
            mask[path.rows, path.cols] = (cond & earlier).any(axis=0).astype(np.float64)

    return Raster(mask, dsm.geotransform, None, dsm.crs)
