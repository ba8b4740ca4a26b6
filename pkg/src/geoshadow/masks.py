"""Auxiliary mask products and the supervision arithmetic.

Connected-component cleanup of shadow masks, NDVI vegetation masking, the
min/max agreement bundle used to supervise only where both shadow variants
agree, and the shadow-supervision loss as a pure reference function.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage

from .raster import Raster

__all__ = [
    "SupervisionBundle",
    "remove_small_regions",
    "ndvi",
    "vegetation_mask",
    "agreement_masks",
    "shadow_loss",
]

# 8-connectivity: diagonal shadow strips from oblique sun angles stay whole.
_STRUCTURE_8 = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class SupervisionBundle:
    """Training-ready label set derived from the min/max shadow masks.

    ``supervision`` holds the agreed shadow label wherever both masks agree
    and both are certain; ``ignore`` is 1 everywhere else and never overlaps
    a supervision=1 pixel.
    """

    shadow_min: Raster
    shadow_max: Raster
    supervision: Raster
    ignore: Raster
    vegetation: Optional[Raster] = None


def _as_binary(raster, name):
    vals = raster.values
    good = (vals == 0) | (vals == 1)
    if raster.nodata is not None:
        good |= np.asarray(raster.is_nodata(vals))
    if not good.all():
        raise ValueError(f"{name} is not a binary mask")
    return vals == 1


def _check_congruent(a, b, what):
    if a.values.shape != b.values.shape:
        raise ValueError(
            f"{what}: shape mismatch {a.values.shape} vs {b.values.shape}"
        )


def remove_small_regions(mask, min_area_px):
    """Drop 8-connected components of 1-pixels smaller than ``min_area_px``.

    Components with area exactly ``min_area_px`` are kept (strict <); the
    operation is idempotent.
    """
    if min_area_px < 0:
        raise ValueError(f"min_area_px must be >= 0, got {min_area_px}")
    binary = _as_binary(mask, "mask")
    if min_area_px <= 1 or not binary.any():
        return mask
    labels, count = ndimage.label(binary, structure=_STRUCTURE_8)
    areas = np.bincount(labels.ravel(), minlength=count + 1)
    small = areas < min_area_px
    small[0] = False
    out = np.where(small[labels], 0.0, mask.values)
    return mask.with_values(out)


def ndvi(nir, red):
    """Normalized difference vegetation index, (NIR - Red) / (NIR + Red).

    Pixels where the denominator is zero, or where either band is nodata,
    become NaN-nodata in the output.
    """
    _check_congruent(nir, red, "ndvi")
    n = nir.values
    r = red.values
    denom = n + r
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom == 0, np.nan, (n - r) / denom)
    bad = np.asarray(nir.is_nodata(n)) | np.asarray(red.is_nodata(r))
    out = np.where(bad, np.nan, out)
    return Raster(out, nir.geotransform, float("nan"), nir.crs)


def vegetation_mask(ndvi_raster, threshold=0.0, dilation_radius=0):
    """Binary vegetation mask: 1 where NDVI is strictly above ``threshold``.

    Nodata NDVI pixels map to 0.  ``dilation_radius`` > 0 grows the mask by
    that many pixels (8-connected) to also cover shadow fringes around
    canopies; the default applies no dilation.
    """
    vals = ndvi_raster.values
    veg = vals > threshold
    if ndvi_raster.nodata is not None:
        veg &= ~np.asarray(ndvi_raster.is_nodata(vals))
    if dilation_radius > 0:
        veg = ndimage.binary_dilation(veg, structure=_STRUCTURE_8, iterations=int(dilation_radius))
    return Raster(veg.astype(np.float64), ndvi_raster.geotransform, None, ndvi_raster.crs)


def agreement_masks(shadow_min, shadow_max, uncertainty_min, uncertainty_max, vegetation=None):
    """Combine min/max shadow masks into supervision and ignore channels.

    A pixel is supervised (with the agreed label) when both shadow masks
    carry the same value and both are certain; every other pixel is ignored.
    """
    for other, name in (
        (shadow_max, "shadow_max"),
        (uncertainty_min, "uncertainty_min"),
        (uncertainty_max, "uncertainty_max"),
    ):
        _check_congruent(shadow_min, other, f"agreement_masks({name})")
    smin = _as_binary(shadow_min, "shadow_min")
    smax = _as_binary(shadow_max, "shadow_max")
    umin = _as_binary(uncertainty_min, "uncertainty_min")
    umax = _as_binary(uncertainty_max, "uncertainty_max")

    certain_agree = (smin == smax) & ~umin & ~umax
    supervision = np.where(certain_agree, smin, False)
    ignore = ~certain_agree

    make = lambda arr: Raster(arr.astype(np.float64), shadow_min.geotransform, None, shadow_min.crs)
    return SupervisionBundle(
        shadow_min=shadow_min,
        shadow_max=shadow_max,
        supervision=make(supervision),
        ignore=make(ignore),
        vegetation=vegetation,
    )


def shadow_loss(pred, gt):
    """Shadow-supervision loss over a batch of rays.

    With lambda the fraction of ground-truth shadow rays in the batch, the
    loss is the batch mean of lambda * gt_i * (pred_i - gt_i)^2; rays with
    gt = 0 contribute nothing, so false positives are never penalized.

    Accumulation is plain left-to-right float64 so independent
    reimplementations can match it bit-for-bit.
    """
    pred = [float(v) for v in np.asarray(pred, dtype=np.float64).ravel()]
    gt = [float(v) for v in np.asarray(gt, dtype=np.float64).ravel()]
    if len(pred) != len(gt):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(gt)} labels")
    if not pred:
        raise ValueError("shadow_loss needs at least one ray")
    for v in pred:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"predictions must lie in [0, 1], got {v}")
    for v in gt:
        if v not in (0.0, 1.0):
            raise ValueError(f"ground truth must be binary, got {v}")

    n = len(gt)
    total_gt = 0.0
    for g in gt:
        total_gt += g
    lam = total_gt / n

    acc = 0.0
    for p, g in zip(pred, gt):
        d = p - g
        acc += lam * g * (d * d)
    return acc / n
