"""From two DSM surfaces to training supervision.

LiDAR tiles are usually aggregated twice: a per-cell minimum (erodes
buildings, drops vegetation) and a per-cell maximum (dilates buildings,
keeps canopies). Shadows computed from both only deserve trust where
they agree. This demo casts shadows from both surfaces, derives the
supervision/ignore masks, filters speckle, adds an NDVI vegetation mask,
and evaluates the shadow ray loss for a toy prediction.
"""

import numpy as np

from geoshadow import (
    Raster,
    agreement_masks,
    cast_shadows,
    ndvi,
    remove_small_regions,
    shadow_loss,
    sun_direction,
    vegetation_mask,
)


def main():
    rng = np.random.RandomState(23)
    size = 32
    ground = rng.rand(size, size) * 0.2
    building = np.zeros((size, size))
    building[8:16, 8:16] = 12.0

    dsm_min = Raster(ground + building, (0, 0, 1, -1))
    # The max surface adds street trees the min surface misses entirely.
    canopy = np.zeros((size, size))
    for _ in range(6):
        r, c = rng.randint(2, size - 2, 2)
        canopy[r - 1 : r + 2, c - 1 : c + 2] = rng.uniform(4, 8)
    dsm_max = dsm_min.with_values(dsm_min.values + canopy)

    sun = sun_direction(135.0, 35.0)
    s_min = cast_shadows(dsm_min, sun, upscale=1)
    s_max = cast_shadows(dsm_max, sun, upscale=1)

    no_unc = Raster(np.zeros((size, size)))
    bundle = agreement_masks(s_min, s_max, no_unc, no_unc)
    print(f"min-surface shadow cells : {int(s_min.values.sum())}")
    print(f"max-surface shadow cells : {int(s_max.values.sum())}")
    print(f"supervised shadow cells  : {int(bundle.supervision.values.sum())}")
    print(f"ignored (disagreement)   : {int(bundle.ignore.values.sum())}")

    cleaned = remove_small_regions(bundle.supervision, min_area_px=4)
    print(f"after speckle filter     : {int(cleaned.values.sum())}")

    # Vegetation mask from synthetic reflectance bands.
    red = Raster(np.full((size, size), 0.3))
    nir = red.with_values(red.values + (canopy > 0) * 0.4)
    veg = vegetation_mask(ndvi(nir, red))
    print(f"vegetation cells         : {int(veg.values.sum())}")

    # Ray loss: perfect on supervised rays vs missing half of them.
    gt = cleaned.values.ravel()
    perfect = gt.copy()
    sloppy = gt * (rng.rand(gt.size) > 0.5)
    print(f"loss(perfect) = {shadow_loss(perfect, gt):.6f}")
    print(f"loss(missing half) = {shadow_loss(sloppy, gt):.6f}")


if __name__ == "__main__":
    main()
