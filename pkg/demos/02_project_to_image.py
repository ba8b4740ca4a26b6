"""Project a DSM-space shadow mask into satellite image coordinates.

Builds a UTM-georeferenced DSM, casts shadows, then pushes the mask
through a synthetic RPC camera with the z-buffer projection. Shows the
uncertainty mask (image pixels no DSM cell reached) and the inverse
mapping (localization) for a handful of pixels.
"""

import numpy as np

from geoshadow import (
    Crs,
    Raster,
    RpcModel,
    cast_shadows,
    localize,
    project_shadows,
    sun_direction,
    utm_to_geographic,
)

ZONE, HEMI = 11, "N"
ORIGIN_E, ORIGIN_N = 510000.0, 3620000.0
SIZE, RES = 32, 1.0
IMAGE = 48


def grid_camera():
    """RPC aligned with the tile: sample grows east, line grows south."""
    lon0, lat0 = utm_to_geographic(ORIGIN_E, ORIGIN_N, ZONE, HEMI)
    lon1, lat1 = utm_to_geographic(ORIGIN_E + SIZE * RES, ORIGIN_N - SIZE * RES,
                                   ZONE, HEMI)
    samp_num = np.zeros(20)
    samp_num[1] = 1.0
    line_num = np.zeros(20)
    line_num[2] = -1.0
    den = np.zeros(20)
    den[0] = 1.0
    return RpcModel(
        line_num=line_num, line_den=den.copy(),
        samp_num=samp_num, samp_den=den.copy(),
        lat_off=lat0, lat_scale=lat0 - lat1,
        lon_off=lon0, lon_scale=lon1 - lon0,
        height_off=5.0, height_scale=100.0,
        line_off=0.0, line_scale=IMAGE, samp_off=0.0, samp_scale=IMAGE,
    )


def main():
    rng = np.random.RandomState(11)
    z = rng.rand(SIZE, SIZE)
    z[10:18, 10:18] += 20.0
    dsm = Raster(z, (ORIGIN_E, ORIGIN_N, RES, -RES), None, Crs.utm(ZONE, HEMI))

    sun = sun_direction(225.0, 40.0)
    s_dsm = cast_shadows(dsm, sun, upscale=1)
    print(f"{int(s_dsm.values.sum())} of {SIZE * SIZE} DSM cells in shadow")

    rpc = grid_camera()
    product = project_shadows(dsm, s_dsm, rpc, IMAGE, IMAGE)
    n_shadow = int(product.shadow.values.sum())
    n_unknown = int(product.uncertainty.values.sum())
    print(f"image {IMAGE}x{IMAGE}: {n_shadow} shadow px, {n_unknown} uncertain px")

    # Round-trip a few image pixels back to the ground at their height.
    samples = np.array([5.0, 20.0, 40.0])
    lines = np.array([5.0, 20.0, 40.0])
    lon, lat = localize(rpc, samples, lines, np.zeros(3))
    for s, l, lo, la in zip(samples, lines, lon, lat):
        print(f"  pixel ({s:4.1f}, {l:4.1f}) -> lon {lo:.6f}, lat {la:.6f}")


if __name__ == "__main__":
    main()
