"""Regenerate the cross-implementation fixture corpus (fixtures.json).

Every expected value is produced by the Python package, serialized with
full float64 precision (NaN encoded as null), and compared bit-for-bit
by the TypeScript test suite. Run from this directory:

    python3 generate.py
"""

import json
from pathlib import Path

import numpy as np

from geoshadow import (
    Crs,
    Raster,
    agreement_masks,
    cast_shadows,
    finalize,
    ndvi,
    project_shadows,
    remove_small_regions,
    shadow_loss,
    sun_direction,
)
from geoshadow.rpc import RpcModel

HERE = Path(__file__).resolve().parent
SEED = 424242


def grid(values):
    """Nested-list encoding; NaN becomes null (JSON has no NaN)."""
    out = []
    for row in np.asarray(values, dtype=np.float64):
        out.append([None if np.isnan(v) else float(v) for v in row])
    return out


def region_cases(rng):
    cases = []
    for shape, density, threshold in [
        ((12, 12), 0.3, 4),
        ((20, 20), 0.45, 8),
        ((16, 24), 0.2, 3),
        ((9, 9), 0.6, 10),
        ((15, 15), 0.35, 1),
    ]:
        mask = (rng.rand(*shape) < density).astype(np.float64)
        out = remove_small_regions(Raster(mask), threshold)
        cases.append({
            "mask": grid(mask),
            "min_area_px": threshold,
            "expected": grid(out.values),
        })
    return cases


def agreement_cases(rng):
    cases = []
    for _ in range(5):
        shape = (rng.randint(4, 12), rng.randint(4, 12))
        mk = lambda: (rng.rand(*shape) < 0.5).astype(np.float64)
        smin, smax, umin, umax = mk(), mk(), mk(), mk()
        bundle = agreement_masks(Raster(smin), Raster(smax), Raster(umin), Raster(umax))
        cases.append({
            "shadow_min": grid(smin), "shadow_max": grid(smax),
            "uncertainty_min": grid(umin), "uncertainty_max": grid(umax),
            "supervision": grid(bundle.supervision.values),
            "ignore": grid(bundle.ignore.values),
        })
    return cases


def ndvi_cases(rng):
    cases = []
    for _ in range(4):
        shape = (rng.randint(3, 9), rng.randint(3, 9))
        nir = rng.rand(*shape) * 0.8
        red = rng.rand(*shape) * 0.6
        nir[0, 0] = 0.0
        red[0, 0] = 0.0  # zero denominator
        nodata = -9999.0
        nir[-1, -1] = nodata
        out = ndvi(Raster(nir, nodata=nodata), Raster(red))
        cases.append({
            "nir": grid(nir), "red": grid(red), "nir_nodata": nodata,
            "expected": grid(out.values),
        })
    return cases


def loss_cases(rng):
    cases = [
        {"pred": [0.0] * 10, "gt": [1.0] * 3 + [0.0] * 7},   # worked example: 0.09
        {"pred": [1.0, 0.0, 1.0, 0.0], "gt": [1.0, 0.0, 1.0, 0.0]},
        {"pred": [0.4, 0.9, 0.1], "gt": [0.0, 0.0, 0.0]},
    ]
    for _ in range(5):
        n = rng.randint(1, 40)
        cases.append({
            "pred": [float(v) for v in rng.rand(n)],
            "gt": [float(v) for v in (rng.rand(n) < 0.4)],
        })
    for case in cases:
        case["expected"] = shadow_loss(case["pred"], case["gt"])
    return cases


def cast_cases(rng):
    cases = []
    scenes = []
    flat = np.zeros((16, 16))
    scenes.append((flat, 135.0, 40.0, 1))
    pillar = rng.rand(20, 20) * 0.2
    pillar[6:9, 6:9] += 12.0
    scenes.append((pillar, 270.0, 45.0, 1))
    rough = rng.rand(12, 12) * 8.0
    scenes.append((rough, 210.0, 30.0, 2))
    for z, az, el, upscale in scenes:
        dsm = Raster(z, (0.0, 0.0, 1.0, -1.0))
        mask = cast_shadows(dsm, sun_direction(az, el), upscale=upscale)
        cases.append({
            "dsm": grid(z), "geotransform": [0.0, 0.0, 1.0, -1.0],
            "azimuth": az, "elevation": el, "upscale": upscale,
            "expected": grid(mask.values),
            "expected_geotransform": list(mask.geotransform),
        })
    return cases


def project_cases(rng):
    size = 12
    step = 1e-5
    z = rng.rand(size, size) * 0.3
    z[3:6, 3:6] += 15.0
    gt = (-117.1, 32.7, step, -step)
    dsm = Raster(z, gt, None, Crs.geographic())
    s_dsm = cast_shadows(dsm, sun_direction(135.0, 35.0), upscale=1)

    samp_num = np.zeros(20)
    samp_num[1] = 1.0
    line_num = np.zeros(20)
    line_num[2] = -1.0
    den = np.zeros(20)
    den[0] = 1.0
    rpc = RpcModel(
        line_num=line_num, line_den=den.copy(),
        samp_num=samp_num, samp_den=den.copy(),
        lat_off=32.7, lat_scale=step * size, lon_off=-117.1, lon_scale=step * size,
        height_off=0.0, height_scale=1000.0,
        line_off=0.0, line_scale=size, samp_off=0.0, samp_scale=size,
    )
    cases = []
    for image, min_region in [(size, 0), (size * 2, 2)]:
        product = finalize(project_shadows(dsm, s_dsm, rpc, image, image), min_region)
        cases.append({
            "dsm": grid(z), "geotransform": list(gt),
            "shadows": grid(s_dsm.values),
            "rpc": {
                "line_off": 0.0, "samp_off": 0.0,
                "lat_off": 32.7, "lon_off": -117.1, "height_off": 0.0,
                "line_scale": float(size), "samp_scale": float(size),
                "lat_scale": step * size, "lon_scale": step * size,
                "height_scale": 1000.0,
                "line_num_coeff": [float(v) for v in line_num],
                "line_den_coeff": [float(v) for v in den],
                "samp_num_coeff": [float(v) for v in samp_num],
                "samp_den_coeff": [float(v) for v in den],
            },
            "image_width": image, "image_height": image,
            "min_region_px": min_region,
            "expected_shadow": grid(product.shadow.values),
            "expected_uncertainty": grid(product.uncertainty.values),
        })
    return cases


def main():
    rng = np.random.RandomState(SEED)
    doc = {
        "remove_small_regions": region_cases(rng),
        "agreement_masks": agreement_cases(rng),
        "ndvi": ndvi_cases(rng),
        "shadow_loss": loss_cases(rng),
        "cast_shadows": cast_cases(rng),
        "project_shadows": project_cases(rng),
    }
    with open(HERE / "fixtures.json", "w", encoding="utf-8") as f:
        json.dump(doc, f)
        f.write("\n")
    print("wrote", HERE / "fixtures.json")


if __name__ == "__main__":
    main()
