"""Shared fixtures: synthetic RPC models and small raster builders."""

import numpy as np
import pytest

from geoshadow import Crs, Raster, RpcModel


def make_identity_rpc(samp_off=0.0, samp_scale=1.0, line_off=0.0, line_scale=1.0):
    """RPC whose projection is sample = lon, line = lat (up to the affine
    output normalization): samp_num carries only the L term, line_num only
    the P term, denominators are the constant 1."""
    samp_num = np.zeros(20)
    samp_num[1] = 1.0  # L
    line_num = np.zeros(20)
    line_num[2] = 1.0  # P
    den = np.zeros(20)
    den[0] = 1.0
    return RpcModel(
        line_num=line_num, line_den=den.copy(),
        samp_num=samp_num, samp_den=den.copy(),
        lat_off=0.0, lat_scale=1.0, lon_off=0.0, lon_scale=1.0,
        height_off=0.0, height_scale=1.0,
        line_off=line_off, line_scale=line_scale,
        samp_off=samp_off, samp_scale=samp_scale,
    )


def make_synthetic_rpc(rng, cross_term_scale=0.05):
    """Well-conditioned camera: identity-like leading terms plus small
    random cross terms, denominators close to 1."""
    samp_num = np.zeros(20)
    samp_num[1] = 1.0
    line_num = np.zeros(20)
    line_num[2] = 1.0
    samp_num += rng.uniform(-cross_term_scale, cross_term_scale, 20)
    line_num += rng.uniform(-cross_term_scale, cross_term_scale, 20)

    def den():
        d = np.zeros(20)
        d[0] = 1.0
        d[1:] = rng.uniform(-0.01, 0.01, 19)
        return d

    return RpcModel(
        line_num=line_num, line_den=den(), samp_num=samp_num, samp_den=den(),
        lat_off=32.7, lat_scale=0.04, lon_off=-117.1, lon_scale=0.04,
        height_off=40.0, height_scale=500.0,
        line_off=5000.0, line_scale=5000.0,
        samp_off=5000.0, samp_scale=5000.0,
    )


def grid_rpc(origin_lon, origin_lat, step_deg, rows):
    """Camera aligned 1:1 with a geographic DSM grid: DSM cell (col, row)
    projects exactly to image pixel (col, row)."""
    samp_num = np.zeros(20)
    samp_num[1] = 1.0
    line_num = np.zeros(20)
    line_num[2] = -1.0  # latitude decreases with row on a north-up grid
    den = np.zeros(20)
    den[0] = 1.0
    return RpcModel(
        line_num=line_num, line_den=den.copy(),
        samp_num=samp_num, samp_den=den.copy(),
        lat_off=origin_lat, lat_scale=step_deg * rows,
        lon_off=origin_lon, lon_scale=step_deg * rows,
        height_off=0.0, height_scale=1000.0,
        line_off=0.0, line_scale=rows,
        samp_off=0.0, samp_scale=rows,
    )


def geo_raster(values, origin_lon=-117.1, origin_lat=32.7, step_deg=1e-5, nodata=None):
    values = np.asarray(values, dtype=np.float64)
    return Raster(values, (origin_lon, origin_lat, step_deg, -step_deg), nodata,
                  Crs.geographic())


@pytest.fixture
def rng():
    return np.random.RandomState(20260824)
