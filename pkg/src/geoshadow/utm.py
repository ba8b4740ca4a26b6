"""UTM <-> geographic conversion on the WGS84 ellipsoid.

Transverse Mercator via 6th-order Krueger series in the third flattening;
accuracy is well below 1 mm anywhere inside a UTM zone.  Both directions are
provided so metric DSM grids can feed geographic RPC models and so tests can
close the round trip.  All functions accept scalars or numpy arrays.
"""

import math

import numpy as np

__all__ = ["utm_to_geographic", "geographic_to_utm"]

_A_RADIUS = 6378137.0
_FLATTENING = 1.0 / 298.257223563
_K0 = 0.9996
_FALSE_EASTING = 500000.0
_FALSE_NORTHING_SOUTH = 10000000.0

_N = _FLATTENING / (2.0 - _FLATTENING)
_N2 = _N * _N
_N3 = _N2 * _N
_N4 = _N3 * _N
_N5 = _N4 * _N
_N6 = _N5 * _N

# Rectifying radius.
_A_RECT = _A_RADIUS / (1.0 + _N) * (1.0 + _N2 / 4.0 + _N4 / 64.0 + _N6 / 256.0)

_ALPHA = (
    _N / 2.0 - 2.0 / 3.0 * _N2 + 5.0 / 16.0 * _N3 + 41.0 / 180.0 * _N4
    - 127.0 / 288.0 * _N5 + 7891.0 / 37800.0 * _N6,
    13.0 / 48.0 * _N2 - 3.0 / 5.0 * _N3 + 557.0 / 1440.0 * _N4
    + 281.0 / 630.0 * _N5 - 1983433.0 / 1935360.0 * _N6,
    61.0 / 240.0 * _N3 - 103.0 / 140.0 * _N4 + 15061.0 / 26880.0 * _N5
    + 167603.0 / 181440.0 * _N6,
    49561.0 / 161280.0 * _N4 - 179.0 / 168.0 * _N5 + 6601661.0 / 7257600.0 * _N6,
    34729.0 / 80640.0 * _N5 - 3418889.0 / 1995840.0 * _N6,
    212378941.0 / 319334400.0 * _N6,
)

_BETA = (
    _N / 2.0 - 2.0 / 3.0 * _N2 + 37.0 / 96.0 * _N3 - 1.0 / 360.0 * _N4
    - 81.0 / 512.0 * _N5 + 96199.0 / 604800.0 * _N6,
    1.0 / 48.0 * _N2 + 1.0 / 15.0 * _N3 - 437.0 / 1440.0 * _N4
    + 46.0 / 105.0 * _N5 - 1118711.0 / 3870720.0 * _N6,
    17.0 / 480.0 * _N3 - 37.0 / 840.0 * _N4 - 209.0 / 4480.0 * _N5
    + 5569.0 / 90720.0 * _N6,
    4397.0 / 161280.0 * _N4 - 11.0 / 504.0 * _N5 - 830251.0 / 7257600.0 * _N6,
    4583.0 / 161280.0 * _N5 - 108847.0 / 3991680.0 * _N6,
    20648693.0 / 638668800.0 * _N6,
)

_DELTA = (
    2.0 * _N - 2.0 / 3.0 * _N2 - 2.0 * _N3 + 116.0 / 45.0 * _N4
    + 26.0 / 45.0 * _N5 - 2854.0 / 675.0 * _N6,
    7.0 / 3.0 * _N2 - 8.0 / 5.0 * _N3 - 227.0 / 45.0 * _N4
    + 2704.0 / 315.0 * _N5 + 2323.0 / 945.0 * _N6,
    56.0 / 15.0 * _N3 - 136.0 / 35.0 * _N4 - 1262.0 / 105.0 * _N5
    + 73814.0 / 2835.0 * _N6,
    4279.0 / 630.0 * _N4 - 332.0 / 35.0 * _N5 - 399572.0 / 14175.0 * _N6,
    4174.0 / 315.0 * _N5 - 144838.0 / 6237.0 * _N6,
    601676.0 / 22275.0 * _N6,
)


def _validate_zone(zone, hemisphere):
    if not 1 <= int(zone) <= 60:
        raise ValueError(f"UTM zone must be in 1..60, got {zone}")
    hemisphere = str(hemisphere).upper()
    if hemisphere not in ("N", "S"):
        raise ValueError(f"hemisphere must be 'N' or 'S', got {hemisphere!r}")
    return int(zone), hemisphere


def _central_meridian_deg(zone):
    return zone * 6.0 - 183.0


def utm_to_geographic(easting, northing, zone, hemisphere):
    """Convert UTM easting/northing (meters) to (lon_deg, lat_deg).

    Raises:
        ValueError: for an invalid zone/hemisphere or coordinates outside
            the conventional in-zone ranges.
    """
    zone, hemisphere = _validate_zone(zone, hemisphere)
    scalar = np.ndim(easting) == 0 and np.ndim(northing) == 0
    easting = np.asarray(easting, dtype=np.float64)
    northing = np.asarray(northing, dtype=np.float64)
    if np.any(easting < 100000.0) or np.any(easting > 900000.0):
        raise ValueError("easting outside the in-zone range [100000, 900000] m")
    if np.any(northing < 0.0) or np.any(northing > 10000000.0):
        raise ValueError("northing outside [0, 10000000] m")

    false_northing = _FALSE_NORTHING_SOUTH if hemisphere == "S" else 0.0
    xi = (northing - false_northing) / (_K0 * _A_RECT)
    eta = (easting - _FALSE_EASTING) / (_K0 * _A_RECT)

    xi_p = xi.copy()
    eta_p = eta.copy()
    for j, b in enumerate(_BETA, start=1):
        xi_p -= b * np.sin(2 * j * xi) * np.cosh(2 * j * eta)
        eta_p -= b * np.cos(2 * j * xi) * np.sinh(2 * j * eta)

    chi = np.arcsin(np.sin(xi_p) / np.cosh(eta_p))
    lat = chi.copy()
    for j, d in enumerate(_DELTA, start=1):
        lat += d * np.sin(2 * j * chi)
    lon = np.arctan2(np.sinh(eta_p), np.cos(xi_p))

    lon_deg = np.degrees(lon) + _central_meridian_deg(zone)
    lat_deg = np.degrees(lat)
    if scalar:
        return float(lon_deg), float(lat_deg)
    return lon_deg, lat_deg


def geographic_to_utm(lon_deg, lat_deg, zone, hemisphere):
    """Convert (lon_deg, lat_deg) to UTM easting/northing in a given zone."""
    zone, hemisphere = _validate_zone(zone, hemisphere)
    scalar = np.ndim(lon_deg) == 0 and np.ndim(lat_deg) == 0
    lon = np.radians(np.asarray(lon_deg, dtype=np.float64) - _central_meridian_deg(zone))
    lat = np.radians(np.asarray(lat_deg, dtype=np.float64))

    e2n = 2.0 * math.sqrt(_N) / (1.0 + _N)
    sin_lat = np.sin(lat)
    t = np.sinh(np.arctanh(sin_lat) - e2n * np.arctanh(e2n * sin_lat))
    xi_p = np.arctan2(t, np.cos(lon))
    eta_p = np.arcsinh(np.sin(lon) / np.sqrt(t * t + np.cos(lon) ** 2))

    xi = xi_p.copy()
    eta = eta_p.copy()
    for j, a in enumerate(_ALPHA, start=1):
        xi += a * np.sin(2 * j * xi_p) * np.cosh(2 * j * eta_p)
        eta += a * np.cos(2 * j * xi_p) * np.sinh(2 * j * eta_p)

    false_northing = _FALSE_NORTHING_SOUTH if hemisphere == "S" else 0.0
    easting = _FALSE_EASTING + _K0 * _A_RECT * eta
    northing = false_northing + _K0 * _A_RECT * xi
    if scalar:
        return float(easting), float(northing)
    return easting, northing
