"""Sun geometry: azimuth/elevation to shadow-march direction and ray slope.

Azimuth is measured clockwise from grid north.  Array axes follow the raster
convention: x = column increasing eastward, y = row increasing southward.
Under that convention the unit-ish vector (p, q) points in the direction
shadows extend (away from the sun) and ``a`` is the vertical drop of a sun
ray per unit of horizontal travel.
"""

import math
from dataclasses import dataclass

__all__ = ["SunGeometry", "sun_direction"]


@dataclass(frozen=True)
class SunGeometry:
    """Sun position plus the derived shadow-march components.

    Attributes:
        azimuth_deg: degrees clockwise from grid north.
        elevation_deg: degrees above the horizon, in (0, 90].
        p: column-axis component of the shadow march direction.
        q: row-axis component of the shadow march direction.
        a: tan(elevation); +inf at zenith (no shadows possible).
    """

    azimuth_deg: float
    elevation_deg: float
    p: float
    q: float
    a: float

    @property
    def zenith(self):
        return self.elevation_deg == 90.0


def sun_direction(azimuth_deg, elevation_deg):
    """Build a :class:`SunGeometry` from sun angles in degrees.

    p = -sin(azimuth) * cos(elevation), q = cos(azimuth) * cos(elevation),
    a = tan(elevation).  Elevation 90 is a degenerate fast path with
    p = q = 0 and a = +inf.

    Raises:
        ValueError: if elevation is outside (0, 90].
    """
    azimuth_deg = float(azimuth_deg)
    elevation_deg = float(elevation_deg)
    if not 0.0 < elevation_deg <= 90.0:
        raise ValueError(
            f"sun elevation must be in (0, 90] degrees, got {elevation_deg}"
        )
    if elevation_deg == 90.0:
        return SunGeometry(azimuth_deg, 90.0, 0.0, 0.0, math.inf)
    alpha = math.radians(azimuth_deg)
    beta = math.radians(elevation_deg)
    sin_b = math.sin(beta)
    cos_b = math.cos(beta)
    p = -math.sin(alpha) * cos_b
    q = math.cos(alpha) * cos_b
    # sin/cos keeps tan(45 deg) exactly 1, so the strict d < l boundary
    # behaves as the closed-form shadow length predicts.
    return SunGeometry(azimuth_deg, elevation_deg, p, q, sin_b / cos_b)
