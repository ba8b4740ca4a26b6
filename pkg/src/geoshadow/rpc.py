"""Rational Polynomial Coefficient camera model.

Forward projection maps geographic (lon, lat, height) to image (sample,
line) through ratios of 20-term cubic polynomials over normalized
coordinates (RPC00B term ordering).  Localization inverts the projection at
a known height with Newton iterations and a finite-difference Jacobian.
All entry points accept scalars or numpy arrays.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import LocalizationError, SingularCameraError

__all__ = ["RpcModel", "eval_rational", "localize", "NUM_COEFFS"]

NUM_COEFFS = 20

# RPC00B monomial exponents (L, P, H) for coefficients 0..19.
TERM_EXPONENTS = (
    (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (1, 1, 0), (1, 0, 1), (0, 1, 1), (2, 0, 0),
    (0, 2, 0), (0, 0, 2), (1, 1, 1), (3, 0, 0),
    (1, 2, 0), (1, 0, 2), (2, 1, 0), (0, 3, 0),
    (0, 1, 2), (2, 0, 1), (0, 2, 1), (0, 0, 3),
)


@dataclass(frozen=True)
class RpcModel:
    """RPC00B camera: four 20-coefficient cubic rationals plus normalization.

    Coefficient vectors follow the RPC00B term ordering over normalized
    longitude L, latitude P and height H.  All scale fields must be strictly
    positive and both denominators need a nonzero constant term.
    """

    line_num: np.ndarray
    line_den: np.ndarray
    samp_num: np.ndarray
    samp_den: np.ndarray
    lat_off: float
    lat_scale: float
    lon_off: float
    lon_scale: float
    height_off: float
    height_scale: float
    line_off: float
    line_scale: float
    samp_off: float
    samp_scale: float

    def __post_init__(self):
        for name in ("line_num", "line_den", "samp_num", "samp_den"):
            c = np.asarray(getattr(self, name), dtype=np.float64)
            if c.shape != (NUM_COEFFS,):
                raise ValueError(f"{name} must have {NUM_COEFFS} coefficients, got shape {c.shape}")
            c.setflags(write=False)
            object.__setattr__(self, name, c)
        for name in ("lat_scale", "lon_scale", "height_scale", "line_scale", "samp_scale"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.line_den[0] == 0 or self.samp_den[0] == 0:
            raise ValueError("denominator constant term must be nonzero")


def _poly(coef, L, P, H):
    """Evaluate one 20-term cubic polynomial with grouped products."""
    c = coef
    LL, PP, HH = L * L, P * P, H * H
    return (
        c[0]
        + c[1] * L + c[2] * P + c[3] * H
        + c[4] * L * P + c[5] * L * H + c[6] * P * H
        + c[7] * LL + c[8] * PP + c[9] * HH
        + c[10] * L * P * H
        + c[11] * LL * L + c[12] * L * PP + c[13] * L * HH
        + c[14] * LL * P + c[15] * PP * P + c[16] * P * HH
        + c[17] * LL * H + c[18] * PP * H + c[19] * HH * H
    )


def eval_rational(model, lon, lat, height):
    """Project ground coordinates to image (sample, line) in pixels.

    Coordinates are normalized with the model offsets/scales before the
    rational polynomials are evaluated; a warning is emitted when any
    normalized coordinate leaves the soft validity box |.| <= 1.5.

    Raises:
        SingularCameraError: if a denominator magnitude drops below 1e-10.
    """
    L = (np.asarray(lon, dtype=np.float64) - model.lon_off) / model.lon_scale
    P = (np.asarray(lat, dtype=np.float64) - model.lat_off) / model.lat_scale
    H = (np.asarray(height, dtype=np.float64) - model.height_off) / model.height_scale

    if np.any(np.abs(L) > 1.5) or np.any(np.abs(P) > 1.5) or np.any(np.abs(H) > 1.5):
        warnings.warn("RPC evaluated outside its normalized validity box", stacklevel=2)

    samp_den = _poly(model.samp_den, L, P, H)
    line_den = _poly(model.line_den, L, P, H)
    if np.any(np.abs(samp_den) < 1e-10) or np.any(np.abs(line_den) < 1e-10):
        raise SingularCameraError("RPC denominator vanished (|den| < 1e-10)")

    sample = model.samp_off + model.samp_scale * (_poly(model.samp_num, L, P, H) / samp_den)
    line = model.line_off + model.line_scale * (_poly(model.line_num, L, P, H) / line_den)
    if np.ndim(lon) == 0 and np.ndim(lat) == 0 and np.ndim(height) == 0:
        return float(sample), float(line)
    return sample, line


def localize(model, sample, line, height, tol=1e-9, max_iter=50, full_output=False):
    """Invert the projection at a known height: image (sample, line) -> (lon, lat).

    Newton iterations start at (lon_off, lat_off); the 2x2 Jacobian is
    estimated by central finite differences with a step of 1e-7 normalized
    units.  Iterates until the reprojection residual falls below ``tol``
    pixels (default 1e-9) or ``max_iter`` iterations.

    With ``full_output=True`` also returns the per-point iteration count.

    Raises:
        LocalizationError: on non-convergence or a singular Jacobian.
    """
    scalar = np.ndim(sample) == 0 and np.ndim(line) == 0
    sample = np.atleast_1d(np.asarray(sample, dtype=np.float64))
    line = np.atleast_1d(np.asarray(line, dtype=np.float64))
    height = np.broadcast_to(np.asarray(height, dtype=np.float64), sample.shape)

    lon = np.full(sample.shape, model.lon_off)
    lat = np.full(sample.shape, model.lat_off)
    iters = np.zeros(sample.shape, dtype=np.intp)
    d_lon = 1e-7 * model.lon_scale
    d_lat = 1e-7 * model.lat_scale

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        residual = np.full(sample.shape, np.inf)
        for it in range(max_iter):
            s, l = eval_rational(model, lon, lat, height)
            rs = s - sample
            rl = l - line
            residual = np.sqrt(rs * rs + rl * rl)
            active = residual >= tol
            iters = np.where(active, it + 1, iters)
            if not active.any():
                break

            sp, lp = eval_rational(model, lon + d_lon, lat, height)
            sm, lm = eval_rational(model, lon - d_lon, lat, height)
            j00 = (sp - sm) / (2 * d_lon)  # d sample / d lon
            j10 = (lp - lm) / (2 * d_lon)  # d line   / d lon
            sp, lp = eval_rational(model, lon, lat + d_lat, height)
            sm, lm = eval_rational(model, lon, lat - d_lat, height)
            j01 = (sp - sm) / (2 * d_lat)
            j11 = (lp - lm) / (2 * d_lat)

            det = j00 * j11 - j01 * j10
            if np.any(np.abs(det[active]) < 1e-15):
                raise LocalizationError("singular Jacobian during localization")
            dlon = (j11 * rs - j01 * rl) / det
            dlat = (-j10 * rs + j00 * rl) / det
            lon = np.where(active, lon - dlon, lon)
            lat = np.where(active, lat - dlat, lat)
        else:
            s, l = eval_rational(model, lon, lat, height)
            residual = np.sqrt((s - sample) ** 2 + (l - line) ** 2)

    if np.any(residual >= tol):
        worst = float(np.max(residual))
        raise LocalizationError(
            f"localization did not converge in {max_iter} iterations "
            f"(worst residual {worst:.3e} px)",
            residual=worst,
        )

    if scalar:
        out = (float(lon[0]), float(lat[0]))
        return (*out, int(iters[0])) if full_output else out
    return (lon, lat, iters) if full_output else (lon, lat)
