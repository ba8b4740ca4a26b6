"""Pipeline run-configuration documents (JSON)."""

import json
from dataclasses import dataclass
from typing import Optional

from .errors import ConfigError
from .raster import Crs

__all__ = ["RunConfig", "crs_from_string", "crs_to_string"]


def crs_from_string(text):
    """Parse a CRS declaration: "geographic", "pixel", or "utm:<zone><N|S>"."""
    text = str(text).strip().lower()
    if text == "geographic":
        return Crs.geographic()
    if text == "pixel":
        return Crs.pixel_only()
    if text.startswith("utm:"):
        body = text[4:].strip().upper()
        if len(body) >= 2 and body[-1] in ("N", "S") and body[:-1].isdigit():
            try:
                return Crs.utm(int(body[:-1]), body[-1])
            except ValueError as e:
                raise ConfigError(str(e)) from e
    raise ConfigError(
        f"unrecognized CRS {text!r}; expected 'geographic', 'pixel', or 'utm:<zone><N|S>'"
    )


def crs_to_string(crs):
    if crs.kind == "utm":
        return f"utm:{crs.zone}{crs.hemisphere}"
    return {"geographic": "geographic", "pixel": "pixel"}[crs.kind]


@dataclass
class RunConfig:
    """Everything one tile needs to run cast -> project -> masks.

    ``dsm_max_path`` switches on min/max agreement products;
    ``nir_path``/``red_path`` switch on the vegetation mask.
    """

    dsm_path: str
    rpc_path: str
    image_width: int
    image_height: int
    azimuth_deg: float
    elevation_deg: float
    out_shadow_dsm: str
    out_shadow_image: str
    out_uncertainty: str
    crs: str = "pixel"
    upscale: int = 4
    min_region_px: int = 50
    dsm_max_path: Optional[str] = None
    nir_path: Optional[str] = None
    red_path: Optional[str] = None
    out_supervision: Optional[str] = None
    out_ignore: Optional[str] = None
    out_vegetation: Optional[str] = None

    _REQUIRED = (
        "dsm_path", "rpc_path", "image_width", "image_height",
        "azimuth_deg", "elevation_deg",
        "out_shadow_dsm", "out_shadow_image", "out_uncertainty",
    )

    def validate(self):
        for name in ("dsm_path", "rpc_path", "out_shadow_dsm",
                     "out_shadow_image", "out_uncertainty"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must be a non-empty path")
        if self.image_width < 1 or self.image_height < 1:
            raise ConfigError(
                f"image size must be positive, got {self.image_width} x {self.image_height}"
            )
        if not 0.0 < self.elevation_deg <= 90.0:
            raise ConfigError(f"elevation_deg must be in (0, 90], got {self.elevation_deg}")
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise ConfigError(f"azimuth_deg must be in [0, 360), got {self.azimuth_deg}")
        if int(self.upscale) < 1:
            raise ConfigError(f"upscale must be >= 1, got {self.upscale}")
        if int(self.min_region_px) < 0:
            raise ConfigError(f"min_region_px must be >= 0, got {self.min_region_px}")
        if self.dsm_max_path and not (self.out_supervision and self.out_ignore):
            raise ConfigError(
                "dsm_max_path requires out_supervision and out_ignore output paths"
            )
        if bool(self.nir_path) != bool(self.red_path):
            raise ConfigError("nir_path and red_path must be given together")
        if self.nir_path and not self.out_vegetation:
            raise ConfigError("NDVI bands require an out_vegetation path")
        crs_from_string(self.crs)
        return self

    @classmethod
    def from_json_file(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as f:
                doc = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read run config {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(doc, dict):
            raise ConfigError(f"{path}: run config must be a JSON object")
        missing = [k for k in cls._REQUIRED if k not in doc]
        if missing:
            raise ConfigError(f"{path}: missing keys: {', '.join(missing)}")
        known = {f for f in cls.__dataclass_fields__ if not f.startswith("_")}
        unknown = [k for k in doc if k not in known]
        if unknown:
            raise ConfigError(f"{path}: unknown keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**doc).validate()
        except TypeError as e:
            raise ConfigError(f"{path}: {e}") from e

    def to_json_file(self, path):
        doc = {
            k: v
            for k, v in self.__dict__.items()
            if not k.startswith("_") and v is not None
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
