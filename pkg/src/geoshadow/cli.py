"""Batch command-line front end.

Subcommands: ``cast`` (DSM -> shadow mask), ``project`` (shadow mask ->
image coordinates through an RPC), and ``pipeline`` (a manifest of tiles,
optionally in parallel).  Exit codes: 0 success, 2 input error, 3
processing error, 4 partial pipeline failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .config import RunConfig, crs_from_string
from .errors import GeoShadowError
from .geotiff import read_geotiff, write_geotiff
from .masks import agreement_masks, ndvi, vegetation_mask
from .projection import DEFAULT_MIN_REGION_PX, finalize, project_shadows
from .raster import upsample
from .rpc_io import read_rpc
from .shadowcast import cast_shadows
from .solar import sun_direction

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PROCESSING = 3
EXIT_PARTIAL = 4


class InputError(Exception):
    """Bad flags, missing files, or unparseable inputs (exit code 2)."""


@dataclass
class TileJob:
    """One manifest entry: a tile identifier plus its run configuration."""

    tile_id: str
    config_path: str
    status: str = "pending"  # pending | done | failed
    reason: Optional[str] = None


def _load_inputs(fn):
    """Run an input-loading callable, mapping failures to InputError."""
    try:
        return fn()
    except (FileNotFoundError, IsADirectoryError, PermissionError) as e:
        raise InputError(str(e)) from e
    except (GeoShadowError, ValueError) as e:
        raise InputError(str(e)) from e


def cmd_cast(args):
    def load():
        dsm = read_geotiff(args.dsm, crs=crs_from_string(args.crs))
        sun = sun_direction(args.azimuth, args.elevation)
        return dsm, sun

    dsm, sun = _load_inputs(load)
    mask = cast_shadows(dsm, sun, upscale=args.upscale)
    write_geotiff(mask, args.out, bit_depth="uint8")
    return EXIT_OK


def cmd_project(args):
    def load():
        crs = crs_from_string(args.crs)
        dsm = read_geotiff(args.dsm, crs=crs)
        shadows = read_geotiff(args.shadows, crs=crs)
        rpc = read_rpc(args.rpc)
        return dsm, shadows, rpc

    dsm, shadows, rpc = _load_inputs(load)
    product = project_shadows(dsm, shadows, rpc, args.height, args.width)
    product = finalize(product, args.min_region)
    write_geotiff(product.shadow, args.out, bit_depth="uint8")
    write_geotiff(product.uncertainty, args.out_uncertainty, bit_depth="uint8")
    return EXIT_OK


def run_tile(config):
    """Run cast -> project -> finalize -> agreement -> ndvi for one tile."""
    crs = crs_from_string(config.crs)
    rpc = read_rpc(config.rpc_path)
    sun = sun_direction(config.azimuth_deg, config.elevation_deg)

    def cast_and_project(dsm_path):
        dsm = read_geotiff(dsm_path, crs=crs)
        s_dsm = cast_shadows(dsm, sun, upscale=config.upscale)
        product = project_shadows(
            upsample(dsm, config.upscale), s_dsm, rpc,
            config.image_height, config.image_width,
        )
        return s_dsm, finalize(product, config.min_region_px)

    s_dsm, product = cast_and_project(config.dsm_path)
    write_geotiff(s_dsm, config.out_shadow_dsm, bit_depth="uint8")
    write_geotiff(product.shadow, config.out_shadow_image, bit_depth="uint8")
    write_geotiff(product.uncertainty, config.out_uncertainty, bit_depth="uint8")

    if config.dsm_max_path:
        _, product_max = cast_and_project(config.dsm_max_path)
        bundle = agreement_masks(
            product.shadow, product_max.shadow,
            product.uncertainty, product_max.uncertainty,
        )
        write_geotiff(bundle.supervision, config.out_supervision, bit_depth="uint8")
        write_geotiff(bundle.ignore, config.out_ignore, bit_depth="uint8")

    if config.nir_path:
        nir = read_geotiff(config.nir_path)
        red = read_geotiff(config.red_path)
        veg = vegetation_mask(ndvi(nir, red))
        write_geotiff(veg, config.out_vegetation, bit_depth="uint8")


def parse_manifest(path):
    """Parse a line-oriented manifest: "<tile_id> <runconfig path>" per line.

    Config paths are resolved relative to the manifest file; '#' starts a
    comment.  Duplicate tile identifiers are rejected.
    """
    base = Path(path).parent
    jobs = []
    seen = set()
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise InputError(f"cannot read manifest {path}: {e}") from e
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected '<tile_id> <config path>'")
        tile_id, cfg_path = parts[0], parts[1].strip()
        if tile_id in seen:
            raise InputError(f"{path}:{lineno}: duplicate tile id {tile_id!r}")
        seen.add(tile_id)
        jobs.append(TileJob(tile_id, str((base / cfg_path))))
    if not jobs:
        raise InputError(f"{path}: manifest lists no tiles")
    return jobs


def _run_job(job):
    try:
        config = RunConfig.from_json_file(job.config_path)
        run_tile(config)
        job.status = "done"
    except Exception as e:  # per-tile failures must not abort the batch
        job.status = "failed"
        job.reason = str(e)
    return job


def cmd_pipeline(args):
    jobs = parse_manifest(args.manifest)
    workers = max(1, args.jobs)

    if workers == 1:
        for job in jobs:
            _run_job(job)
            print(f"[{job.status}] {job.tile_id}", file=sys.stderr)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for job in pool.map(_run_job, jobs):
                print(f"[{job.status}] {job.tile_id}", file=sys.stderr)

    width = max(len(j.tile_id) for j in jobs)
    print(f"{'tile':<{width}}  status  reason")
    for job in jobs:
        print(f"{job.tile_id:<{width}}  {job.status:<6}  {job.reason or '-'}")

    if args.summary:
        with open(args.summary, "w", encoding="utf-8") as f:
            for job in jobs:
                f.write(json.dumps(
                    {"tile": job.tile_id, "status": job.status, "reason": job.reason}
                ) + "\n")

    return EXIT_OK if all(j.status == "done" for j in jobs) else EXIT_PARTIAL


def build_parser():
    parser = argparse.ArgumentParser(
        prog="geoshadow",
        description="Generate geometric shadow masks for satellite images from a DSM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    cast = sub.add_parser("cast", help="cast shadows over a DSM")
    cast.add_argument("--dsm", required=True, help="input DSM GeoTIFF")
    cast.add_argument("--azimuth", type=float, required=True, help="sun azimuth, degrees CW from north")
    cast.add_argument("--elevation", type=float, required=True, help="sun elevation, degrees")
    cast.add_argument("--upscale", type=int, default=4, help="pre-cast DSM upscale factor (default 4)")
    cast.add_argument("--crs", default="pixel", help="DSM CRS: geographic | pixel | utm:<zone><N|S>")
    cast.add_argument("--out", required=True, help="output shadow-mask GeoTIFF")
    cast.set_defaults(func=cmd_cast)

    project = sub.add_parser("project", help="project a DSM shadow mask into image space")
    project.add_argument("--dsm", required=True, help="DSM GeoTIFF (grid of the shadow mask)")
    project.add_argument("--shadows", required=True, help="DSM-space shadow mask GeoTIFF")
    project.add_argument("--rpc", required=True, help="RPC file (RPB text or JSON)")
    project.add_argument("--width", type=int, required=True, help="image width in pixels")
    project.add_argument("--height", type=int, required=True, help="image height in pixels")
    project.add_argument("--min-region", type=int, default=DEFAULT_MIN_REGION_PX,
                         help="drop shadow components smaller than this many pixels")
    project.add_argument("--crs", default="pixel", help="DSM CRS: geographic | pixel | utm:<zone><N|S>")
    project.add_argument("--out", required=True, help="output image-space shadow mask")
    project.add_argument("--out-uncertainty", required=True, help="output uncertainty mask")
    project.set_defaults(func=cmd_project)

    pipeline = sub.add_parser("pipeline", help="run a manifest of tiles")
    pipeline.add_argument("--manifest", required=True, help="manifest file of tile jobs")
    pipeline.add_argument("--jobs", type=int,
                          default=int(os.environ.get("GEOSHADOW_JOBS", "1")),
                          help="concurrent tiles (default $GEOSHADOW_JOBS or 1)")
    pipeline.add_argument("--summary", help="write one JSON object per tile to this file")
    pipeline.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"geoshadow: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (GeoShadowError, ValueError, OSError) as e:
        print(f"geoshadow: {e}", file=sys.stderr)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
