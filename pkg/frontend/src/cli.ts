/** Shadow casting and projection via the geoshadow command-line tool.
 *
 * These two operations carry the heavy numerics, so instead of porting
 * them the binding shells out to the installed `geoshadow` CLI and
 * exchanges GeoTIFF files through a temporary directory. Results are
 * therefore bit-identical to the pipeline by construction. */

import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { readGeoTiff, writeGeoTiff } from "./geotiff.js";
import { GeoShadowError, Grid, checkCongruent, checkGrid } from "./grid.js";

const CLI = process.env.GEOSHADOW_BIN ?? "geoshadow";

export interface RpcModel {
  line_off: number;
  samp_off: number;
  lat_off: number;
  lon_off: number;
  height_off: number;
  line_scale: number;
  samp_scale: number;
  lat_scale: number;
  lon_scale: number;
  height_scale: number;
  line_num_coeff: number[];
  line_den_coeff: number[];
  samp_num_coeff: number[];
  samp_den_coeff: number[];
}

function runCli(args: string[]): void {
  const proc = spawnSync(CLI, args, { encoding: "utf-8" });
  if (proc.error) {
    throw new GeoShadowError(`failed to launch ${CLI}: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    const stderr = (proc.stderr ?? "").trim();
    throw new GeoShadowError(`${CLI} ${args[0]} exited with ${proc.status}: ${stderr}`);
  }
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "geoshadow-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

export interface CastOptions {
  upscale?: number;
  crs?: string;
}

/** Cast shadows over a DSM grid; returns the (possibly upsampled) binary
 * shadow mask with its geotransform. */
export function castShadows(
  dsm: Grid,
  azimuthDeg: number,
  elevationDeg: number,
  options: CastOptions = {},
): Grid {
  checkGrid(dsm, "dsm");
  const upscale = options.upscale ?? 4;
  return withTempDir((dir) => {
    const dsmPath = join(dir, "dsm.tif");
    const outPath = join(dir, "mask.tif");
    writeGeoTiff(dsm, dsmPath, "float64");
    runCli([
      "cast",
      "--dsm", dsmPath,
      "--azimuth", String(azimuthDeg),
      "--elevation", String(elevationDeg),
      "--upscale", String(upscale),
      "--crs", options.crs ?? "pixel",
      "--out", outPath,
    ]);
    return readGeoTiff(outPath);
  });
}

export interface ProjectOptions {
  minRegionPx?: number;
  crs?: string;
}

export interface ShadowProduct {
  shadow: Grid;
  uncertainty: Grid;
}

/** Project a DSM-space shadow mask into image pixels through an RPC
 * camera; returns the image-space shadow and uncertainty masks. */
export function projectShadows(
  dsm: Grid,
  shadows: Grid,
  rpc: RpcModel,
  imageWidth: number,
  imageHeight: number,
  options: ProjectOptions = {},
): ShadowProduct {
  checkGrid(dsm, "dsm");
  checkGrid(shadows, "shadows");
  checkCongruent(dsm, shadows, "projectShadows");
  if (!Number.isInteger(imageWidth) || !Number.isInteger(imageHeight) || imageWidth < 1 || imageHeight < 1) {
    throw new GeoShadowError(`image size must be positive integers, got ${imageWidth} x ${imageHeight}`);
  }
  return withTempDir((dir) => {
    const dsmPath = join(dir, "dsm.tif");
    const shadowPath = join(dir, "shadows.tif");
    const rpcPath = join(dir, "camera.json");
    const outPath = join(dir, "s_img.tif");
    const uncPath = join(dir, "unc.tif");
    writeGeoTiff(dsm, dsmPath, "float64");
    writeGeoTiff(shadows, shadowPath, "uint8");
    writeFileSync(rpcPath, JSON.stringify(rpc));
    runCli([
      "project",
      "--dsm", dsmPath,
      "--shadows", shadowPath,
      "--rpc", rpcPath,
      "--width", String(imageWidth),
      "--height", String(imageHeight),
      "--min-region", String(options.minRegionPx ?? 50),
      // projection needs world coordinates; grids default to lon/lat
      "--crs", options.crs ?? "geographic",
      "--out", outPath,
      "--out-uncertainty", uncPath,
    ]);
    return { shadow: readGeoTiff(outPath), uncertainty: readGeoTiff(uncPath) };
  });
}
