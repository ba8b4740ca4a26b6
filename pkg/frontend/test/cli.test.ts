import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import {
  GeoShadowError,
  castShadows,
  makeGrid,
  projectShadows,
  readGeoTiff,
  writeGeoTiff,
} from "../src/index.js";
import { fixtures, sameBits, toGrid } from "./helpers.js";

const scratch = mkdtempSync(join(tmpdir(), "geoshadow-test-"));
afterAll(() => rmSync(scratch, { recursive: true, force: true }));

describe("geotiff round trip", () => {
  it("float64 values and geotransform survive bit-exactly", () => {
    const grid = makeGrid([[1.25, -3.5e-7], [Math.PI, 42113.0]]);
    grid.geotransform = [12.5, -3.5, 0.5, -0.5];
    grid.nodata = -9999;
    const path = join(scratch, "rt.tif");
    writeGeoTiff(grid, path);
    const back = readGeoTiff(path);
    expect(sameBits(back, grid)).toBe(true);
    expect(back.geotransform).toEqual(grid.geotransform);
    expect(back.nodata).toBe(-9999);
  });

  it("rejects garbage input with a typed error", () => {
    expect(() => readGeoTiff("/dev/null")).toThrow(GeoShadowError);
  });
});

describe("castShadows (via CLI)", () => {
  it("matches the pipeline output on every fixture", () => {
    for (const c of fixtures.cast_shadows) {
      const dsm = toGrid(c.dsm);
      dsm.geotransform = c.geotransform;
      const mask = castShadows(dsm, c.azimuth, c.elevation, { upscale: c.upscale });
      expect(sameBits(mask, toGrid(c.expected))).toBe(true);
      expect(mask.geotransform).toEqual(c.expected_geotransform);
    }
  });

  it("flat DSM yields an all-zero mask in under a second", () => {
    const start = performance.now();
    const mask = castShadows(makeGrid(new Float64Array(256), 16, 16), 135, 40, { upscale: 1 });
    const elapsed = performance.now() - start;
    expect(mask.values.every((v) => v === 0)).toBe(true);
    expect(elapsed).toBeLessThan(1000);
  });

  it("rejects malformed grids with a typed error", () => {
    expect(() => castShadows({ values: new Float64Array(3), rows: 2, cols: 2 }, 135, 40))
      .toThrow(GeoShadowError);
  });

  it("surfaces CLI input errors", () => {
    // elevation outside (0, 90] is rejected by the tool
    expect(() => castShadows(makeGrid([[0, 0], [0, 0]]), 135, 95)).toThrow(GeoShadowError);
  });
});

describe("projectShadows (via CLI)", () => {
  it("matches the pipeline output on every fixture", () => {
    for (const c of fixtures.project_shadows) {
      const dsm = toGrid(c.dsm);
      dsm.geotransform = c.geotransform;
      const shadows = toGrid(c.shadows);
      shadows.geotransform = c.geotransform;
      const product = projectShadows(dsm, shadows, c.rpc, c.image_width, c.image_height, {
        minRegionPx: c.min_region_px,
      });
      expect(sameBits(product.shadow, toGrid(c.expected_shadow))).toBe(true);
      expect(sameBits(product.uncertainty, toGrid(c.expected_uncertainty))).toBe(true);
    }
  });

  it("rejects mismatched grids with a typed error", () => {
    const rpc = fixtures.project_shadows[0].rpc;
    expect(() =>
      projectShadows(makeGrid([[0]]), makeGrid([[0, 0]]), rpc, 4, 4),
    ).toThrow(GeoShadowError);
  });
});
