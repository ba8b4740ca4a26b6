/** Dense row-major 2-D numeric buffer with optional georeferencing. */

export interface Grid {
  /** Row-major samples, length rows * cols. */
  values: Float64Array;
  rows: number;
  cols: number;
  /** (originX, originY, pixelSizeX, pixelSizeY) at the center of cell (0, 0). */
  geotransform?: [number, number, number, number];
  nodata?: number;
}

/** Typed error for all binding failures (bad input, CLI failure, bad TIFF). */
export class GeoShadowError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "GeoShadowError";
  }
}

export function makeGrid(
  values: Float64Array | number[] | number[][],
  rows?: number,
  cols?: number,
): Grid {
  if (Array.isArray(values) && Array.isArray(values[0])) {
    const nested = values as number[][];
    const r = nested.length;
    const c = nested[0].length;
    const flat = new Float64Array(r * c);
    for (let i = 0; i < r; i++) {
      if (nested[i].length !== c) {
        throw new GeoShadowError(`ragged rows: row ${i} has ${nested[i].length} values, expected ${c}`);
      }
      flat.set(nested[i], i * c);
    }
    return { values: flat, rows: r, cols: c };
  }
  if (rows === undefined || cols === undefined) {
    throw new GeoShadowError("rows and cols are required for flat input");
  }
  const flat = values instanceof Float64Array ? values : Float64Array.from(values as number[]);
  checkGrid({ values: flat, rows, cols }, "input");
  return { values: flat, rows, cols };
}

export function checkGrid(grid: Grid, name: string): void {
  if (!Number.isInteger(grid.rows) || !Number.isInteger(grid.cols) || grid.rows < 1 || grid.cols < 1) {
    throw new GeoShadowError(`${name}: dimensions must be positive integers, got ${grid.rows} x ${grid.cols}`);
  }
  if (grid.values.length !== grid.rows * grid.cols) {
    throw new GeoShadowError(
      `${name}: buffer length ${grid.values.length} does not match ${grid.rows} x ${grid.cols}`,
    );
  }
}

export function checkCongruent(a: Grid, b: Grid, what: string): void {
  if (a.rows !== b.rows || a.cols !== b.cols) {
    throw new GeoShadowError(`${what}: shape mismatch ${a.rows}x${a.cols} vs ${b.rows}x${b.cols}`);
  }
}
