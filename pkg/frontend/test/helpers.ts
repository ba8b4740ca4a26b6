import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { Grid } from "../src/index.js";

const here = dirname(fileURLToPath(import.meta.url));

export const fixtures = JSON.parse(
  readFileSync(join(here, "..", "fixtures", "fixtures.json"), "utf-8"),
);

/** Nested-list fixture encoding -> Grid; null entries are NaN. */
export function toGrid(nested: (number | null)[][], nodata?: number): Grid {
  const rows = nested.length;
  const cols = nested[0].length;
  const values = new Float64Array(rows * cols);
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const v = nested[r][c];
      values[r * cols + c] = v === null ? NaN : v;
    }
  }
  const grid: Grid = { values, rows, cols };
  if (nodata !== undefined) grid.nodata = nodata;
  return grid;
}

/** Bit-level equality over float64 buffers (NaN equals NaN). */
export function sameBits(a: Grid, b: Grid): boolean {
  if (a.rows !== b.rows || a.cols !== b.cols) return false;
  for (let i = 0; i < a.values.length; i++) {
    if (!Object.is(a.values[i], b.values[i])) return false;
  }
  return true;
}
