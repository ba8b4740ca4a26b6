/** Native mask and loss operations, arithmetic-identical to the pipeline's
 * Python implementations so results match bit for bit. */

import { GeoShadowError, Grid, checkCongruent, checkGrid } from "./grid.js";

function asBinary(grid: Grid, name: string): Uint8Array {
  checkGrid(grid, name);
  const out = new Uint8Array(grid.values.length);
  for (let i = 0; i < grid.values.length; i++) {
    const v = grid.values[i];
    if (v !== 0 && v !== 1) {
      if (grid.nodata !== undefined && (v === grid.nodata || (Number.isNaN(v) && Number.isNaN(grid.nodata)))) {
        continue;
      }
      throw new GeoShadowError(`${name} is not a binary mask`);
    }
    out[i] = v === 1 ? 1 : 0;
  }
  return out;
}

/** Drop 8-connected components of 1-pixels with area strictly below
 * minAreaPx. Areas exactly at the threshold are kept; idempotent. */
export function removeSmallRegions(mask: Grid, minAreaPx: number): Grid {
  if (minAreaPx < 0) throw new GeoShadowError(`minAreaPx must be >= 0, got ${minAreaPx}`);
  const binary = asBinary(mask, "mask");
  const out: Grid = { ...mask, values: Float64Array.from(mask.values) };
  if (minAreaPx <= 1) return out;

  const { rows, cols } = mask;
  const seen = new Uint8Array(binary.length);
  const stack: number[] = [];
  const component: number[] = [];
  for (let start = 0; start < binary.length; start++) {
    if (!binary[start] || seen[start]) continue;
    stack.length = 0;
    component.length = 0;
    stack.push(start);
    seen[start] = 1;
    while (stack.length) {
      const idx = stack.pop()!;
      component.push(idx);
      const r = Math.floor(idx / cols);
      const c = idx - r * cols;
      for (let dr = -1; dr <= 1; dr++) {
        for (let dc = -1; dc <= 1; dc++) {
          const rr = r + dr;
          const cc = c + dc;
          if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
          const j = rr * cols + cc;
          if (binary[j] && !seen[j]) {
            seen[j] = 1;
            stack.push(j);
          }
        }
      }
    }
    if (component.length < minAreaPx) {
      for (const idx of component) out.values[idx] = 0;
    }
  }
  return out;
}

export interface SupervisionBundle {
  supervision: Grid;
  ignore: Grid;
}

/** Supervise where the min/max shadow masks agree and both are certain;
 * ignore everywhere else. */
export function agreementMasks(
  shadowMin: Grid,
  shadowMax: Grid,
  uncertaintyMin: Grid,
  uncertaintyMax: Grid,
): SupervisionBundle {
  checkCongruent(shadowMin, shadowMax, "agreementMasks(shadowMax)");
  checkCongruent(shadowMin, uncertaintyMin, "agreementMasks(uncertaintyMin)");
  checkCongruent(shadowMin, uncertaintyMax, "agreementMasks(uncertaintyMax)");
  const smin = asBinary(shadowMin, "shadowMin");
  const smax = asBinary(shadowMax, "shadowMax");
  const umin = asBinary(uncertaintyMin, "uncertaintyMin");
  const umax = asBinary(uncertaintyMax, "uncertaintyMax");

  const supervision = new Float64Array(smin.length);
  const ignore = new Float64Array(smin.length);
  for (let i = 0; i < smin.length; i++) {
    const certainAgree = smin[i] === smax[i] && !umin[i] && !umax[i];
    supervision[i] = certainAgree ? smin[i] : 0;
    ignore[i] = certainAgree ? 0 : 1;
  }
  const shape = { rows: shadowMin.rows, cols: shadowMin.cols, geotransform: shadowMin.geotransform };
  return {
    supervision: { ...shape, values: supervision },
    ignore: { ...shape, values: ignore },
  };
}

/** (NIR - Red) / (NIR + Red); zero denominators and nodata inputs become
 * NaN, and the result carries NaN as its nodata value. */
export function ndvi(nir: Grid, red: Grid): Grid {
  checkCongruent(nir, red, "ndvi");
  const isNodata = (grid: Grid, v: number) =>
    grid.nodata !== undefined && (v === grid.nodata || (Number.isNaN(v) && Number.isNaN(grid.nodata)));
  const out = new Float64Array(nir.values.length);
  for (let i = 0; i < out.length; i++) {
    const n = nir.values[i];
    const r = red.values[i];
    const denom = n + r;
    if (denom === 0 || isNodata(nir, n) || isNodata(red, r)) {
      out[i] = NaN;
    } else {
      out[i] = (n - r) / denom;
    }
  }
  return { values: out, rows: nir.rows, cols: nir.cols, geotransform: nir.geotransform, nodata: NaN };
}

/** Shadow-supervision loss over a batch of rays: mean of
 * lambda * gt_i * (pred_i - gt_i)^2 with lambda the batch shadow fraction.
 * Left-to-right float64 accumulation, matching the reference exactly. */
export function shadowLoss(pred: ArrayLike<number>, gt: ArrayLike<number>): number {
  if (pred.length !== gt.length) {
    throw new GeoShadowError(`length mismatch: ${pred.length} predictions vs ${gt.length} labels`);
  }
  if (pred.length === 0) throw new GeoShadowError("shadowLoss needs at least one ray");
  for (let i = 0; i < pred.length; i++) {
    const v = pred[i];
    if (!(v >= 0 && v <= 1)) throw new GeoShadowError(`predictions must lie in [0, 1], got ${v}`);
  }
  for (let i = 0; i < gt.length; i++) {
    if (gt[i] !== 0 && gt[i] !== 1) {
      throw new GeoShadowError(`ground truth must be binary, got ${gt[i]}`);
    }
  }

  const n = gt.length;
  let totalGt = 0.0;
  for (let i = 0; i < n; i++) totalGt += gt[i];
  const lam = totalGt / n;

  let acc = 0.0;
  for (let i = 0; i < n; i++) {
    const d = pred[i] - gt[i];
    acc += lam * gt[i] * (d * d);
  }
  return acc / n;
}
