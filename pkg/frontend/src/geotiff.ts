/** Minimal single-band GeoTIFF reader/writer mirroring the pipeline's
 * on-disk subset (see docs/formats.md in the main package): classic TIFF,
 * striped layout, none/Deflate compression, ModelPixelScale + ModelTiepoint
 * georeferencing and the GDAL ASCII nodata tag. */

import { inflateSync } from "node:zlib";
import { readFileSync, writeFileSync } from "node:fs";

import { GeoShadowError, Grid, checkGrid } from "./grid.js";

const TAG = {
  width: 256,
  height: 257,
  bits: 258,
  compression: 259,
  photometric: 262,
  stripOffsets: 273,
  samplesPerPixel: 277,
  rowsPerStrip: 278,
  stripByteCounts: 279,
  sampleFormat: 339,
  pixelScale: 33550,
  tiepoint: 33922,
  gdalNodata: 42113,
} as const;

const FIELD_SIZES: Record<number, number> = { 1: 1, 2: 1, 3: 2, 4: 4, 6: 1, 8: 2, 9: 4, 11: 4, 12: 8 };

interface Entry {
  type: number;
  values: number[];
  text?: string;
}

function readEntries(buf: Buffer, path: string): Map<number, Entry> {
  const fail = (msg: string): never => {
    throw new GeoShadowError(`${path}: ${msg}`);
  };
  if (buf.length < 8) fail("truncated TIFF header");
  const order = buf.toString("latin1", 0, 2);
  const le = order === "II";
  if (!le && order !== "MM") fail(`bad byte-order mark ${order}`);
  const u16 = (off: number) => (le ? buf.readUInt16LE(off) : buf.readUInt16BE(off));
  const u32 = (off: number) => (le ? buf.readUInt32LE(off) : buf.readUInt32BE(off));
  if (u16(2) !== 42) fail(`bad TIFF magic ${u16(2)}`);
  const ifd = u32(4);
  if (ifd + 2 > buf.length) fail("IFD offset past end of file");
  const count = u16(ifd);
  const entries = new Map<number, Entry>();
  for (let i = 0; i < count; i++) {
    const base = ifd + 2 + 12 * i;
    if (base + 12 > buf.length) fail(`IFD entry ${i} past end of file`);
    const tag = u16(base);
    const typeReal = u16(base + 2);
    const n = u32(base + 4);
    const size = FIELD_SIZES[typeReal];
    if (size === undefined) fail(`tag ${tag}: unsupported field type ${typeReal}`);
    if (n > 10_000_000) fail(`tag ${tag}: implausible value count ${n}`);
    const total = size * n;
    let off = base + 8;
    if (total > 4) {
      off = u32(base + 8);
      if (off + total > buf.length) fail(`tag ${tag} values past end of file`);
    }
    if (typeReal === 2) {
      const text = buf.toString("latin1", off, off + n).split("\x00", 1)[0];
      entries.set(tag, { type: typeReal, values: [], text });
      continue;
    }
    const values: number[] = [];
    for (let k = 0; k < n; k++) {
      const p = off + k * size;
      switch (typeReal) {
        case 1: values.push(buf.readUInt8(p)); break;
        case 3: values.push(u16(p)); break;
        case 4: values.push(u32(p)); break;
        case 6: values.push(buf.readInt8(p)); break;
        case 8: values.push(le ? buf.readInt16LE(p) : buf.readInt16BE(p)); break;
        case 9: values.push(le ? buf.readInt32LE(p) : buf.readInt32BE(p)); break;
        case 11: values.push(le ? buf.readFloatLE(p) : buf.readFloatBE(p)); break;
        case 12: values.push(le ? buf.readDoubleLE(p) : buf.readDoubleBE(p)); break;
      }
    }
    entries.set(tag, { type: typeReal, values });
  }
  return entries;
}

function single(entries: Map<number, Entry>, tag: number, fallback?: number): number | undefined {
  const e = entries.get(tag);
  if (!e) return fallback;
  return e.values[0];
}

/** Read a single-band little-/big-endian striped GeoTIFF into a Grid. */
export function readGeoTiff(path: string): Grid {
  const buf = readFileSync(path);
  const fail = (msg: string): never => {
    throw new GeoShadowError(`${path}: ${msg}`);
  };
  const entries = readEntries(buf, path);
  const le = buf.toString("latin1", 0, 2) === "II";

  const width = single(entries, TAG.width);
  const height = single(entries, TAG.height);
  if (width === undefined || height === undefined) fail("missing ImageWidth or ImageLength");
  if (width! < 1 || height! < 1 || width! * height! > 1e8) fail(`implausible image size ${width} x ${height}`);
  const spp = single(entries, TAG.samplesPerPixel, 1);
  if (spp !== 1) fail(`SamplesPerPixel = ${spp}; only single-band rasters supported`);
  const bits = single(entries, TAG.bits, 1);
  const fmt = single(entries, TAG.sampleFormat, 1);
  const compression = single(entries, TAG.compression, 1);
  if (compression !== 1 && compression !== 8) fail(`Compression = ${compression} unsupported`);

  const key = `${bits}/${fmt}`;
  const itemSize = bits! / 8;
  const readers: Record<string, (b: Buffer, p: number) => number> = {
    "8/1": (b, p) => b.readUInt8(p),
    "16/1": (b, p) => (le ? b.readUInt16LE(p) : b.readUInt16BE(p)),
    "16/2": (b, p) => (le ? b.readInt16LE(p) : b.readInt16BE(p)),
    "32/3": (b, p) => (le ? b.readFloatLE(p) : b.readFloatBE(p)),
    "64/3": (b, p) => (le ? b.readDoubleLE(p) : b.readDoubleBE(p)),
  };
  const readSample = readers[key];
  if (!readSample) fail(`BitsPerSample ${bits} with SampleFormat ${fmt} unsupported`);

  const offsets = entries.get(TAG.stripOffsets)?.values;
  const counts = entries.get(TAG.stripByteCounts)?.values;
  if (!offsets || !counts) fail("missing StripOffsets or StripByteCounts");
  const rowsPerStrip = single(entries, TAG.rowsPerStrip, height);
  if (!rowsPerStrip || rowsPerStrip < 1) fail(`RowsPerStrip = ${rowsPerStrip} invalid`);

  const out = new Float64Array(width! * height!);
  let row0 = 0;
  for (let s = 0; s < offsets!.length; s++) {
    const nrows = Math.min(rowsPerStrip!, height! - row0);
    const expected = nrows * width! * itemSize;
    if (offsets![s] + counts![s] > buf.length) fail(`strip ${s} runs past end of file`);
    let chunk: Buffer = buf.subarray(offsets![s], offsets![s] + counts![s]);
    if (compression === 8) chunk = inflateSync(chunk, { maxOutputLength: expected });
    if (chunk.length < expected) fail(`strip ${s}: got ${chunk.length} bytes, need ${expected}`);
    for (let i = 0; i < nrows * width!; i++) {
      out[row0 * width! + i] = readSample(chunk, i * itemSize);
    }
    row0 += nrows;
  }

  const grid: Grid = { values: out, rows: height!, cols: width! };
  const scale = entries.get(TAG.pixelScale)?.values;
  const tie = entries.get(TAG.tiepoint)?.values;
  if (scale && tie && scale.length >= 2 && tie.length >= 6) {
    const psx = scale[0];
    const psy = -scale[1];
    // tiepoints reference the pixel corner; geotransforms use centers
    grid.geotransform = [tie[3] + (0.5 - tie[0]) * psx, tie[4] + (0.5 - tie[1]) * psy, psx, psy];
  }
  const nodataText = entries.get(TAG.gdalNodata)?.text;
  if (nodataText !== undefined) {
    const v = Number(nodataText.trim());
    if (Number.isNaN(v) && nodataText.trim().toLowerCase() !== "nan") {
      fail(`GDAL nodata tag is not numeric: ${nodataText}`);
    }
    grid.nodata = v;
  }
  return grid;
}

/** Write a Grid as a little-endian striped GeoTIFF (float64 or uint8). */
export function writeGeoTiff(grid: Grid, path: string, bitDepth: "float64" | "uint8" = "float64"): void {
  checkGrid(grid, "writeGeoTiff");
  const { rows, cols } = grid;
  const itemSize = bitDepth === "float64" ? 8 : 1;
  const data = Buffer.alloc(rows * cols * itemSize);
  for (let i = 0; i < rows * cols; i++) {
    if (bitDepth === "float64") data.writeDoubleLE(grid.values[i], i * 8);
    else data.writeUInt8(grid.values[i] & 0xff, i);
  }

  const [ox, oy, psx, psy] = grid.geotransform ?? [0.0, 0.0, 1.0, -1.0];
  const doubles = (vals: number[]) => {
    const b = Buffer.alloc(vals.length * 8);
    vals.forEach((v, i) => b.writeDoubleLE(v, i * 8));
    return b;
  };
  const pixelScale = doubles([psx, -psy, 0]);
  const tiepoint = doubles([0, 0, 0, ox - 0.5 * psx, oy - 0.5 * psy, 0]);
  const nodataText =
    grid.nodata !== undefined ? Buffer.from(`${grid.nodata}\x00`, "latin1") : undefined;

  interface RawTag {
    tag: number;
    type: number;
    count: number;
    payload: Buffer;
  }
  const short = (v: number) => {
    const b = Buffer.alloc(4);
    b.writeUInt16LE(v, 0);
    return b;
  };
  const long = (v: number) => {
    const b = Buffer.alloc(4);
    b.writeUInt32LE(v, 0);
    return b;
  };
  const tags: RawTag[] = [
    { tag: TAG.width, type: 4, count: 1, payload: long(cols) },
    { tag: TAG.height, type: 4, count: 1, payload: long(rows) },
    { tag: TAG.bits, type: 3, count: 1, payload: short(itemSize * 8) },
    { tag: TAG.compression, type: 3, count: 1, payload: short(1) },
    { tag: TAG.photometric, type: 3, count: 1, payload: short(1) },
    { tag: TAG.stripOffsets, type: 4, count: 1, payload: long(0) }, // patched below
    { tag: TAG.samplesPerPixel, type: 3, count: 1, payload: short(1) },
    { tag: TAG.rowsPerStrip, type: 4, count: 1, payload: long(rows) },
    { tag: TAG.stripByteCounts, type: 4, count: 1, payload: long(data.length) },
    { tag: TAG.sampleFormat, type: 3, count: 1, payload: short(bitDepth === "float64" ? 3 : 1) },
    { tag: TAG.pixelScale, type: 12, count: 3, payload: pixelScale },
    { tag: TAG.tiepoint, type: 12, count: 6, payload: tiepoint },
  ];
  if (nodataText) {
    tags.push({ tag: TAG.gdalNodata, type: 2, count: nodataText.length, payload: nodataText });
  }

  const ifdOffset = 8;
  const ifdSize = 2 + 12 * tags.length + 4;
  let extPos = ifdOffset + ifdSize;
  const externals: Buffer[] = [];
  const entryBufs: Buffer[] = [];
  // first pass sizes the external area so the strip offset is known
  let extTotal = 0;
  for (const t of tags) {
    if (t.payload.length > 4) extTotal += t.payload.length + (t.payload.length % 2);
  }
  const dataOffset = extPos + extTotal;
  tags[5].payload = long(dataOffset); // StripOffsets

  for (const t of tags) {
    const head = Buffer.alloc(8);
    head.writeUInt16LE(t.tag, 0);
    head.writeUInt16LE(t.type, 2);
    head.writeUInt32LE(t.count, 4);
    if (t.payload.length <= 4) {
      const inline = Buffer.alloc(4);
      t.payload.copy(inline);
      entryBufs.push(Buffer.concat([head, inline]));
    } else {
      entryBufs.push(Buffer.concat([head, long(extPos)]));
      const padded =
        t.payload.length % 2 ? Buffer.concat([t.payload, Buffer.alloc(1)]) : t.payload;
      externals.push(padded);
      extPos += padded.length;
    }
  }

  const header = Buffer.alloc(8);
  header.write("II", 0, "latin1");
  header.writeUInt16LE(42, 2);
  header.writeUInt32LE(ifdOffset, 4);
  const countBuf = Buffer.alloc(2);
  countBuf.writeUInt16LE(tags.length, 0);
  const next = Buffer.alloc(4); // no further IFDs
  writeFileSync(path, Buffer.concat([header, countBuf, ...entryBufs, next, ...externals, data]));
}
