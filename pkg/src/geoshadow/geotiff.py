"""Bounded in-tree GeoTIFF reader/writer.

Supports exactly what the pipeline's single-band tiles need: classic TIFF
(either byte order on read, little-endian on write), striped or tiled
layout, uint8/uint16/int16/float32/float64 samples, compression none or
Deflate, the ModelPixelScale + ModelTiepoint geotransform tags and the
GDAL-style ASCII nodata tag.  Everything else is rejected with a precise
diagnostic.  See docs/formats.md for the exact tag list.
"""

import math
import struct
import warnings
import zlib

import numpy as np

from .errors import GeoTiffFormatError
from .raster import Crs, Raster

__all__ = ["read_geotiff", "write_geotiff"]

_TAG_IMAGE_WIDTH = 256
_TAG_IMAGE_LENGTH = 257
_TAG_BITS_PER_SAMPLE = 258
_TAG_COMPRESSION = 259
_TAG_PHOTOMETRIC = 262
_TAG_STRIP_OFFSETS = 273
_TAG_SAMPLES_PER_PIXEL = 277
_TAG_ROWS_PER_STRIP = 278
_TAG_STRIP_BYTE_COUNTS = 279
_TAG_PLANAR_CONFIG = 284
_TAG_PREDICTOR = 317
_TAG_TILE_WIDTH = 322
_TAG_TILE_LENGTH = 323
_TAG_TILE_OFFSETS = 324
_TAG_TILE_BYTE_COUNTS = 325
_TAG_SAMPLE_FORMAT = 339
_TAG_MODEL_PIXEL_SCALE = 33550
_TAG_MODEL_TIEPOINT = 33922
_TAG_GEO_KEY_DIRECTORY = 34735
_TAG_GDAL_NODATA = 42113

_COMPRESSION_NONE = 1
_COMPRESSION_DEFLATE = 8

# TIFF field type -> (struct letter, byte size).
_FIELD_TYPES = {
    1: ("B", 1),   # BYTE
    2: ("s", 1),   # ASCII
    3: ("H", 2),   # SHORT
    4: ("I", 4),   # LONG
    6: ("b", 1),   # SBYTE
    8: ("h", 2),   # SSHORT
    9: ("i", 4),   # SLONG
    11: ("f", 4),  # FLOAT
    12: ("d", 8),  # DOUBLE
}

# (BitsPerSample, SampleFormat) -> numpy dtype letter.
_SAMPLE_DTYPES = {
    (8, 1): "u1",
    (16, 1): "u2",
    (16, 2): "i2",
    (32, 3): "f4",
    (64, 3): "f8",
}

_MAX_PIXELS = 100_000_000


class _Reader:
    def __init__(self, data, path):
        self.data = data
        self.path = path

    def fail(self, message):
        raise GeoTiffFormatError(f"{self.path}: {message}")

    def bytes_at(self, offset, size, what):
        if offset < 0 or size < 0 or offset + size > len(self.data):
            self.fail(f"{what} at offset {offset} (+{size}) runs past end of file")
        return self.data[offset : offset + size]

    def parse(self):
        head = self.bytes_at(0, 8, "TIFF header")
        if head[:2] == b"II":
            self.endian = "<"
        elif head[:2] == b"MM":
            self.endian = ">"
        else:
            self.fail(f"bad byte-order mark {head[:2]!r}")
        magic, ifd_offset = struct.unpack(self.endian + "HI", head[2:8])
        if magic != 42:
            self.fail(f"bad TIFF magic {magic} (expected 42)")
        return self.read_ifd(ifd_offset)

    def read_ifd(self, offset):
        (count,) = struct.unpack(self.endian + "H", self.bytes_at(offset, 2, "IFD entry count"))
        if count == 0:
            self.fail("IFD has no entries")
        entries = {}
        for i in range(count):
            entry = self.bytes_at(offset + 2 + 12 * i, 12, f"IFD entry {i}")
            tag, ftype, n = struct.unpack(self.endian + "HHI", entry[:8])
            entries[tag] = self.read_values(tag, ftype, n, entry[8:12])
        return entries

    def read_values(self, tag, ftype, n, inline):
        if ftype not in _FIELD_TYPES:
            self.fail(f"tag {tag}: unsupported field type {ftype}")
        letter, size = _FIELD_TYPES[ftype]
        total = size * n
        if n > 10_000_000:
            self.fail(f"tag {tag}: implausible value count {n}")
        if total <= 4:
            raw = inline[:total]
        else:
            (value_offset,) = struct.unpack(self.endian + "I", inline)
            raw = self.bytes_at(value_offset, total, f"tag {tag} values")
        if ftype == 2:  # ASCII, NUL-terminated
            return raw.split(b"\x00", 1)[0].decode("ascii", errors="replace")
        return list(struct.unpack(f"{self.endian}{n}{letter}", raw))


def _single(entries, tag, default=None, name=""):
    if tag not in entries:
        return default
    vals = entries[tag]
    return vals[0] if isinstance(vals, list) else vals


def read_geotiff(path, crs=None):
    """Read a single-band GeoTIFF into a :class:`Raster` (float64 samples).

    GeoKey directories are ignored with a warning; the coordinate system is
    declared by the caller via ``crs`` (default pixel-only), since the
    pipeline always knows its CRS.

    Raises:
        GeoTiffFormatError: for malformed files or unsupported layouts; the
            diagnostic names the offending tag.
    """
    with open(path, "rb") as f:
        data = f.read()
    reader = _Reader(data, str(path))
    try:
        return _decode(reader, data, crs)
    except GeoTiffFormatError:
        raise
    except (struct.error, zlib.error, ValueError, OverflowError, IndexError, MemoryError) as e:
        raise GeoTiffFormatError(f"{path}: malformed TIFF structure ({e})") from e


def _decode(reader, data, crs):
    entries = reader.parse()

    width = _single(entries, _TAG_IMAGE_WIDTH)
    height = _single(entries, _TAG_IMAGE_LENGTH)
    if width is None or height is None:
        reader.fail("missing ImageWidth (256) or ImageLength (257)")
    if width < 1 or height < 1 or width * height > _MAX_PIXELS:
        reader.fail(f"implausible image size {width} x {height}")

    spp = _single(entries, _TAG_SAMPLES_PER_PIXEL, 1)
    if spp != 1:
        reader.fail(f"SamplesPerPixel (277) = {spp}; only single-band rasters are supported")
    planar = _single(entries, _TAG_PLANAR_CONFIG, 1)
    if planar != 1:
        reader.fail(f"PlanarConfiguration (284) = {planar} unsupported")
    predictor = _single(entries, _TAG_PREDICTOR, 1)
    if predictor != 1:
        reader.fail(f"Predictor (317) = {predictor} unsupported")

    bits = _single(entries, _TAG_BITS_PER_SAMPLE, 1)
    fmt = _single(entries, _TAG_SAMPLE_FORMAT, 1)
    dtype_letter = _SAMPLE_DTYPES.get((bits, fmt))
    if dtype_letter is None:
        reader.fail(
            f"BitsPerSample (258) = {bits} with SampleFormat (339) = {fmt} unsupported"
        )
    dtype = np.dtype(reader.endian + dtype_letter)

    compression = _single(entries, _TAG_COMPRESSION, _COMPRESSION_NONE)
    if compression not in (_COMPRESSION_NONE, _COMPRESSION_DEFLATE):
        reader.fail(f"Compression (259) = {compression} unsupported (need 1 or 8)")

    tiled = _TAG_TILE_OFFSETS in entries
    striped = _TAG_STRIP_OFFSETS in entries
    if tiled and striped:
        reader.fail("both StripOffsets (273) and TileOffsets (324) present")
    if not tiled and not striped:
        reader.fail("missing StripOffsets (273) or TileOffsets (324)")

    if striped:
        values = _read_strips(reader, entries, width, height, dtype, compression)
    else:
        values = _read_tiles(reader, entries, width, height, dtype, compression)

    if _TAG_GEO_KEY_DIRECTORY in entries:
        warnings.warn(
            f"{reader.path}: GeoKey directory ignored; declare the CRS explicitly",
            stacklevel=2,
        )

    geotransform = _read_geotransform(reader, entries)
    nodata = None
    if _TAG_GDAL_NODATA in entries:
        text = entries[_TAG_GDAL_NODATA].strip()
        try:
            nodata = float(text)
        except ValueError:
            reader.fail(f"GDAL nodata tag (42113) is not numeric: {text!r}")

    return Raster(values.astype(np.float64), geotransform, nodata,
                  crs if crs is not None else Crs.pixel_only())


def _decompress(reader, chunk, compression, expected, what):
    if compression == _COMPRESSION_DEFLATE:
        chunk = zlib.decompressobj().decompress(chunk, expected)
    if len(chunk) < expected:
        reader.fail(f"{what}: got {len(chunk)} bytes, need {expected}")
    return chunk[:expected]


def _read_strips(reader, entries, width, height, dtype, compression):
    offsets = entries[_TAG_STRIP_OFFSETS]
    counts = entries.get(_TAG_STRIP_BYTE_COUNTS)
    if counts is None:
        reader.fail("missing StripByteCounts (279)")
    if len(counts) != len(offsets):
        reader.fail("StripOffsets (273) and StripByteCounts (279) length mismatch")
    rows_per_strip = _single(entries, _TAG_ROWS_PER_STRIP, height)
    if rows_per_strip < 1:
        reader.fail(f"RowsPerStrip (278) = {rows_per_strip} invalid")
    expected_strips = (height + rows_per_strip - 1) // rows_per_strip
    if len(offsets) != expected_strips:
        reader.fail(f"expected {expected_strips} strips, found {len(offsets)}")

    out = np.empty((height, width), dtype=dtype)
    for i, (off, cnt) in enumerate(zip(offsets, counts)):
        row0 = i * rows_per_strip
        nrows = min(rows_per_strip, height - row0)
        raw = reader.bytes_at(off, cnt, f"strip {i}")
        raw = _decompress(reader, raw, compression, nrows * width * dtype.itemsize, f"strip {i}")
        out[row0 : row0 + nrows] = np.frombuffer(raw, dtype=dtype).reshape(nrows, width)
    return out


def _read_tiles(reader, entries, width, height, dtype, compression):
    tile_w = _single(entries, _TAG_TILE_WIDTH)
    tile_h = _single(entries, _TAG_TILE_LENGTH)
    if not tile_w or not tile_h:
        reader.fail("missing TileWidth (322) or TileLength (323)")
    offsets = entries[_TAG_TILE_OFFSETS]
    counts = entries.get(_TAG_TILE_BYTE_COUNTS)
    if counts is None:
        reader.fail("missing TileByteCounts (325)")
    across = (width + tile_w - 1) // tile_w
    down = (height + tile_h - 1) // tile_h
    if len(offsets) != across * down or len(counts) != len(offsets):
        reader.fail(f"expected {across * down} tiles, found {len(offsets)}")

    out = np.empty((height, width), dtype=dtype)
    for t, (off, cnt) in enumerate(zip(offsets, counts)):
        raw = reader.bytes_at(off, cnt, f"tile {t}")
        raw = _decompress(reader, raw, compression, tile_w * tile_h * dtype.itemsize, f"tile {t}")
        tile = np.frombuffer(raw, dtype=dtype).reshape(tile_h, tile_w)
        r0 = (t // across) * tile_h
        c0 = (t % across) * tile_w
        out[r0 : min(r0 + tile_h, height), c0 : min(c0 + tile_w, width)] = tile[
            : min(tile_h, height - r0), : min(tile_w, width - c0)
        ]
    return out


def _read_geotransform(reader, entries):
    scale = entries.get(_TAG_MODEL_PIXEL_SCALE)
    tiepoint = entries.get(_TAG_MODEL_TIEPOINT)
    if scale is None and tiepoint is None:
        return (0.0, 0.0, 1.0, 1.0)
    if scale is None or tiepoint is None:
        reader.fail("ModelPixelScaleTag (33550) and ModelTiepointTag (33922) must both be present")
    if len(scale) < 2 or len(tiepoint) < 6:
        reader.fail("ModelPixelScaleTag (33550) or ModelTiepointTag (33922) too short")
    psx = scale[0]
    psy = -scale[1]  # positive ScaleY means north-up rows
    if not (math.isfinite(psx) and math.isfinite(psy)) or psx <= 0 or psy == 0:
        reader.fail(f"invalid ModelPixelScaleTag (33550) values {scale[:2]}")
    i, j, _, x, y, _ = tiepoint[:6]
    # Tiepoints reference the pixel corner; our geotransform uses centers.
    origin_x = x + (0.5 - i) * psx
    origin_y = y + (0.5 - j) * psy
    return (origin_x, origin_y, psx, psy)


_WRITE_DTYPES = {
    "uint8": ("u1", 8, 1),
    "uint16": ("u2", 16, 1),
    "int16": ("i2", 16, 2),
    "float32": ("f4", 32, 3),
    "float64": ("f8", 64, 3),
}


def write_geotiff(raster, path, bit_depth="float64", compression="none"):
    """Write a striped single-band little-endian GeoTIFF.

    ``bit_depth`` picks the on-disk sample type (binary masks should use
    "uint8"); geotransform and nodata are carried in the standard tags.
    ``compression`` may be "none" or "deflate".
    """
    if bit_depth not in _WRITE_DTYPES:
        raise ValueError(f"unsupported bit_depth {bit_depth!r}; choose from {sorted(_WRITE_DTYPES)}")
    if compression not in ("none", "deflate"):
        raise ValueError(f"unsupported compression {compression!r}")
    letter, bits, fmt = _WRITE_DTYPES[bit_depth]
    values = raster.values.astype("<" + letter)
    height, width = values.shape

    row_bytes = width * values.dtype.itemsize
    rows_per_strip = min(height, max(1, 65536 // row_bytes))
    strips = []
    for row0 in range(0, height, rows_per_strip):
        chunk = values[row0 : row0 + rows_per_strip].tobytes()
        if compression == "deflate":
            chunk = zlib.compress(chunk, 6)
        strips.append(chunk)

    ox, oy, psx, psy = raster.geotransform
    pixel_scale = (psx, -psy, 0.0)
    tiepoint = (0.0, 0.0, 0.0, ox - 0.5 * psx, oy - 0.5 * psy, 0.0)

    tags = [
        (_TAG_IMAGE_WIDTH, 4, [width]),
        (_TAG_IMAGE_LENGTH, 4, [height]),
        (_TAG_BITS_PER_SAMPLE, 3, [bits]),
        (_TAG_COMPRESSION, 3, [_COMPRESSION_DEFLATE if compression == "deflate" else 1]),
        (_TAG_PHOTOMETRIC, 3, [1]),
        (_TAG_STRIP_OFFSETS, 4, [0] * len(strips)),  # patched below
        (_TAG_SAMPLES_PER_PIXEL, 3, [1]),
        (_TAG_ROWS_PER_STRIP, 4, [rows_per_strip]),
        (_TAG_STRIP_BYTE_COUNTS, 4, [len(s) for s in strips]),
        (_TAG_SAMPLE_FORMAT, 3, [fmt]),
        (_TAG_MODEL_PIXEL_SCALE, 12, list(pixel_scale)),
        (_TAG_MODEL_TIEPOINT, 12, list(tiepoint)),
    ]
    if raster.nodata is not None:
        tags.append((_TAG_GDAL_NODATA, 2, repr(float(raster.nodata)) + "\x00"))

    try:
        payload = _assemble_tiff(tags, strips)
        with open(path, "wb") as f:
            f.write(payload)
    except OSError as e:
        raise OSError(f"failed to write GeoTIFF {path}: {e}") from e


def _assemble_tiff(tags, strips):
    """Lay out header, IFD, external values, then strip data (little-endian)."""
    n = len(tags)
    ifd_offset = 8
    ifd_size = 2 + 12 * n + 4
    external_offset = ifd_offset + ifd_size

    # First pass: size the external value area.
    external_sizes = []
    for tag, ftype, vals in tags:
        letter, size = _FIELD_TYPES[ftype]
        count = len(vals)
        total = size * count
        external_sizes.append(0 if total <= 4 else total + (total % 2))
    data_offset = external_offset + sum(external_sizes)

    strip_offsets = []
    pos = data_offset
    for s in strips:
        strip_offsets.append(pos)
        pos += len(s) + (len(s) % 2)
    tags = [
        (tag, ftype, strip_offsets if tag == _TAG_STRIP_OFFSETS else vals)
        for tag, ftype, vals in tags
    ]

    out = bytearray()
    out += struct.pack("<2sHI", b"II", 42, ifd_offset)
    out += struct.pack("<H", n)
    external = bytearray()
    ext_pos = external_offset
    for tag, ftype, vals in tags:
        letter, size = _FIELD_TYPES[ftype]
        if ftype == 2:
            raw = vals.encode("ascii")
            count = len(raw)
        else:
            count = len(vals)
            raw = struct.pack(f"<{count}{letter}", *vals)
        if len(raw) <= 4:
            out += struct.pack("<HHI", tag, ftype, count) + raw.ljust(4, b"\x00")
        else:
            out += struct.pack("<HHII", tag, ftype, count, ext_pos)
            if len(raw) % 2:
                raw += b"\x00"
            external += raw
            ext_pos += len(raw)
    out += struct.pack("<I", 0)  # no further IFDs
    out += external
    for s in strips:
        out += s
        if len(s) % 2:
            out += b"\x00"
    return bytes(out)
