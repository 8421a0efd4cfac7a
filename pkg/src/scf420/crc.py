"""Luma-dependent chroma range tables.

For each of ``b x b`` chroma blocks and each chroma channel, a bitmap records
which (quantized luma, chroma partition) pairs occur.  The tables travel as
side information, coded as binary images by the arity-1 pipeline, and let
both sides drop impossible chroma values from every model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StreamError, TableCorruptionError
from .pipeline import PipelineConfig, decode_plane_set, encode_plane_set
from .rangecoder import RangeDecoder, RangeEncoder

BLOCK_CHOICES = (1, 2, 4)
PARTITION_CHOICES = (4, 8, 16, 32, 64, 128)
SCALE_CHOICES = (2, 4, 8, 16, 32, 64, 128)
CB, CR = 0, 1


@dataclass(frozen=True)
class CrcParams:
    blocks: int = 4
    partitions: int = 64
    scale: int = 64

    def __post_init__(self):
        if self.blocks not in BLOCK_CHOICES:
            raise ParameterError(f"blocks must be one of {BLOCK_CHOICES}, got {self.blocks}")
        if self.partitions not in PARTITION_CHOICES:
            raise ParameterError(f"partitions must be one of {PARTITION_CHOICES}, got {self.partitions}")
        if self.scale not in SCALE_CHOICES:
            raise ParameterError(f"scale must be one of {SCALE_CHOICES}, got {self.scale}")


def quantize_luma(y, s: int) -> np.ndarray:
    """Sum each 2x2 luma block, add ``s/2`` and divide by ``s`` (floor)."""
    if s <= 0:
        raise ParameterError(f"precision scale must be positive, got {s}")
    y = np.asarray(y, dtype=np.int64)
    if y.shape[0] % 2 or y.shape[1] % 2:
        raise ParameterError("luma plane needs even dimensions")
    total = y[0::2, 0::2] + y[0::2, 1::2] + y[1::2, 0::2] + y[1::2, 1::2]
    # floor((total + s/2) / s) without fractions for odd s
    return (2 * total + s) // (2 * s)


def max_quantized_luma(s: int, bitdepth: int = 8) -> int:
    return (2 * 4 * ((1 << bitdepth) - 1) + s) // (2 * s)


def partition_bounds(i: int, p: int, c_max: int = 255) -> tuple:
    """Inclusive value range ``(r_min, r_max)`` of partition ``i`` of ``p``."""
    if p <= 0 or not 0 <= i < p:
        raise ParameterError(f"partition index {i} outside 0..{p - 1}")
    return (i * (c_max + 1) // p, (i + 1) * (c_max + 1) // p - 1)


def partition_lookup(p: int, c_max: int = 255) -> np.ndarray:
    """Partition index of every value ``0..c_max``."""
    out = np.empty(c_max + 1, dtype=np.int64)
    for i in range(p):
        lo, hi = partition_bounds(i, p, c_max)
        out[lo:hi + 1] = i
    return out


def block_map(length: int, b: int) -> np.ndarray:
    """Block index along one axis, boundaries at ``floor(length * k / b)``."""
    bounds = [length * k // b for k in range(b + 1)]
    out = np.empty(length, dtype=np.int64)
    for k in range(b):
        out[bounds[k]:bounds[k + 1]] = k
    return out


@dataclass(eq=False)
class ChromaRangeTable:
    """``bits[channel, block, ytilde, partition]`` occurrence flags."""

    params: CrcParams
    ymax: int
    bits: np.ndarray

    def __post_init__(self):
        b, p = self.params.blocks, self.params.partitions
        shape = (2, b * b, self.ymax + 1, p)
        self.bits = np.asarray(self.bits, dtype=bool)
        if self.bits.shape != shape:
            raise ParameterError(f"table shape {self.bits.shape} != {shape}")
        self._bounds = [partition_bounds(i, p) for i in range(p)]
        self._cache = {}

    def __eq__(self, other):
        if not isinstance(other, ChromaRangeTable):
            return NotImplemented
        return self.params == other.params and self.ymax == other.ymax and np.array_equal(self.bits, other.bits)

    def allowed_mask(self, block: int, ytilde: int, channel: int) -> np.ndarray:
        if not 0 <= ytilde <= self.ymax:
            raise ParameterError(f"quantized luma {ytilde} above {self.ymax}")
        mask = np.zeros(256, dtype=bool)
        for i in np.flatnonzero(self.bits[channel, block, ytilde]):
            lo, hi = self._bounds[i]
            mask[lo:hi + 1] = True
        return mask

    def allowed_values(self, block: int, ytilde: int, channel: int) -> set:
        return set(np.flatnonzero(self.allowed_mask(block, ytilde, channel)).tolist())

    def allowed_set(self, block: int, ytilde: int) -> "AllowedSet":
        key = (block, ytilde)
        aset = self._cache.get(key)
        if aset is None:
            cb = self.allowed_mask(block, ytilde, CB)
            cr = self.allowed_mask(block, ytilde, CR)
            if not cb.any() or not cr.any():
                raise TableCorruptionError(f"no chroma values allowed in block {block} at luma {ytilde}")
            aset = self._cache[key] = AllowedSet(cb, cr)
        return aset

    def binary_image(self, channel: int) -> np.ndarray:
        """Tiles of (ymax+1) rows by p columns, arranged in block raster order."""
        b = self.params.blocks
        rows, p = self.ymax + 1, self.params.partitions
        img = np.zeros((b * rows, b * p), dtype=np.uint8)
        for k in range(b * b):
            i, j = divmod(k, b)
            img[i * rows:(i + 1) * rows, j * p:(j + 1) * p] = self.bits[channel, k]
        return img

    @classmethod
    def from_binary_images(cls, images, params: CrcParams, ymax: int) -> "ChromaRangeTable":
        b = params.blocks
        rows, p = ymax + 1, params.partitions
        bits = np.zeros((2, b * b, rows, p), dtype=bool)
        for ch, img in enumerate(images):
            img = np.asarray(img)
            if img.shape != (b * rows, b * p):
                raise ParameterError("binary table image has the wrong shape")
            for k in range(b * b):
                i, j = divmod(k, b)
                bits[ch, k] = img[i * rows:(i + 1) * rows, j * p:(j + 1) * p] != 0
        return cls(params, ymax, bits)

    def bit_count(self) -> int:
        return int(self.bits.sum())


class AllowedSet:
    """Admissible Cb and Cr values at one (block, quantized luma) pair."""

    __slots__ = ("masks", "accepts")

    def __init__(self, cb_mask: np.ndarray, cr_mask: np.ndarray):
        self.masks = (cb_mask, cr_mask)
        cbf = bytes(cb_mask.astype(np.uint8))
        crf = bytes(cr_mask.astype(np.uint8))
        self.accepts = lambda x: cbf[x >> 8] and crf[x & 0xFF]


def _block_grid(shape, b: int) -> np.ndarray:
    h, w = shape
    return block_map(h, b)[:, None] * b + block_map(w, b)[None, :]


def build_tables(image, params: CrcParams = CrcParams()) -> ChromaRangeTable:
    """Set the bit of every (block, quantized luma, partition) in ``image``."""
    ymax = max_quantized_luma(params.scale)
    yq = quantize_luma(image.y.samples, params.scale)
    blocks = _block_grid(yq.shape, params.blocks)
    part = partition_lookup(params.partitions)
    b2 = params.blocks * params.blocks
    bits = np.zeros((2, b2, ymax + 1, params.partitions), dtype=bool)
    for ch, plane in enumerate((image.cb, image.cr)):
        bits[ch, blocks, yq, part[plane.samples]] = True
    return ChromaRangeTable(params, ymax, bits)


def missing_combinations(tables: ChromaRangeTable, image) -> int:
    """Number of chroma samples whose combination bit is clear (0 when complete)."""
    params = tables.params
    yq = quantize_luma(image.y.samples, params.scale)
    blocks = _block_grid(yq.shape, params.blocks)
    part = partition_lookup(params.partitions)
    missing = 0
    for ch, plane in enumerate((image.cb, image.cr)):
        missing += int((~tables.bits[ch, blocks, yq, part[plane.samples]]).sum())
    return missing


class CrcFilter:
    """Per-position chroma range queries for the CbCr pass."""

    def __init__(self, tables: ChromaRangeTable, luma):
        self.tables = tables
        self.yq = quantize_luma(luma, tables.params.scale).tolist()
        h, w = len(self.yq), len(self.yq[0])
        b = tables.params.blocks
        self.block_rows = (block_map(h, b) * b).tolist()
        self.block_cols = block_map(w, b).tolist()
        self._allowed = tables.allowed_set

    def at(self, r: int, c: int) -> AllowedSet:
        return self._allowed(self.block_rows[r] + self.block_cols[c], self.yq[r][c])


def encode_tables(tables: ChromaRangeTable) -> tuple:
    """Code the Cb and Cr bitmaps as two binary-image streams."""
    out = []
    for ch in (CB, CR):
        enc = RangeEncoder()
        encode_plane_set([tables.binary_image(ch)], PipelineConfig(arity=1, bitdepth=1), enc)
        out.append(enc.finish())
    return tuple(out)


def decode_tables(chunks, params: CrcParams, ymax: int) -> ChromaRangeTable:
    b = params.blocks
    dims = (b * (ymax + 1), b * params.partitions)
    images = []
    for chunk in chunks:
        dec = RangeDecoder(chunk)
        images.append(decode_plane_set(PipelineConfig(arity=1, bitdepth=1), dec, dims)[0])
        if dec.bytes_consumed != len(chunk):
            raise StreamError("trailing bytes after chroma range table")
    return ChromaRangeTable.from_binary_images(images, params, ymax)
