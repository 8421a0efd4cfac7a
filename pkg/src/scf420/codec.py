"""Container format and the 4:2:0 / 4:4:4 codec entry points.

Layout (little-endian)::

    magic "SCF0" | version u8 | format u8 | flags u8 | bitdepth u8
    width u32 | height u32 | blocks u8 | partitions u8 | scale u8 | ymax u16
    chunk count u8 | chunk lengths u32 each | CRC-32 of payload u32
    payload = chunks back to back

4:2:0 chunk order: Y, [Cb range table, Cr range table,] CbCr.  The decoder
has the luma plane before it reaches the tables and the chroma data.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field

import numpy as np

from .crc import CrcFilter, CrcParams, build_tables, decode_tables, encode_tables, max_quantized_luma, quantize_luma
from .errors import ContainerError, ParameterError, StreamError, UsageError
from .pipeline import PipelineConfig, decode_plane_set, encode_plane_set
from .pixelio import RGB, YCBCR, Image420, Image444, Plane
from .rangecoder import RangeDecoder, RangeEncoder

MAGIC = b"SCF0"
VERSION = 1
FORMAT_420 = 0
FORMAT_444 = 1
FLAG_LMAP = 1
FLAG_CRC = 2
FLAG_BOOST = 4
FLAG_YCBCR = 8
LMAP_SCALE = 2

_FIXED = struct.Struct("<4sBBBBIIBBBHB")


@dataclass(frozen=True)
class EncoderConfig:
    lmap: bool = True
    crc: bool = True
    crc_params: CrcParams = field(default_factory=CrcParams)
    boost: bool = True


@dataclass
class BitstreamHeader:
    width: int
    height: int
    format: int = FORMAT_420
    flags: int = 0
    bitdepth: int = 8
    crc_params: CrcParams = field(default_factory=CrcParams)
    ymax: int = 0
    chunk_lengths: tuple = ()
    checksum: int = 0
    version: int = VERSION

    @property
    def lmap(self) -> bool:
        return bool(self.flags & FLAG_LMAP)

    @property
    def crc(self) -> bool:
        return bool(self.flags & FLAG_CRC)

    @property
    def boost(self) -> bool:
        return bool(self.flags & FLAG_BOOST)

    @property
    def size(self) -> int:
        return _FIXED.size + 4 * len(self.chunk_lengths) + 4

    def pack(self) -> bytes:
        p = self.crc_params
        head = _FIXED.pack(MAGIC, self.version, self.format, self.flags, self.bitdepth,
                           self.width, self.height, p.blocks, p.partitions, p.scale,
                           self.ymax, len(self.chunk_lengths))
        lengths = struct.pack(f"<{len(self.chunk_lengths)}I", *self.chunk_lengths)
        return head + lengths + struct.pack("<I", self.checksum)

    @classmethod
    def unpack(cls, data: bytes) -> "BitstreamHeader":
        if len(data) < _FIXED.size:
            raise ContainerError("stream shorter than the fixed header")
        (magic, version, fmt, flags, bitdepth, width, height,
         blocks, partitions, scale, ymax, n) = _FIXED.unpack_from(data)
        if magic != MAGIC:
            raise ContainerError(f"bad magic {magic!r}")
        if version != VERSION:
            raise ContainerError(f"unsupported version {version}")
        if fmt not in (FORMAT_420, FORMAT_444):
            raise ContainerError(f"unknown format tag {fmt}")
        if bitdepth != 8:
            raise ContainerError(f"unsupported bit depth {bitdepth}")
        end = _FIXED.size + 4 * n + 4
        if len(data) < end:
            raise ContainerError("stream shorter than its chunk table")
        lengths = struct.unpack_from(f"<{n}I", data, _FIXED.size)
        (checksum,) = struct.unpack_from("<I", data, _FIXED.size + 4 * n)
        try:
            params = CrcParams(blocks, partitions, scale)
        except ParameterError as exc:
            raise ContainerError(f"invalid range table parameters: {exc}") from exc
        return cls(width, height, fmt, flags, bitdepth, params, ymax, tuple(lengths), checksum, version)


def _assemble(header: BitstreamHeader, chunks) -> bytes:
    payload = b"".join(chunks)
    header.chunk_lengths = tuple(len(c) for c in chunks)
    header.checksum = zlib.crc32(payload)
    return header.pack() + payload


def parse_stream(data: bytes):
    """Validate container framing and checksum; return ``(header, chunks)``."""
    header = BitstreamHeader.unpack(data)
    payload = data[header.size:]
    if len(payload) != sum(header.chunk_lengths):
        raise ContainerError(f"payload is {len(payload)} bytes, chunk table says {sum(header.chunk_lengths)}")
    if zlib.crc32(payload) != header.checksum:
        raise ContainerError("payload checksum mismatch")
    chunks = []
    pos = 0
    for n in header.chunk_lengths:
        chunks.append(payload[pos:pos + n])
        pos += n
    return header, chunks


def _encode_chunk(planes, config: PipelineConfig) -> bytes:
    enc = RangeEncoder()
    encode_plane_set(planes, config, enc)
    return enc.finish()


def _decode_chunk(chunk: bytes, config: PipelineConfig, dims) -> list:
    dec = RangeDecoder(chunk)
    planes = decode_plane_set(config, dec, dims)
    if dec.bytes_consumed != len(chunk):
        raise StreamError("trailing bytes after plane data")
    return planes


def chroma_config(luma: np.ndarray, lmap: bool, boost: bool, tables=None) -> PipelineConfig:
    """Configuration of the CbCr pass derived from the (decoded) luma plane."""
    guide = quantize_luma(luma, LMAP_SCALE) if lmap else None
    crc_filter = CrcFilter(tables, luma) if tables is not None else None
    return PipelineConfig(arity=2, lmap_enabled=lmap, boost_enabled=boost and lmap,
                          crc_filter=crc_filter, guide=guide)


def encode420(image: Image420, config: EncoderConfig = EncoderConfig()) -> bytes:
    """Losslessly code a 4:2:0 image: luma pass, range tables, CbCr pass."""
    if not isinstance(image, Image420):
        raise UsageError("encode420 expects an Image420")
    flags = (FLAG_LMAP if config.lmap else 0) | (FLAG_CRC if config.crc else 0) | (FLAG_BOOST if config.boost else 0)
    params = config.crc_params
    header = BitstreamHeader(image.width, image.height, FORMAT_420, flags, 8, params,
                             max_quantized_luma(params.scale))
    luma = image.y.samples
    chunks = [_encode_chunk([luma], PipelineConfig(arity=1))]
    tables = None
    if config.crc:
        tables = build_tables(image, params)
        chunks.extend(encode_tables(tables))
    cfg = chroma_config(luma, config.lmap, config.boost, tables)
    chunks.append(_encode_chunk([image.cb.samples, image.cr.samples], cfg))
    return _assemble(header, chunks)


def decode420(data: bytes) -> Image420:
    header, chunks = parse_stream(data)
    if header.format != FORMAT_420:
        raise ContainerError("stream does not hold a 4:2:0 image")
    w, h = header.width, header.height
    if w == 0 or h == 0 or w % 2 or h % 2:
        raise ContainerError(f"invalid 4:2:0 dimensions {w}x{h}")
    if header.ymax != max_quantized_luma(header.crc_params.scale):
        raise ContainerError("quantized luma maximum inconsistent with its scale")
    expected = 4 if header.crc else 2
    if len(chunks) != expected:
        raise ContainerError(f"expected {expected} chunks, found {len(chunks)}")
    y = _decode_chunk(chunks[0], PipelineConfig(arity=1), (h, w))[0]
    tables = None
    if header.crc:
        tables = decode_tables(chunks[1:3], header.crc_params, header.ymax)
    cfg = chroma_config(y, header.lmap, header.boost, tables)
    cb, cr = _decode_chunk(chunks[-1], cfg, (h // 2, w // 2))
    return Image420(Plane(y), Plane(cb), Plane(cr))


def encode444(image: Image444, config: EncoderConfig = EncoderConfig()) -> bytes:
    """Single arity-3 pass over a 4:4:4 image (no luma guidance or range tables)."""
    if not isinstance(image, Image444):
        raise UsageError("encode444 expects an Image444")
    flags = FLAG_YCBCR if image.order == YCBCR else 0
    header = BitstreamHeader(image.width, image.height, FORMAT_444, flags, 8, config.crc_params,
                             max_quantized_luma(config.crc_params.scale))
    chunk = _encode_chunk([p.samples for p in image.planes], PipelineConfig(arity=3))
    return _assemble(header, [chunk])


def decode444(data: bytes) -> Image444:
    header, chunks = parse_stream(data)
    if header.format != FORMAT_444:
        raise ContainerError("stream does not hold a 4:4:4 image")
    if header.width == 0 or header.height == 0:
        raise ContainerError("empty image")
    if len(chunks) != 1:
        raise ContainerError(f"expected 1 chunk, found {len(chunks)}")
    planes = _decode_chunk(chunks[0], PipelineConfig(arity=3), (header.height, header.width))
    return Image444(tuple(Plane(p) for p in planes), YCBCR if header.flags & FLAG_YCBCR else RGB)


def decode(data: bytes):
    """Decode either container format."""
    header = BitstreamHeader.unpack(data)
    return decode444(data) if header.format == FORMAT_444 else decode420(data)


def chunk_breakdown(data: bytes) -> dict:
    """Byte counts per chunk role, for reporting."""
    header = BitstreamHeader.unpack(data)
    lengths = header.chunk_lengths
    if header.format == FORMAT_444:
        return {"header": header.size, "rgb": lengths[0] if lengths else 0}
    out = {"header": header.size, "y": lengths[0] if lengths else 0, "crc": 0, "cbcr": lengths[-1] if lengths else 0}
    if header.crc and len(lengths) == 4:
        out["crc"] = lengths[1] + lengths[2]
    return out


def bits_per_pixel(data: bytes, image) -> float:
    return 8 * len(data) / (image.width * image.height)


