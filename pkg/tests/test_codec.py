import struct

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from scf420.codec import (
    FLAG_CRC,
    FLAG_LMAP,
    BitstreamHeader,
    EncoderConfig,
    chunk_breakdown,
    decode,
    decode420,
    decode444,
    encode420,
    encode444,
)
from scf420.crc import CrcParams
from scf420.errors import ContainerError, UsageError
from scf420.pixelio import YCBCR, Image420, Image444
from scf420.synthetic import mixed_image

from helpers import few_color_420

FLAG_SETS = [EncoderConfig(lmap=l, crc=c, boost=b) for l in (0, 1) for c in (0, 1) for b in (0, 1)]


def test_constant_2x2_is_tiny():
    img = Image420(np.full((2, 2), 9), np.full((1, 1), 100), np.full((1, 1), 150))
    data = encode420(img)
    parts = chunk_breakdown(data)
    assert parts["y"] + parts["cbcr"] <= 16
    assert decode420(data) == img
    plain = encode420(img, EncoderConfig(crc=False))
    assert len(plain) <= BitstreamHeader.unpack(plain).size + 16


def test_no_crc_has_two_chunks(rng):
    data = encode420(few_color_420(rng, 16, 16), EncoderConfig(crc=False))
    h = BitstreamHeader.unpack(data)
    assert len(h.chunk_lengths) == 2
    assert h.flags & FLAG_CRC == 0 and h.flags & FLAG_LMAP
    assert chunk_breakdown(data)["crc"] == 0


@pytest.mark.parametrize("cfg", FLAG_SETS)
def test_roundtrip_every_flag_set(cfg, rng):
    for _ in range(4):
        img = mixed_image(24, 32, rng)
        assert decode420(encode420(img, cfg)) == img


@given(st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32 - 1), st.sampled_from(FLAG_SETS))
def test_roundtrip_property(hh, hw, seed, cfg):
    img = mixed_image(2 * hh, 2 * hw, np.random.default_rng(seed))
    assert decode420(encode420(img, cfg)) == img


def test_non_default_crc_params(rng):
    img = mixed_image(32, 32, rng)
    cfg = EncoderConfig(crc_params=CrcParams(2, 16, 8))
    data = encode420(img, cfg)
    assert BitstreamHeader.unpack(data).crc_params == CrcParams(2, 16, 8)
    assert decode420(data) == img


def test_corrupted_checksum(rng):
    data = bytearray(encode420(few_color_420(rng, 8, 8)))
    data[-1] ^= 0x40
    with pytest.raises(ContainerError, match="checksum"):
        decode420(bytes(data))


def test_header_only_stream(rng):
    data = encode420(few_color_420(rng, 8, 8))
    h = BitstreamHeader.unpack(data)
    with pytest.raises(ContainerError):
        decode420(data[: h.size])
    with pytest.raises(ContainerError):
        decode420(data[:10])


def test_bad_magic_and_version(rng):
    data = encode420(few_color_420(rng, 8, 8))
    with pytest.raises(ContainerError):
        decode(b"XXXX" + data[4:])
    with pytest.raises(ContainerError):
        decode(data[:4] + bytes([9]) + data[5:])


def test_tampered_dimensions(rng):
    data = bytearray(encode420(few_color_420(rng, 8, 8)))
    struct.pack_into("<I", data, 8, 7)
    with pytest.raises(ContainerError):
        decode420(bytes(data))


def test_444_gray_ramp():
    ramp = np.tile(np.arange(0, 256, 4, dtype=np.uint8), (16, 1))
    img = Image444.from_array(np.stack([ramp] * 3, axis=-1))
    assert decode444(encode444(img)) == img
    ycc = Image444(img.planes, YCBCR)
    assert decode(encode444(ycc)) == ycc


def test_444_constant_is_tiny():
    img = Image444.from_array(np.full((32, 32, 3), 77, np.uint8))
    assert chunk_breakdown(encode444(img))["rgb"] < 16


def test_format_tag_checked(rng):
    data = encode420(few_color_420(rng, 8, 8))
    with pytest.raises(ContainerError):
        decode444(data)
    with pytest.raises(ContainerError):
        decode420(encode444(Image444.from_array(np.zeros((2, 2, 3), np.uint8))))


def test_wrong_image_type():
    with pytest.raises(UsageError):
        encode420(Image444.from_array(np.zeros((2, 2, 3), np.uint8)))
