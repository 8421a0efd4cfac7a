import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from scf420.errors import DimensionError, FormatError, UsageError
from scf420.pixelio import (
    I420,
    PLANAR444,
    YCBCR,
    Image420,
    Image444,
    Plane,
    chroma_downsample_420,
    planar_from_bytes,
    planar_to_bytes,
    read_image,
    read_planar,
    read_pgm,
    rgb_to_420,
    rgb_to_ycbcr709,
    rgb_to_ycbcr709_exact,
    upsample_nearest,
    write_planar,
    write_pnm,
)


def test_i420_layout(tmp_path):
    f = tmp_path / "a.yuv"
    f.write_bytes(bytes([1, 2, 3, 4, 9, 7]))
    img = read_planar(f, 2, 2)
    assert img.y.samples.tolist() == [[1, 2], [3, 4]]
    assert img.cb.samples.tolist() == [[9]]
    assert img.cr.samples.tolist() == [[7]]


def test_i420_short_file(tmp_path):
    f = tmp_path / "a.yuv"
    f.write_bytes(bytes(5))
    with pytest.raises(FormatError):
        read_planar(f, 2, 2)


def test_i420_odd_dimensions(tmp_path):
    f = tmp_path / "a.yuv"
    f.write_bytes(bytes(9))
    with pytest.raises(DimensionError):
        read_planar(f, 3, 2)


def test_planar444_layout():
    data = bytes(range(48))
    img = planar_from_bytes(data, 4, 4, PLANAR444)
    assert isinstance(img, Image444) and img.order == YCBCR
    assert [p.samples.shape for p in img.planes] == [(4, 4)] * 3
    assert img.planes[2].samples[0, 0] == 32


def test_write_size_and_reread(tmp_path, rng):
    img = Image420(rng.integers(0, 256, (16, 16)), rng.integers(0, 256, (8, 8)), rng.integers(0, 256, (8, 8)))
    f = tmp_path / "x.yuv"
    assert write_planar(img, f) == 16 * 16 * 3 // 2
    assert read_planar(f, 16, 16) == img


def test_zero_size_image():
    with pytest.raises(DimensionError):
        Image420(np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, 0)))


def test_plane_rejects_out_of_range():
    with pytest.raises(FormatError):
        Plane(np.array([[256]]))


def test_conversion_gray_axis():
    black = Image444.from_array(np.zeros((1, 1, 3), np.uint8))
    white = Image444.from_array(np.full((1, 1, 3), 255, np.uint8))
    assert [int(p.samples[0, 0]) for p in rgb_to_ycbcr709(black).planes] == [0, 128, 128]
    assert [int(p.samples[0, 0]) for p in rgb_to_ycbcr709(white).planes] == [255, 128, 128]


def test_conversion_red_against_matrix():
    # BT.709 full-range matrix written out independently
    m = np.array([[0.2126, 0.7152, 0.0722],
                  [-0.2126 / 1.8556, -0.7152 / 1.8556, 0.5],
                  [0.5, -0.7152 / 1.5748, -0.0722 / 1.5748]])
    want = np.clip(np.floor(m @ np.array([255.0, 0, 0]) + [0, 128, 128] + 0.5), 0, 255).astype(int)
    img = Image444.from_array(np.array([[[255, 0, 0]]], np.uint8))
    got = [int(p.samples[0, 0]) for p in rgb_to_ycbcr709(img).planes]
    assert got == want.tolist() == [54, 99, 255]


def test_conversion_needs_rgb():
    img = Image444.from_array(np.zeros((2, 2, 3), np.uint8), YCBCR)
    with pytest.raises(UsageError):
        rgb_to_ycbcr709(img)


@given(arrays(np.uint8, (6, 3)))
def test_vectorised_conversion_matches_exact(rgb):
    img = Image444.from_array(rgb.reshape(2, 3, 3))
    out = np.stack([p.samples for p in rgb_to_ycbcr709(img).planes], axis=-1).reshape(-1, 3)
    for px, got in zip(rgb, out):
        assert tuple(got) == rgb_to_ycbcr709_exact(*map(int, px))


def _ycc(cb):
    cb = np.asarray(cb, np.uint8)
    return Image444((Plane(np.zeros_like(cb)), Plane(cb), Plane(cb)), YCBCR)


def test_downsample_examples():
    assert chroma_downsample_420(_ycc([[10, 10], [10, 10]])).cb.samples[0, 0] == 10
    assert chroma_downsample_420(_ycc([[0, 0], [0, 2]])).cb.samples[0, 0] == 1


def test_downsample_odd():
    with pytest.raises(DimensionError):
        chroma_downsample_420(_ycc(np.zeros((3, 2))))


def test_downsample_against_block_average(rng):
    cb = rng.integers(0, 256, (8, 8))
    out = chroma_downsample_420(_ycc(cb)).cb.samples
    for i in range(4):
        for j in range(4):
            block = cb[2 * i:2 * i + 2, 2 * j:2 * j + 2]
            assert out[i, j] == int(np.floor(block.mean() + 0.5))


def test_pnm_roundtrip(tmp_path, rng):
    rgb = Image444.from_array(rng.integers(0, 256, (6, 4, 3)).astype(np.uint8))
    f = tmp_path / "a.ppm"
    write_pnm(rgb, f)
    assert read_image(f) == rgb
    g = tmp_path / "a.pgm"
    write_pnm(rgb.planes[0], g)
    assert read_pgm(g) == rgb.planes[0]


def test_read_image_garbage(tmp_path):
    f = tmp_path / "bad.ppm"
    f.write_bytes(b"not an image")
    with pytest.raises(FormatError):
        read_image(f)


def test_rgb_to_420_shapes(rng):
    img = rgb_to_420(Image444.from_array(rng.integers(0, 256, (4, 6, 3)).astype(np.uint8)))
    assert img.cb.samples.shape == (2, 3)
    assert upsample_nearest(img.cb.samples).shape == (4, 6)


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_planar_bytes_roundtrip(hh, hw, data):
    h, w = 2 * hh, 2 * hw
    raw = data.draw(st.binary(min_size=h * w * 3 // 2, max_size=h * w * 3 // 2))
    assert planar_to_bytes(planar_from_bytes(raw, w, h, I420)) == raw
