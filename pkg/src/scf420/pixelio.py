"""Planar image containers, raw/PNM file I/O and colour preparation.

Samples are held as 2-D ``uint8`` numpy arrays indexed ``[row, column]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError, FormatError, UsageError

I420 = "I420"
PLANAR444 = "PLANAR444"
LAYOUTS = (I420, PLANAR444)

RGB = "RGB"
YCBCR = "YCbCr"

# BT.709 luma coefficients in units of 1/10000
SCALE = 10000
KR_N = 2126
KB_N = 722
KG_N = SCALE - KR_N - KB_N


@dataclass(eq=False)
class Plane:
    """One rectangular sample grid."""

    samples: np.ndarray
    bitdepth: int = 8

    def __post_init__(self):
        a = np.asarray(self.samples)
        if a.ndim != 2:
            raise DimensionError("plane samples must be two-dimensional")
        if self.bitdepth != 8:
            raise FormatError(f"unsupported bit depth {self.bitdepth}")
        if a.size and (a.min() < 0 or a.max() >= 1 << self.bitdepth):
            raise FormatError("sample out of range for bit depth")
        self.samples = np.ascontiguousarray(a, dtype=np.uint8)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Plane):
            return NotImplemented
        return self.bitdepth == other.bitdepth and np.array_equal(self.samples, other.samples)

    def __repr__(self):
        return f"Plane({self.width}x{self.height}, {self.bitdepth} bit)"


@dataclass(eq=False)
class Image420:
    """YCbCr 4:2:0 image: full-size luma plus two half-size chroma planes."""

    y: Plane
    cb: Plane
    cr: Plane

    def __post_init__(self):
        for name in ("y", "cb", "cr"):
            v = getattr(self, name)
            if not isinstance(v, Plane):
                setattr(self, name, Plane(v))
        h, w = self.y.height, self.y.width
        if h == 0 or w == 0:
            raise DimensionError("empty image")
        if h % 2 or w % 2:
            raise DimensionError(f"4:2:0 requires even dimensions, got {w}x{h}")
        for c in (self.cb, self.cr):
            if (c.height, c.width) != (h // 2, w // 2):
                raise DimensionError("chroma planes must be half the luma size")

    @property
    def width(self) -> int:
        return self.y.width

    @property
    def height(self) -> int:
        return self.y.height

    def __eq__(self, other):
        if not isinstance(other, Image420):
            return NotImplemented
        return self.y == other.y and self.cb == other.cb and self.cr == other.cr

    def __repr__(self):
        return f"Image420({self.width}x{self.height})"


@dataclass(eq=False)
class Image444:
    """Three equally sized planes plus a channel-order tag."""

    planes: tuple
    order: str = RGB

    def __post_init__(self):
        planes = tuple(p if isinstance(p, Plane) else Plane(p) for p in self.planes)
        if len(planes) != 3:
            raise DimensionError("a 4:4:4 image has exactly three planes")
        shape = planes[0].samples.shape
        if 0 in shape:
            raise DimensionError("empty image")
        if any(p.samples.shape != shape for p in planes):
            raise DimensionError("4:4:4 planes must share dimensions")
        if self.order not in (RGB, YCBCR):
            raise UsageError(f"unknown channel order {self.order!r}")
        self.planes = planes

    @property
    def width(self) -> int:
        return self.planes[0].width

    @property
    def height(self) -> int:
        return self.planes[0].height

    def stack(self) -> np.ndarray:
        """Return an ``(H, W, 3)`` array."""
        return np.stack([p.samples for p in self.planes], axis=-1)

    @classmethod
    def from_array(cls, array, order: str = RGB) -> "Image444":
        a = np.asarray(array)
        if a.ndim != 3 or a.shape[2] != 3:
            raise DimensionError("expected an (H, W, 3) array")
        return cls(tuple(Plane(a[:, :, k]) for k in range(3)), order)

    def __eq__(self, other):
        if not isinstance(other, Image444):
            return NotImplemented
        return self.order == other.order and self.planes == other.planes

    def __repr__(self):
        return f"Image444({self.width}x{self.height}, {self.order})"


def _planar_size(width: int, height: int, layout: str) -> int:
    if layout == I420:
        return width * height * 3 // 2
    if layout == PLANAR444:
        return width * height * 3
    raise UsageError(f"unknown layout {layout!r}")


def read_planar(path, width: int, height: int, layout: str = I420):
    """Read a raw planar file (Y, Cb, Cr order; channel-major for 4:4:4)."""
    if width <= 0 or height <= 0:
        raise DimensionError("width and height must be positive")
    if layout == I420 and (width % 2 or height % 2):
        raise DimensionError(f"I420 requires even dimensions, got {width}x{height}")
    expected = _planar_size(width, height, layout)
    with open(path, "rb") as f:
        data = f.read()
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {width}x{height} {layout}, got {len(data)}")
    return planar_from_bytes(data, width, height, layout)


def planar_from_bytes(data: bytes, width: int, height: int, layout: str = I420):
    if len(data) != _planar_size(width, height, layout):
        raise FormatError("raw data size does not match dimensions")
    buf = np.frombuffer(data, dtype=np.uint8)
    n = width * height
    if layout == I420:
        q = n // 4
        return Image420(
            Plane(buf[:n].reshape(height, width)),
            Plane(buf[n:n + q].reshape(height // 2, width // 2)),
            Plane(buf[n + q:].reshape(height // 2, width // 2)),
        )
    planes = tuple(Plane(buf[k * n:(k + 1) * n].reshape(height, width)) for k in range(3))
    return Image444(planes, YCBCR)


def planar_to_bytes(image) -> bytes:
    if isinstance(image, Image420):
        planes = (image.y, image.cb, image.cr)
    elif isinstance(image, Image444):
        planes = image.planes
    else:
        raise UsageError("expected Image420 or Image444")
    return b"".join(p.samples.tobytes() for p in planes)


def write_planar(image, path) -> int:
    """Write ``image`` as raw planar samples; return the byte count."""
    data = planar_to_bytes(image)
    with open(path, "wb") as f:
        f.write(data)
    return len(data)


def read_image(path, order: str = RGB) -> Image444:
    """Read a PPM/PNG/... colour image through Pillow as 8-bit RGB."""
    from PIL import Image

    try:
        with Image.open(path) as im:
            rgb = np.asarray(im.convert("RGB"))
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc
    return Image444.from_array(rgb, order)


def read_pgm(path) -> Plane:
    from PIL import Image

    try:
        with Image.open(path) as im:
            if im.mode not in ("L", "P", "1"):
                raise FormatError(f"{path}: not a grayscale image (mode {im.mode})")
            return Plane(np.asarray(im.convert("L")))
    except OSError as exc:
        raise FormatError(f"{path}: {exc}") from exc


def write_pnm(obj, path) -> int:
    """Write a Plane as binary PGM (P5) or an Image444 as binary PPM (P6)."""
    from PIL import Image

    if isinstance(obj, Plane):
        im = Image.fromarray(obj.samples, mode="L")
    elif isinstance(obj, Image444):
        im = Image.fromarray(obj.stack(), mode="RGB")
    else:
        raise UsageError("expected Plane or Image444")
    im.save(path, format="PPM")
    return os.path.getsize(path)


def _div_round(num, den: int):
    """``floor(num / den + 1/2)`` in integers."""
    return (2 * num + den) // (2 * den)


def rgb_to_ycbcr709(image: Image444) -> Image444:
    """Full-range BT.709 RGB to YCbCr, rounded half up and clamped.

    Evaluated exactly in integers (coefficients scaled by 10000), so ties
    round the same way on every platform.
    """
    if image.order != RGB:
        raise UsageError("rgb_to_ycbcr709 expects an RGB image")
    rgb = image.stack().astype(np.int64)
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    y4 = KR_N * r + KG_N * g + KB_N * b
    y = _div_round(y4, SCALE)
    cb = _div_round(SCALE * b - y4, 2 * (SCALE - KB_N)) + 128
    cr = _div_round(SCALE * r - y4, 2 * (SCALE - KR_N)) + 128
    out = [np.clip(c, 0, 255).astype(np.uint8) for c in (y, cb, cr)]
    return Image444(tuple(Plane(c) for c in out), YCBCR)


def rgb_to_ycbcr709_exact(r: int, g: int, b: int) -> tuple:
    """Scalar conversion in exact rational arithmetic (reference path)."""
    kr, kb = Fraction(2126, 10000), Fraction(722, 10000)
    kg = 1 - kr - kb
    y = kr * r + kg * g + kb * b
    cb = (b - y) / (2 * (1 - kb)) + 128
    cr = (r - y) / (2 * (1 - kr)) + 128

    def q(v):
        return min(255, max(0, int((v + Fraction(1, 2)).__floor__())))

    return q(y), q(cb), q(cr)


def _box_420(plane: np.ndarray) -> np.ndarray:
    p = plane.astype(np.uint16)
    s = p[0::2, 0::2] + p[0::2, 1::2] + p[1::2, 0::2] + p[1::2, 1::2]
    return ((s + 2) // 4).astype(np.uint8)


def chroma_downsample_420(image: Image444) -> Image420:
    """Average each 2x2 chroma block (round half up); luma is kept."""
    if image.order != YCBCR:
        raise UsageError("chroma_downsample_420 expects a YCbCr image")
    if image.width % 2 or image.height % 2:
        raise DimensionError(f"odd dimensions {image.width}x{image.height}")
    y, cb, cr = image.planes
    return Image420(y, Plane(_box_420(cb.samples)), Plane(_box_420(cr.samples)))


def rgb_to_420(image: Image444) -> Image420:
    """The dataset preparation chain: BT.709 conversion then 4:2:0 box filter."""
    return chroma_downsample_420(rgb_to_ycbcr709(image))


def upsample_nearest(plane: np.ndarray, factor: int = 2) -> np.ndarray:
    return np.repeat(np.repeat(np.asarray(plane), factor, axis=0), factor, axis=1)
