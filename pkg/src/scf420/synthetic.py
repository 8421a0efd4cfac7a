"""Seeded generators of screen-content-like test images.

Images are drawn in RGB (flat UI panels, bitmap-font text with optional
anti-aliasing, gradients and photographic-style noise patches) and prepared
like a real dataset:
BT.709 conversion followed by 4:2:0 box downsampling.
"""

from __future__ import annotations

import numpy as np

from .pixelio import Image420, Image444, rgb_to_420

_FONT_SEED = 20240601


def _font(n_glyphs: int = 40, h: int = 7, w: int = 5) -> np.ndarray:
    rng = np.random.default_rng(_FONT_SEED)
    glyphs = rng.random((n_glyphs, h, w)) < 0.42
    glyphs[:, :, 0] |= rng.random((n_glyphs, h)) < 0.5
    return glyphs


FONT = _font()


def _palette(rng, n: int) -> np.ndarray:
    return rng.integers(0, 256, size=(n, 3), dtype=np.int64)


def _glyph_layer(height: int, width: int, rng, scale: int) -> np.ndarray:
    """Boolean mask of lines of glyphs filling a ``height x width`` panel."""
    layer = np.zeros((height, width), dtype=bool)
    gh, gw = FONT.shape[1] * scale, FONT.shape[2] * scale
    r = 1
    while r + gh <= height:
        c = 1
        while c + gw <= width:
            if rng.random() < 0.15:
                c += gw + scale
                continue
            g = FONT[rng.integers(len(FONT))]
            if scale > 1:
                g = np.kron(g, np.ones((scale, scale), dtype=bool))
            layer[r:r + gh, c:c + gw] |= g
            c += gw + scale
        r += gh + 2 * scale
    return layer


def _soften(mask: np.ndarray) -> np.ndarray:
    """Coverage in [0, 1] from a [1, 2, 1] blur in both directions."""
    a = np.pad(mask.astype(np.float64), 1, mode="edge")
    a = (a[:-2] + 2 * a[1:-1] + a[2:]) / 4
    return (a[:, :-2] + 2 * a[:, 1:-1] + a[:, 2:]) / 4


def draw_text(canvas: np.ndarray, rng, top: int, left: int, bottom: int, right: int,
              fg, scale: int = 1, antialias: bool = False) -> None:
    layer = _glyph_layer(bottom - top, right - left, rng, scale)
    region = canvas[top:bottom, left:right]
    if antialias:
        alpha = _soften(layer)[..., None]
        region[:] = np.rint(region * (1 - alpha) + np.asarray(fg) * alpha).astype(np.int64)
    else:
        region[layer] = fg


def screen_content_rgb(height: int, width: int, rng, *, n_colors: int = 8, text: bool = True,
                       gradient: bool = False, noise: bool = False, antialias: bool = False,
                       panels: int | None = None) -> np.ndarray:
    """Return an ``(height, width, 3)`` uint8 screen-content image."""
    pal = _palette(rng, n_colors)
    canvas = np.empty((height, width, 3), dtype=np.int64)
    canvas[:] = pal[0]
    n_panels = panels if panels is not None else int(rng.integers(1, 5))
    for _ in range(n_panels):
        t = int(rng.integers(0, max(1, height - 2)))
        l = int(rng.integers(0, max(1, width - 2)))
        b = int(rng.integers(t + 1, height + 1))
        r = int(rng.integers(l + 1, width + 1))
        bg = pal[rng.integers(n_colors)]
        canvas[t:b, l:r] = bg
        if text and b - t >= 9 and r - l >= 7:
            fg = pal[rng.integers(n_colors)]
            draw_text(canvas, rng, t, l, b, r, fg, scale=int(rng.choice([1, 1, 2])), antialias=antialias)
    if gradient and height >= 4 and width >= 4:
        t = int(rng.integers(0, height // 2))
        l = int(rng.integers(0, width // 2))
        b = int(rng.integers(t + 2, height + 1))
        r = int(rng.integers(l + 2, width + 1))
        c0, c1 = _palette(rng, 2)
        ramp = np.linspace(0.0, 1.0, r - l)[None, :, None]
        canvas[t:b, l:r] = np.rint(c0 + (c1 - c0) * ramp).astype(np.int64)
    if noise and height >= 4 and width >= 4:
        t = int(rng.integers(0, height // 2))
        l = int(rng.integers(0, width // 2))
        b = int(rng.integers(t + 2, height + 1))
        r = int(rng.integers(l + 2, width + 1))
        base = pal[rng.integers(n_colors)]
        patch = base + rng.normal(0, 24, size=(b - t, r - l, 3))
        canvas[t:b, l:r] = np.clip(np.rint(patch), 0, 255).astype(np.int64)
    return np.clip(canvas, 0, 255).astype(np.uint8)


def screen_content_420(height: int, width: int, seed=None, **kwargs) -> Image420:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    rgb = screen_content_rgb(height, width, rng, **kwargs)
    return rgb_to_420(Image444.from_array(rgb))


def mixed_image(height: int, width: int, rng) -> Image420:
    """One image from the round-trip corpus: text, gradients, noise or a mixture."""
    kind = rng.integers(5)
    if kind == 0:
        return screen_content_420(height, width, rng, n_colors=int(rng.integers(2, 6)))
    if kind == 1:
        return screen_content_420(height, width, rng, gradient=True)
    if kind == 2:
        return screen_content_420(height, width, rng, noise=True)
    if kind == 3:
        return screen_content_420(height, width, rng, gradient=True, noise=True, n_colors=12)
    y = rng.integers(0, 256, size=(height, width), dtype=np.uint8)
    cb = rng.integers(0, 256, size=(height // 2, width // 2), dtype=np.uint8)
    cr = rng.integers(0, 256, size=(height // 2, width // 2), dtype=np.uint8)
    return Image420(y, cb, cr)


def ablation_corpus(n: int = 20, size: int = 256, seed: int = 7) -> list:
    """Text/UI images whose chroma structure follows luma: ``[(name, Image420)]``.

    Text is anti-aliased, so edge pixels blend foreground and background and
    their chroma moves with their luma, as in rendered screen captures.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        img = screen_content_420(size, size, rng, n_colors=int(rng.integers(4, 12)), antialias=True,
                                 panels=int(rng.integers(4, 11)), gradient=bool(k % 4 == 1),
                                 noise=bool(k % 5 == 2))
        out.append((f"synthetic_{k:02d}", img))
    return out
