"""Stage 2: colour palette, MAP / luma-guided prediction and index coding."""

from __future__ import annotations

import enum
from typing import NamedTuple

import numpy as np

from .color import pack, pack_planes, unpack
from .context import pattern_at
from .errors import StreamError

T_SIM = 4
COMPACT_LIMIT = 1 << 16


class Source(enum.Enum):
    LMAP_LEFT = "LMAP_LEFT"
    LMAP_TOP = "LMAP_TOP"
    MAP = "MAP"


class Prediction(NamedTuple):
    predicted: tuple
    source: Source


def med(a: int, b: int, c: int) -> int:
    """Median edge detector: median(a, b, a + b - c)."""
    if a >= b:
        if c >= a:
            return b
        if c <= b:
            return a
    else:
        if c >= b:
            return a
        if c <= a:
            return b
    return a + b - c


def med_packed(a: int, b: int, c: int, arity: int, bitdepth: int) -> int:
    if arity == 1:
        return med(a, b, c)
    mask = (1 << bitdepth) - 1
    out = 0
    for k in range(arity - 1, -1, -1):
        s = bitdepth * k
        out = (out << bitdepth) | med((a >> s) & mask, (b >> s) & mask, (c >> s) & mask)
    return out


def map_predict(planes, position, bitdepth: int = 8) -> Prediction:
    """Per-component MED prediction from the causal neighbours A, B, C."""
    grid = pack_planes(planes, bitdepth)
    r, c = position
    a, b, cc = pattern_at(grid, r, c)[:3]
    arity = len(planes)
    return Prediction(unpack(med_packed(a, b, cc, arity, bitdepth), arity, bitdepth), Source.MAP)


def lmap_predict(chroma_planes, luma2, position, bitdepth: int = 8) -> Prediction:
    """Copy the left or top chroma pair when the downsampled luma repeats there.

    ``luma2`` is the luma plane downsampled at chroma resolution with
    precision scale 2.  A comparand outside the image fails its test.
    """
    luma2 = np.asarray(luma2)
    r, c = position
    here = luma2[r, c]
    if c > 0 and here == luma2[r, c - 1]:
        return Prediction(tuple(int(p[r, c - 1]) for p in chroma_planes), Source.LMAP_LEFT)
    if r > 0 and here == luma2[r - 1, c]:
        return Prediction(tuple(int(p[r - 1, c]) for p in chroma_planes), Source.LMAP_TOP)
    return map_predict(chroma_planes, position, bitdepth)


class Palette:
    """Insertion-ordered colours not coded in Stage 1, with occurrence counts."""

    def __init__(self, arity: int, bitdepth: int = 8, compact_limit: int = COMPACT_LIMIT):
        self.arity = arity
        self.bitdepth = bitdepth
        self.compact_limit = compact_limit
        self.colors = []
        self.index = {}
        self.total = 0
        self._counts = np.zeros(16, dtype=np.int64)
        self._comps = np.zeros((16, arity), dtype=np.int64)

    def __len__(self):
        return len(self.colors)

    def __contains__(self, color):
        return color in self.index

    @property
    def counts(self) -> np.ndarray:
        return self._counts[: len(self.colors)]

    @property
    def comps(self) -> np.ndarray:
        return self._comps[: len(self.colors)]

    def add(self, color: int, count: int = 1) -> int:
        if color in self.index:
            raise ValueError(f"colour {color} already in palette")
        n = len(self.colors)
        if n == len(self._counts):
            self._counts = np.concatenate([self._counts, np.zeros(n, dtype=np.int64)])
            self._comps = np.concatenate([self._comps, np.zeros((n, self.arity), dtype=np.int64)])
        self.colors.append(color)
        self.index[color] = n
        self._counts[n] = count
        self._comps[n] = unpack(color, self.arity, self.bitdepth)
        self.total += count
        self._maybe_compact()
        return n

    def increment(self, i: int) -> None:
        self._counts[i] += 1
        self.total += 1
        self._maybe_compact()

    def _maybe_compact(self) -> None:
        if self.total > self.compact_limit:
            c = self.counts
            np.maximum(c >> 1, 1, out=c)
            self.total = int(c.sum())

    def entries(self) -> list:
        return [(unpack(c, self.arity, self.bitdepth), int(n)) for c, n in zip(self.colors, self.counts)]

    @classmethod
    def from_entries(cls, entries, arity: int, bitdepth: int = 8) -> "Palette":
        pal = cls(arity, bitdepth)
        for color, count in entries:
            pal.add(pack(color, bitdepth), count)
        return pal

    def split_masks(self, predicted_comps, masks=None, t_sim: int = T_SIM):
        """Boolean near/far masks over the palette; ``masks`` filters per component."""
        comps = self.comps
        dist = np.abs(comps - np.asarray(predicted_comps, dtype=np.int64)).max(axis=1)
        near = dist <= t_sim
        if masks is None:
            return near, ~near
        valid = np.ones(len(comps), dtype=bool)
        for k, m in enumerate(masks):
            valid &= m[comps[:, k]]
        return near & valid, valid & ~near


def split_palette(palette: Palette, prediction: Prediction, masks=None, t_sim: int = T_SIM):
    """Return ``(near, far)`` lists of ``(colour, count)`` sub-palette entries."""
    near, far = palette.split_masks(prediction.predicted, masks, t_sim)
    entries = palette.entries()
    return ([e for e, m in zip(entries, near) if m], [e for e, m in zip(entries, far) if m])


def stage2_code(coder, palette: Palette, predicted: int, predicted_comps, color, in_model, near_model,
                masks=None, boost: int | None = None, t_sim: int = T_SIM):
    """Code palette membership, sub-palette choice and index.

    Returns the palette index of the colour, or ``None`` when the colour is
    unknown and must go to Stage 3.  ``boost`` (a packed colour) has its
    count doubled for this estimate only.
    """
    if coder.encoding:
        idx = palette.index.get(color)
        hit = coder.code_bit(in_model, 0 if idx is None else 1)
    else:
        idx = None
        hit = coder.code_bit(in_model)
    if not hit:
        return None
    if not palette.colors:
        raise StreamError("palette hit signalled with an empty palette")
    near, far = palette.split_masks(predicted_comps, masks, t_sim)
    if coder.encoding:
        use_far = coder.code_bit(near_model, 0 if near[idx] else 1)
    else:
        use_far = coder.code_bit(near_model)
    sub = far if use_far else near
    weights = np.where(sub, palette.counts, 0)
    if boost is not None:
        j = palette.index.get(boost)
        if j is not None:
            weights[j] *= 2
    cums = np.zeros(len(weights) + 1, dtype=np.int64)
    np.cumsum(weights, out=cums[1:])
    if cums[-1] == 0:
        raise StreamError("selected sub-palette is empty")
    return coder.code_index(cums, idx)


def stage2_probability(palette: Palette, predicted_comps, color: int, masks=None,
                       boost: int | None = None, t_sim: int = T_SIM) -> float:
    """Index probability of ``color`` within its sub-palette (flags excluded)."""
    near, far = palette.split_masks(predicted_comps, masks, t_sim)
    i = palette.index[color]
    sub = near if near[i] else far
    weights = np.where(sub, palette.counts, 0)
    if boost is not None and boost in palette.index:
        weights[palette.index[boost]] *= 2
    return float(weights[i] / weights.sum())
