"""Per-pixel three-stage coding of a plane set of arity 1, 2 or 3.

One loop serves both directions: the coder object decides whether a symbol
is written or read, so encoder and decoder run the identical sequence of
model queries and updates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .color import pack, pack_planes, unpack, unpack_grid
from .context import ContextStore, pattern_at, stage1_table
from .errors import DimensionError, ParameterError, StreamError
from .palette import T_SIM, Palette, med_packed, stage2_code
from .rangecoder import BitModel
from .residual import ErrorHistogram, stage3_code

STAGE1, STAGE2, STAGE3 = 1, 2, 3


@dataclass
class PipelineConfig:
    """Options of one plane-set pass.

    ``guide`` is the luma plane downsampled to this plane's resolution with
    precision scale 2; it is required when ``lmap_enabled``.  ``crc_filter``
    answers per-position chroma range queries.
    """

    arity: int
    bitdepth: int = 8
    lmap_enabled: bool = False
    boost_enabled: bool = False
    crc_filter: object = None
    guide: np.ndarray = None
    t_sim: int = T_SIM

    def __post_init__(self):
        if self.arity not in (1, 2, 3):
            raise ParameterError(f"arity must be 1, 2 or 3, got {self.arity}")
        if self.arity != 2 and (self.lmap_enabled or self.boost_enabled or self.crc_filter is not None):
            raise ParameterError("luma guidance, boost and range filtering need arity 2")
        if self.lmap_enabled and self.guide is None:
            raise ParameterError("luma-guided prediction needs a guide plane")


@dataclass
class PlaneSetState:
    """Adaptive model state of one pass."""

    config: PipelineConfig
    store: ContextStore = field(default_factory=ContextStore)
    palette: Palette = None
    in_model: BitModel = field(default_factory=BitModel)
    near_model: BitModel = field(default_factory=BitModel)
    hists: list = None
    stage_counts: list = field(default_factory=lambda: [0, 0, 0, 0])

    def __post_init__(self):
        cfg = self.config
        if self.palette is None:
            self.palette = Palette(cfg.arity, cfg.bitdepth)
        if self.hists is None:
            self.hists = [ErrorHistogram(1 << cfg.bitdepth) for _ in range(cfg.arity)]


def _run(grid, state: PlaneSetState, coder, events=None) -> None:
    cfg = state.config
    height = len(grid)
    width = len(grid[0])
    encoding = coder.encoding
    arity = cfg.arity
    bitdepth = cfg.bitdepth
    t_sim = cfg.t_sim
    lookup = state.store.lookup
    update = state.store.update
    palette = state.palette
    pal_colors = palette.colors
    in_model = state.in_model
    near_model = state.near_model
    hists = state.hists
    counts = state.stage_counts
    code_index = coder.code_index
    lmap = cfg.lmap_enabled
    boost_on = cfg.boost_enabled
    crc = cfg.crc_filter
    guide = None
    if lmap:
        guide = np.asarray(cfg.guide).tolist()
        if len(guide) != height or len(guide[0]) != width:
            raise DimensionError("guide plane does not match the coded planes")
    allowed = masks = None

    for r in range(height):
        row = grid[r]
        prev = grid[r - 1] if r > 0 else None
        prev2 = grid[r - 2] if r > 1 else None
        if lmap:
            grow = guide[r]
            gprev = guide[r - 1] if r > 0 else None
        for c in range(width):
            if prev2 is not None and 1 < c < width - 1:
                key = (row[c - 1], prev[c], prev[c - 1], prev[c + 1], row[c - 2], prev2[c])
            else:
                key = pattern_at(grid, r, c)
            pred = None
            boost = None
            if lmap:
                g = grow[c]
                if c > 0 and g == grow[c - 1]:
                    pred = key[0]
                elif r > 0 and g == gprev[c]:
                    pred = key[1]
                if boost_on:
                    boost = pred
            if crc is not None:
                aset = crc.at(r, c)
                allowed = aset.accepts
                masks = aset.masks
            if events is not None:
                events.append((r, c, coder.symbols))

            colors, cums = stage1_table(lookup(key), allowed, boost)
            if encoding:
                x = row[c]
                try:
                    i = colors.index(x, 1)
                except ValueError:
                    i = 0
                code_index(cums, i)
            else:
                i = code_index(cums)
            if i:
                x = colors[i]
                counts[STAGE1] += 1
                escaped = False
            else:
                escaped = True
                if pred is None:
                    pred = med_packed(key[0], key[1], key[2], arity, bitdepth)
                pcomps = unpack(pred, arity, bitdepth)
                j = stage2_code(coder, palette, pred, pcomps, x if encoding else None,
                                in_model, near_model, masks, boost, t_sim)
                if j is not None:
                    x = pal_colors[j]
                    palette.increment(j)
                    counts[STAGE2] += 1
                else:
                    comps = stage3_code(coder, hists, pcomps,
                                        unpack(x, arity, bitdepth) if encoding else None, masks)
                    x = pack(comps, bitdepth)
                    if x in palette.index:
                        raise StreamError("residual decoded a colour already in the palette")
                    palette.add(x)
                    counts[STAGE3] += 1
            if not encoding:
                row[c] = x
            update(key, x, escaped)


def encode_plane_set(planes, config: PipelineConfig, coder, events=None) -> PlaneSetState:
    """Code ``planes`` (``arity`` equally sized 2-D arrays) into ``coder``."""
    if len(planes) != config.arity:
        raise ParameterError(f"expected {config.arity} planes, got {len(planes)}")
    shape = np.shape(planes[0])
    if len(shape) != 2 or 0 in shape or any(np.shape(p) != shape for p in planes):
        raise DimensionError("planes must be non-empty and equally sized")
    state = PlaneSetState(config)
    _run(pack_planes(planes, config.bitdepth), state, coder, events)
    return state


def decode_plane_set(config: PipelineConfig, coder, dims, events=None) -> list:
    """Reconstruct the planes of a stream written by :func:`encode_plane_set`."""
    height, width = dims
    if height <= 0 or width <= 0:
        raise DimensionError("dimensions must be positive")
    state = PlaneSetState(config)
    grid = [[0] * width for _ in range(height)]
    _run(grid, state, coder, events)
    return unpack_grid(grid, config.arity, config.bitdepth)
