"""Packing of colour tuples into single integers.

The coding loops key dictionaries by colour, and a plain ``int`` hashes
and compares much faster than a tuple.  Component 0 occupies the most
significant bits.
"""

from __future__ import annotations

import numpy as np


def pack(color, bitdepth: int = 8) -> int:
    v = 0
    for c in color:
        v = (v << bitdepth) | int(c)
    return v


def unpack(value: int, arity: int, bitdepth: int = 8) -> tuple:
    mask = (1 << bitdepth) - 1
    return tuple((value >> (bitdepth * (arity - 1 - k))) & mask for k in range(arity))


def pack_planes(planes, bitdepth: int = 8) -> list:
    """Pack equally sized planes into a list of rows of ints."""
    arrays = [np.asarray(p, dtype=np.int64) for p in planes]
    acc = arrays[0].copy()
    for a in arrays[1:]:
        acc = (acc << bitdepth) | a
    return acc.tolist()


def unpack_grid(grid, arity: int, bitdepth: int = 8) -> list:
    """Inverse of :func:`pack_planes`; returns ``arity`` uint8/uint16 arrays."""
    acc = np.asarray(grid, dtype=np.int64)
    mask = (1 << bitdepth) - 1
    dtype = np.uint8 if bitdepth <= 8 else np.uint16
    return [((acc >> (bitdepth * (arity - 1 - k))) & mask).astype(dtype) for k in range(arity)]
