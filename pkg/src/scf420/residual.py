"""Stage 3: per-component prediction residuals of colours not in the palette.

Errors wrap modulo the alphabet size and are folded to the order
0, -1, +1, -2, +2, ...  so any value is reachable from any prediction.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import TableCorruptionError

COMPACT_LIMIT = 1 << 16


def fold(value: int, predicted: int, size: int = 256) -> int:
    """Zig-zag index of ``value - predicted`` (mod ``size``)."""
    e = (value - predicted) % size
    if e >= size >> 1:
        e -= size
    return 2 * e if e >= 0 else -2 * e - 1


def unfold(index: int, predicted: int, size: int = 256) -> int:
    e = (index + 1) >> 1
    if index & 1:
        e = -e
    return (predicted + e) % size


@lru_cache(maxsize=None)
def value_table(size: int) -> np.ndarray:
    """``table[p, i]`` is the value reached from prediction ``p`` at index ``i``."""
    idx = np.arange(size)
    signed = np.where(idx & 1, -((idx + 1) >> 1), idx >> 1)
    return (np.arange(size)[:, None] + signed[None, :]) % size


class ErrorHistogram:
    """Adaptive counts over the folded error alphabet, starting at one."""

    def __init__(self, size: int = 256, compact_limit: int = COMPACT_LIMIT):
        self.size = size
        self.counts = np.ones(size, dtype=np.int64)
        self.total = size
        self.compact_limit = compact_limit

    def weights(self, predicted: int, mask=None) -> np.ndarray:
        """Counts restricted to indices whose value passes ``mask``."""
        if mask is None:
            return self.counts
        return np.where(mask[value_table(self.size)[predicted]], self.counts, 0)

    def update(self, index: int) -> None:
        self.counts[index] += 1
        self.total += 1
        if self.total > self.compact_limit:
            np.maximum(self.counts >> 1, 1, out=self.counts)
            self.total = int(self.counts.sum())


def stage3_code(coder, hists, predicted_comps, comps=None, masks=None) -> tuple:
    """Code each component's residual; returns the component values."""
    out = []
    for k, hist in enumerate(hists):
        p = predicted_comps[k]
        mask = None if masks is None else masks[k]
        w = hist.weights(p, mask)
        cums = np.zeros(hist.size + 1, dtype=np.int64)
        np.cumsum(w, out=cums[1:])
        if cums[-1] == 0:
            raise TableCorruptionError("no admissible value for residual coding")
        if coder.encoding:
            i = fold(comps[k], p, hist.size)
            if w[i] == 0:
                raise TableCorruptionError(f"value {comps[k]} excluded by chroma range tables")
            coder.code_index(cums, i)
        else:
            i = coder.code_index(cums)
        hist.update(i)
        out.append(unfold(i, p, hist.size))
    return tuple(out)
