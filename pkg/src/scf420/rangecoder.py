"""Byte-oriented range coder with 32-bit range and carry propagation.

Intervals are split with an exact multiply/divide, so a symbol of width
``f`` out of ``total`` receives ``floor(range*hi/total) - floor(range*lo/total)``
code space.  Since the range is renormalized to at least 2**24 and model
totals are capped at 2**24, every non-empty interval stays non-empty and the
rounding loss is below ``total / (range * f)`` bits per symbol.

The encoder follows the LZMA carry scheme (one cached byte plus a run of
0xFF bytes).  The always-zero leading byte of that scheme is not written.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, StreamError

MAX_TOTAL = 1 << 24
TOP = 1 << 24
MASK32 = 0xFFFFFFFF
FLUSH_BYTES = 4


@dataclass(frozen=True)
class FrequencyView:
    """Cumulative-count interval ``[cum_lo, cum_hi)`` out of ``total``."""

    cum_lo: int
    cum_hi: int
    total: int

    def __post_init__(self):
        check_interval(self.cum_lo, self.cum_hi, self.total)

    @property
    def probability(self) -> float:
        return (self.cum_hi - self.cum_lo) / self.total

    @property
    def ideal_bits(self) -> float:
        return -math.log2(self.probability)


def check_interval(cum_lo: int, cum_hi: int, total: int) -> None:
    if not 0 <= cum_lo < cum_hi <= total:
        raise ModelError(f"invalid interval [{cum_lo}, {cum_hi}) of {total}")
    if total > MAX_TOTAL:
        raise ModelError(f"model total {total} exceeds {MAX_TOTAL}")


class RangeEncoder:
    """Arithmetic encoder writing into an in-memory byte buffer.

    ``trace``, when given, receives one ``(cum_lo, cum_hi, total)`` tuple per
    coded symbol; the decoder accepts the same hook, which makes
    encoder/decoder model trajectories directly comparable.
    """

    encoding = True

    def __init__(self, trace: list | None = None):
        self.low = 0
        self.range = MASK32
        self._cache = 0
        self._cache_size = 1
        self._first = True
        self._out = bytearray()
        self._finished = False
        self.trace = trace
        self.symbols = 0

    def encode_interval(self, cum_lo: int, cum_hi: int, total: int) -> None:
        if not 0 <= cum_lo < cum_hi <= total or total > MAX_TOTAL:
            check_interval(cum_lo, cum_hi, total)
        if self.trace is not None:
            self.trace.append((cum_lo, cum_hi, total))
        self.symbols += 1
        r = self.range
        lo = r * cum_lo // total
        self.low += lo
        r = r * cum_hi // total - lo
        while r < TOP:
            r <<= 8
            self._shift_low()
        self.range = r

    def encode(self, fv: FrequencyView) -> None:
        self.encode_interval(fv.cum_lo, fv.cum_hi, fv.total)

    def code_index(self, cums, index: int) -> int:
        """Encode symbol ``index`` of a cumulative table ``cums`` (len n+1)."""
        self.encode_interval(int(cums[index]), int(cums[index + 1]), int(cums[-1]))
        return index

    def code_bit(self, model: "BitModel", bit: int) -> int:
        n0 = model.n0
        total = n0 + model.n1
        if bit:
            self.encode_interval(n0, total, total)
        else:
            self.encode_interval(0, n0, total)
        model.update(bit)
        return bit

    def _shift_low(self) -> None:
        low = self.low
        if low < 0xFF000000 or low > MASK32:
            carry = low >> 32
            if self._first:
                self._first = False
            else:
                self._out.append((self._cache + carry) & 0xFF)
            for _ in range(self._cache_size - 1):
                self._out.append((0xFF + carry) & 0xFF)
            self._cache_size = 0
            self._cache = (low >> 24) & 0xFF
        self._cache_size += 1
        self.low = (low << 8) & MASK32

    def finish(self) -> bytes:
        """Flush the coder state and return the complete stream."""
        if not self._finished:
            for _ in range(FLUSH_BYTES + 1):
                self._shift_low()
            self._finished = True
        return bytes(self._out)


class RangeDecoder:
    """Mirror of :class:`RangeEncoder` reading from a byte string."""

    encoding = False

    def __init__(self, data: bytes, trace: list | None = None):
        self._data = bytes(data)
        self._pos = 0
        self.range = MASK32
        self.code = 0
        self._started = False
        self.trace = trace
        self.symbols = 0

    def _next_byte(self) -> int:
        if self._pos >= len(self._data):
            raise StreamError("range-coded stream is truncated")
        b = self._data[self._pos]
        self._pos += 1
        return b

    def _start(self) -> None:
        for _ in range(FLUSH_BYTES):
            self.code = (self.code << 8) | self._next_byte()
        self._started = True

    @property
    def bytes_consumed(self) -> int:
        return self._pos

    def decode_target(self, total: int) -> int:
        """Return a count in ``[0, total)`` locating the next symbol."""
        if not self._started:
            self._start()
        if not 0 < total <= MAX_TOTAL:
            raise ModelError(f"invalid model total {total}")
        if self.code >= self.range:
            raise StreamError("corrupt range-coded stream")
        return ((self.code + 1) * total - 1) // self.range

    def decode_consume(self, cum_lo: int, cum_hi: int, total: int) -> None:
        if not 0 <= cum_lo < cum_hi <= total:
            check_interval(cum_lo, cum_hi, total)
        if self.trace is not None:
            self.trace.append((cum_lo, cum_hi, total))
        self.symbols += 1
        r = self.range
        lo = r * cum_lo // total
        code = self.code - lo
        r = r * cum_hi // total - lo
        if code < 0 or code >= r:
            raise StreamError("corrupt range-coded stream")
        while r < TOP:
            r <<= 8
            code = (code << 8) | self._next_byte()
        self.code = code
        self.range = r

    def decode(self, fv: FrequencyView) -> None:
        self.decode_consume(fv.cum_lo, fv.cum_hi, fv.total)

    def code_index(self, cums, index: int | None = None) -> int:
        total = int(cums[-1])
        target = self.decode_target(total)
        if isinstance(cums, np.ndarray):
            i = int(np.searchsorted(cums, target, side="right")) - 1
        else:
            i = bisect_right(cums, target) - 1
        self.decode_consume(int(cums[i]), int(cums[i + 1]), total)
        return i

    def code_bit(self, model: "BitModel", bit: int | None = None) -> int:
        n0 = model.n0
        total = n0 + model.n1
        if self.decode_target(total) < n0:
            self.decode_consume(0, n0, total)
            bit = 0
        else:
            self.decode_consume(n0, total, total)
            bit = 1
        model.update(bit)
        return bit


class BitModel:
    """Adaptive binary model with counts starting at 1/1."""

    __slots__ = ("n0", "n1", "limit")

    def __init__(self, limit: int = 1 << 12):
        self.n0 = 1
        self.n1 = 1
        self.limit = limit

    def update(self, bit: int) -> None:
        if bit:
            self.n1 += 1
        else:
            self.n0 += 1
        if self.n0 + self.n1 > self.limit:
            self.n0 = (self.n0 + 1) >> 1
            self.n1 = (self.n1 + 1) >> 1

    def __repr__(self):
        return f"BitModel({self.n0}, {self.n1})"


def ideal_bits(trace) -> float:
    """Information content of a trace of ``(cum_lo, cum_hi, total)`` intervals."""
    return -sum(math.log2((hi - lo) / total) for lo, hi, total in trace)
