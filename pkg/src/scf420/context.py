"""Stage 1: pattern store, soft merging of similar patterns, context coding.

Patterns are the six causal neighbours A (left), B (above), C (above-left),
D (above-right), E (left-left) and F (above-above).  A neighbour outside the
image takes the value of A; if A itself is outside, it takes B; if both are
outside, zero.

Similarity is tiered.  The exact six-neighbour match is used when its
histogram total reaches :data:`TIER_THRESHOLD`; otherwise every stored
pattern sharing (A, B, C, D) is merged, and if that is still too thin,
every pattern sharing (A, B).  The two prefix tiers are kept as running
aggregates, so a merge costs one dictionary lookup.
"""

from __future__ import annotations

from itertools import accumulate

from .color import pack, unpack
from .rangecoder import MAX_TOTAL

TIER_THRESHOLD = 16
COMPACT_LIMIT = 1 << 16


class Histogram:
    """Colour counts plus an escape count; ``total`` is kept in sync."""

    __slots__ = ("counts", "escape", "total")

    def __init__(self, counts=None, escape: int = 1):
        self.counts = dict(counts or {})
        self.escape = escape
        self.total = sum(self.counts.values()) + escape

    def copy(self) -> "Histogram":
        return Histogram(self.counts, self.escape)

    def probability(self, color) -> float:
        return self.counts.get(color, 0) / self.total

    def escape_probability(self) -> float:
        return self.escape / self.total

    def __eq__(self, other):
        if not isinstance(other, Histogram):
            return NotImplemented
        return self.counts == other.counts and self.escape == other.escape

    def __repr__(self):
        return f"Histogram({self.counts}, escape={self.escape}, total={self.total})"


# Stored per exact pattern; merged results share the shape.
PatternEntry = Histogram
MergedHistogram = Histogram


def pattern_at(grid, r: int, c: int) -> tuple:
    """Six-neighbour key of position ``(r, c)`` in a packed grid."""
    row = grid[r]
    width = len(row)
    if c > 0:
        a = row[c - 1]
    elif r > 0:
        a = grid[r - 1][c]
    else:
        a = 0
    if r > 0:
        prev = grid[r - 1]
        b = prev[c]
        cc = prev[c - 1] if c > 0 else a
        d = prev[c + 1] if c + 1 < width else a
        f = grid[r - 2][c] if r > 1 else a
    else:
        b = cc = d = f = a
    e = row[c - 2] if c > 1 else a
    return (a, b, cc, d, e, f)


def extract_pattern(planes, position, bitdepth: int = 8) -> tuple:
    """Return the pattern at ``position = (row, col)`` as six colour tuples."""
    from .color import pack_planes

    grid = pack_planes(planes, bitdepth)
    r, c = position
    if not (0 <= r < len(grid) and 0 <= c < len(grid[0])):
        raise IndexError(f"position {position} outside the image")
    arity = len(planes)
    return tuple(unpack(v, arity, bitdepth) for v in pattern_at(grid, r, c))


class ContextStore:
    """Pattern-to-histogram store with prefix aggregates for tier merging."""

    def __init__(self, threshold: int = TIER_THRESHOLD, compact_limit: int = COMPACT_LIMIT):
        self.entries = {}
        self.by_abcd = {}
        self.by_ab = {}
        self.threshold = threshold
        self.compact_limit = compact_limit

    def __len__(self):
        return len(self.entries)

    def lookup(self, key):
        """Merged histogram for ``key``, or ``None`` when nothing matches.

        The returned object is live store state and must not be mutated.
        """
        t = self.threshold
        e = self.entries.get(key)
        if e is not None and e.total >= t:
            return e
        agg = self.by_abcd.get(key[:4])
        if agg is not None and agg.total >= t:
            return agg
        return self.by_ab.get(key[:2])

    def update(self, key, color, was_escape: bool) -> None:
        """Count ``color`` under ``key``; on escape also bump the escape count."""
        e = self.entries.get(key)
        k4 = key[:4]
        k2 = key[:2]
        a4 = self.by_abcd.get(k4)
        if a4 is None:
            a4 = self.by_abcd[k4] = Histogram(escape=0)
        a2 = self.by_ab.get(k2)
        if a2 is None:
            a2 = self.by_ab[k2] = Histogram(escape=0)
        if e is None:
            e = self.entries[key] = Histogram()
            a4.escape += 1
            a4.total += 1
            a2.escape += 1
            a2.total += 1
        inc = 2 if was_escape else 1
        for h in (e, a4, a2):
            counts = h.counts
            counts[color] = counts.get(color, 0) + 1
            if was_escape:
                h.escape += 1
            h.total += inc
        if e.total > self.compact_limit:
            self._compact(e, a4, a2)

    @staticmethod
    def _compact(e, a4, a2) -> None:
        removed = 0
        for color, n in e.counts.items():
            half = max(1, n >> 1)
            d = n - half
            if d:
                e.counts[color] = half
                a4.counts[color] -= d
                a2.counts[color] -= d
                removed += d
        half = max(1, e.escape >> 1)
        d = e.escape - half
        e.escape = half
        a4.escape -= d
        a2.escape -= d
        removed += d
        e.total -= removed
        a4.total -= removed
        a2.total -= removed


def merge_similar(store: ContextStore, key) -> Histogram:
    """Copy of the merged histogram for ``key`` (escape-only when empty)."""
    h = store.lookup(key)
    if h is None:
        return Histogram()
    return h.copy()


def filtered(hist: Histogram, allowed=None, boost=None) -> Histogram:
    """Drop colours rejected by ``allowed`` and double the count of ``boost``.

    The escape count is never filtered.
    """
    counts = hist.counts
    if allowed is not None:
        counts = {c: n for c, n in counts.items() if allowed(c)}
    else:
        counts = dict(counts)
    if boost is not None and boost in counts:
        counts[boost] *= 2
    return Histogram(counts, hist.escape)


def stage1_table(hist, allowed=None, boost=None):
    """Symbol list and cumulative counts; symbol 0 is the escape.

    ``hist`` may be ``None`` (no similar pattern seen), giving an
    escape-only distribution.
    """
    if hist is None:
        return [None], [0, 1]
    counts = hist.counts
    escape = hist.escape
    if allowed is None and boost is None and hist.total <= MAX_TOTAL:
        return [None, *counts], [0, *accumulate(counts.values(), initial=escape)]
    if allowed is not None:
        items = [(c, n) for c, n in counts.items() if allowed(c)]
    else:
        items = list(counts.items())
    if boost is not None:
        items = [(c, n * 2 if c == boost else n) for c, n in items]
    total = escape + sum(n for _, n in items)
    if total > MAX_TOTAL:
        shift = (total // MAX_TOTAL).bit_length()
        escape = max(1, escape >> shift)
        items = [(c, max(1, n >> shift)) for c, n in items]
    colors = [None]
    weights = [escape]
    for c, n in items:
        colors.append(c)
        weights.append(n)
    return colors, [0, *accumulate(weights)]


def stage1_code(coder, hist, color=None, allowed=None, boost=None):
    """Code ``color`` from the merged histogram, or an escape.

    Returns the colour (decoded or coded), or ``None`` for an escape.
    """
    colors, cums = stage1_table(hist, allowed, boost)
    if coder.encoding:
        try:
            i = colors.index(color, 1)
        except ValueError:
            i = 0
        coder.code_index(cums, i)
        return colors[i]
    return colors[coder.code_index(cums)]


def pack_key(pattern, bitdepth: int = 8) -> tuple:
    """Convert a six-tuple of colour tuples into a packed store key."""
    return tuple(pack(c, bitdepth) for c in pattern)
