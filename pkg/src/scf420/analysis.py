"""Channel statistics, prediction quality and the ablation harness."""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .codec import EncoderConfig, encode420
from .crc import quantize_luma
from .errors import DimensionError, ScfError
from .palette import med
from .pixelio import Image420, read_image, read_planar, rgb_to_420, upsample_nearest

log = logging.getLogger(__name__)

LN2 = math.log(2.0)


def _entropy_bits(counts: np.ndarray) -> float:
    counts = counts[counts > 0].astype(np.float64)
    n = counts.sum()
    p = counts / n
    return float(-(p * np.log(p)).sum() / LN2)


def nmi(plane_a, plane_b) -> float:
    """Normalized mutual information ``2 (H(a) - H(a|b)) / (H(a) + H(b))``.

    Returns 0 when both planes are constant.
    """
    a = np.asarray(plane_a, dtype=np.int64).ravel()
    b = np.asarray(plane_b, dtype=np.int64).ravel()
    if np.shape(plane_a) != np.shape(plane_b):
        raise DimensionError("nmi needs planes of equal size")
    nb = int(b.max()) + 1 if b.size else 1
    joint = np.bincount(a * nb + b)
    ha = _entropy_bits(np.bincount(a))
    hb = _entropy_bits(np.bincount(b))
    hab = _entropy_bits(joint)
    denom = ha + hb
    if denom == 0:
        return 0.0
    # H(a|b) = H(a,b) - H(b)
    return 2.0 * (ha - (hab - hb)) / denom


def channel_nmi(image: Image420) -> dict:
    """Y-Cb, Y-Cr (chroma upsampled by nearest neighbour) and Cb-Cr NMI."""
    y = image.y.samples
    cb = image.cb.samples
    cr = image.cr.samples
    return {
        "Y-Cb": nmi(y, upsample_nearest(cb)),
        "Y-Cr": nmi(y, upsample_nearest(cr)),
        "Cb-Cr": nmi(cb, cr),
    }


@dataclass
class PredictionStats:
    mae: float
    match_ratio: float
    positions: int


def _neighbours(plane, r, c):
    """Causal A, B, C with the codec's border substitution."""
    if c > 0:
        a = plane[r][c - 1]
    elif r > 0:
        a = plane[r - 1][c]
    else:
        a = 0
    if r > 0:
        b = plane[r - 1][c]
        cc = plane[r - 1][c - 1] if c > 0 else a
    else:
        b = cc = a
    return a, b, cc


def predict_chroma(image: Image420, predictor: str = "LMAP"):
    """Predicted Cb/Cr arrays and a boolean map of luma-condition hits."""
    cb = image.cb.samples.tolist()
    cr = image.cr.samples.tolist()
    h, w = len(cb), len(cb[0])
    guide = quantize_luma(image.y.samples, 2).tolist()
    pcb = np.zeros((h, w), dtype=np.int64)
    pcr = np.zeros((h, w), dtype=np.int64)
    fired = np.zeros((h, w), dtype=bool)
    use_lmap = predictor.upper() == "LMAP"
    for r in range(h):
        for c in range(w):
            if use_lmap and c > 0 and guide[r][c] == guide[r][c - 1]:
                pcb[r, c], pcr[r, c] = cb[r][c - 1], cr[r][c - 1]
                fired[r, c] = True
            elif use_lmap and r > 0 and guide[r][c] == guide[r - 1][c]:
                pcb[r, c], pcr[r, c] = cb[r - 1][c], cr[r - 1][c]
                fired[r, c] = True
            else:
                pcb[r, c] = med(*_neighbours(cb, r, c))
                pcr[r, c] = med(*_neighbours(cr, r, c))
    return pcb, pcr, fired


def prediction_stats(image: Image420, predictor: str = "LMAP") -> PredictionStats:
    """Mean absolute error over both chroma planes and exact-pair match ratio.

    The origin has no causal neighbour and is left out.  For LMAP the match
    ratio counts only positions where a luma condition selected the left or
    top neighbour; for MAP it counts every other position.
    """
    if predictor.upper() not in ("MAP", "LMAP"):
        raise ValueError(f"unknown predictor {predictor!r}")
    pcb, pcr, fired = predict_chroma(image, predictor)
    cb = image.cb.samples.astype(np.int64)
    cr = image.cr.samples.astype(np.int64)
    causal = np.ones_like(fired)
    causal[0, 0] = False
    err = np.abs(pcb - cb) + np.abs(pcr - cr)
    n_causal = int(causal.sum())
    mae = float(err[causal].sum() / (2 * n_causal)) if n_causal else 0.0
    match = (pcb == cb) & (pcr == cr)
    where = fired if predictor.upper() == "LMAP" else causal
    n = int(where.sum())
    ratio = float(match[where].sum() / n) if n else 0.0
    return PredictionStats(mae, ratio, n)


VARIANTS = {
    "full": EncoderConfig(),
    "no_crc": EncoderConfig(crc=False),
    "no_crc_no_lmap": EncoderConfig(crc=False, lmap=False),
}

# published relative bitrates of the three variants, shown for context
REFERENCE_PERCENT = {"full": 100.00, "no_crc": 100.56, "no_crc_no_lmap": 100.81}


@dataclass
class AblationResult:
    variants: list
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def mean_bpp(self, variant: str) -> float:
        vals = [row[variant] for row in self.rows]
        return float(np.mean(vals)) if vals else float("nan")

    def percentages(self) -> dict:
        base = self.mean_bpp(self.variants[0])
        return {v: 100.0 * self.mean_bpp(v) / base for v in self.variants}

    def write_csv(self, fh) -> None:
        w = csv.writer(fh)
        w.writerow(["image", *self.variants])
        for row in self.rows:
            w.writerow([row["image"], *(f"{row[v]:.5f}" for v in self.variants)])
        w.writerow(["mean", *(f"{self.mean_bpp(v):.5f}" for v in self.variants)])
        pct = self.percentages()
        w.writerow(["percent", *(f"{pct[v]:.2f}" for v in self.variants)])


def ablate_images(images, variants=None) -> AblationResult:
    """Encode each ``(name, Image420)`` under every variant; bpp per luma pixel."""
    variants = variants or VARIANTS
    result = AblationResult(list(variants))
    for name, image in images:
        row = {"image": name}
        try:
            for v, cfg in variants.items():
                row[v] = 8 * len(encode420(image, cfg)) / (image.width * image.height)
        except ScfError as exc:
            log.warning("%s: %s", name, exc)
            result.failures.append((name, str(exc)))
            continue
        result.rows.append(row)
    return result


_DIMS = re.compile(r"(\d+)x(\d+)")


def load_corpus(directory) -> list:
    """Load ``*.yuv`` (I420, ``WxH`` in the name) and RGB image files as 4:2:0.

    RGB files go through BT.709 conversion and box downsampling.  Unreadable
    files are logged and skipped.
    """
    out = []
    for path in sorted(Path(directory).iterdir()):
        try:
            if path.suffix.lower() == ".yuv":
                m = _DIMS.findall(path.stem)
                if not m:
                    raise DimensionError(f"{path.name}: no WxH in file name")
                w, h = map(int, m[-1])
                out.append((path.name, read_planar(path, w, h)))
            elif path.suffix.lower() in (".ppm", ".pnm", ".png", ".bmp", ".tif", ".tiff"):
                rgb = read_image(path)
                if rgb.width % 2 or rgb.height % 2:
                    raise DimensionError(f"{path.name}: odd dimensions {rgb.width}x{rgb.height}")
                out.append((path.name, rgb_to_420(rgb)))
        except (ScfError, OSError) as exc:
            log.warning("skipping %s: %s", path, exc)
    return out


def run_ablation(corpus_dir, variants=None) -> AblationResult:
    return ablate_images(load_corpus(corpus_dir), variants)


def corpus_stats(images) -> list:
    """Per-image NMI and MAP/LMAP statistics rows."""
    rows = []
    for name, image in images:
        row = {"image": name, **channel_nmi(image)}
        for pred in ("MAP", "LMAP"):
            st = prediction_stats(image, pred)
            row[f"{pred}_mae"] = st.mae
            row[f"{pred}_match"] = st.match_ratio
        rows.append(row)
    return rows


def write_rows_csv(rows, fh) -> None:
    if not rows:
        return
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    for row in rows:
        w.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in row.items()})
