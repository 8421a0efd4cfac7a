import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis.extra.numpy import arrays

from scf420.analysis import (
    ablate_images,
    channel_nmi,
    corpus_stats,
    load_corpus,
    nmi,
    prediction_stats,
)
from scf420.codec import chunk_breakdown, encode420, EncoderConfig
from scf420.errors import DimensionError
from scf420.pixelio import Image420, Image444, write_planar, write_pnm
from scf420.synthetic import screen_content_420


def _h(values):
    n = len(values)
    return -sum(k / n * math.log2(k / n) for k in Counter(values).values())


def nmi_oracle(a, b):
    a = np.ravel(a).tolist()
    b = np.ravel(b).tolist()
    ha, hb, hab = _h(a), _h(b), _h(list(zip(a, b)))
    return 2 * (ha + hb - hab) / (ha + hb)


def test_nmi_self_is_one(rng):
    x = rng.integers(0, 256, (8, 8))
    assert nmi(x, x) == pytest.approx(1.0, abs=1e-12)


def test_nmi_constant_is_zero():
    assert nmi(np.zeros((4, 4)), np.zeros((4, 4))) == 0.0


def test_nmi_shape_mismatch():
    with pytest.raises(DimensionError):
        nmi(np.zeros((4, 4)), np.zeros((4, 5)))


def test_nmi_oracle(rng):
    for _ in range(50):
        a = rng.integers(0, 8, (4, 4))
        b = rng.integers(0, 8, (4, 4))
        if len(set(a.ravel())) == 1 and len(set(b.ravel())) == 1:
            continue
        assert abs(nmi(a, b) - nmi_oracle(a, b)) < 1e-12


@given(arrays(np.uint8, (5, 5)), arrays(np.uint8, (5, 5)))
def test_nmi_symmetry(a, b):
    assert abs(nmi(a, b) - nmi(b, a)) < 1e-12


def test_nmi_independent_planes_small():
    rng = np.random.default_rng(99)
    a = rng.integers(0, 16, (64, 64))
    b = rng.integers(0, 16, (64, 64))
    assert nmi(a, b) < 0.05


def test_channel_nmi_keys(rng):
    img = screen_content_420(32, 32, rng)
    assert set(channel_nmi(img)) == {"Y-Cb", "Y-Cr", "Cb-Cr"}


def test_constant_chroma_is_predicted_exactly():
    img = Image420(np.arange(64).reshape(8, 8) % 7, np.full((4, 4), 90), np.full((4, 4), 30))
    for pred in ("MAP", "LMAP"):
        st = prediction_stats(img, pred)
        assert st.mae == 0.0 and st.match_ratio == 1.0


def _edge_fixture():
    # chroma regions exactly co-located with luma regions
    rng = np.random.default_rng(4)
    labels = np.kron(rng.integers(0, 4, (6, 6)), np.ones((3, 3), int))
    luma = np.array([10, 90, 160, 240])[labels]
    y = np.kron(luma, np.ones((2, 2), int))
    cb = np.array([40, 200, 120, 70])[labels]
    cr = np.array([220, 30, 110, 180])[labels]
    return Image420(y, cb, cr)


def test_lmap_matches_where_it_fires():
    img = _edge_fixture()
    lm = prediction_stats(img, "LMAP")
    assert lm.positions > 0 and lm.match_ratio == 1.0
    assert prediction_stats(img, "MAP").match_ratio < 1.0


def _map_reference(plane):
    h, w = plane.shape
    out = np.zeros_like(plane)
    for r in range(h):
        for c in range(w):
            a = plane[r, c - 1] if c else (plane[r - 1, c] if r else 0)
            b = plane[r - 1, c] if r else a
            cc = plane[r - 1, c - 1] if r and c else a
            out[r, c] = sorted([a, b, a + b - cc])[1]
    return out


def test_map_stats_against_reference(rng):
    img = Image420(rng.integers(0, 256, (12, 16)), rng.integers(0, 256, (6, 8)), rng.integers(0, 256, (6, 8)))
    cb = img.cb.samples.astype(int)
    cr = img.cr.samples.astype(int)
    pcb, pcr = _map_reference(cb), _map_reference(cr)
    st = prediction_stats(img, "MAP")
    err = (np.abs(pcb - cb) + np.abs(pcr - cr)).ravel()[1:]
    match = ((pcb == cb) & (pcr == cr)).ravel()[1:]
    assert st.positions == cb.size - 1
    assert st.mae == pytest.approx(err.sum() / (2 * err.size))
    assert st.match_ratio == pytest.approx(match.mean())


def test_unknown_predictor():
    with pytest.raises(ValueError):
        prediction_stats(_edge_fixture(), "XYZ")


def test_constant_image_variants_differ_only_by_tables():
    img = Image420(np.full((64, 64), 90), np.full((32, 32), 100), np.full((32, 32), 140))
    r = ablate_images([("c", img)])
    row = r.rows[0]
    assert abs(row["no_crc"] - row["no_crc_no_lmap"]) * 64 * 64 <= 8
    full = chunk_breakdown(encode420(img))
    plain = chunk_breakdown(encode420(img, EncoderConfig(crc=False)))
    assert abs(full["cbcr"] - plain["cbcr"]) <= 1 and full["y"] == plain["y"]


def test_load_corpus_and_stats(tmp_path, rng):
    img = screen_content_420(16, 24, rng)
    write_planar(img, tmp_path / "a_24x16.yuv")
    write_pnm(Image444.from_array(rng.integers(0, 256, (8, 8, 3)).astype(np.uint8)), tmp_path / "b.ppm")
    (tmp_path / "c_2x2.yuv").write_bytes(b"short")
    (tmp_path / "notes.txt").write_text("ignored")
    images = load_corpus(tmp_path)
    assert [n for n, _ in images] == ["a_24x16.yuv", "b.ppm"]
    assert images[0][1] == img
    rows = corpus_stats(images)
    assert {"image", "Y-Cb", "MAP_mae", "LMAP_match"} <= set(rows[0])
