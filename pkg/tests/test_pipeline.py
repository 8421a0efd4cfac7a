import numpy as np
import pytest

from scf420.errors import DimensionError, ParameterError, ScfError, StreamError
from scf420.pipeline import PipelineConfig, decode_plane_set, encode_plane_set
from scf420.rangecoder import RangeDecoder, RangeEncoder


def _roundtrip(planes, cfg):
    enc = RangeEncoder()
    encode_plane_set(planes, cfg, enc)
    data = enc.finish()
    dec = RangeDecoder(data)
    out = decode_plane_set(cfg, dec, np.shape(planes[0]))
    assert dec.bytes_consumed == len(data)
    return data, out


def test_single_pixel_cold_start():
    trace = []
    enc = RangeEncoder(trace=trace)
    state = encode_plane_set([np.array([[77]])], PipelineConfig(arity=1), enc)
    assert state.stage_counts == [0, 0, 0, 1]
    # escape (p = 1), in-palette = no, one residual symbol
    assert len(trace) == 3
    assert trace[0] == (0, 1, 1)


def test_constant_plane_is_cheap():
    data, out = _roundtrip([np.full((8, 8), 200)], PipelineConfig(arity=1))
    assert 8 * len(data) < 64
    assert (out[0] == 200).all()


def test_random_few_colour_roundtrips(rng):
    for k in range(100):
        arity = 1 + k % 3
        colours = rng.integers(0, 256, (int(rng.integers(2, 6)), arity))
        idx = rng.integers(0, len(colours), (32, 32))
        planes = [colours[idx, a] for a in range(arity)]
        _, out = _roundtrip(planes, PipelineConfig(arity=arity))
        for a in range(arity):
            assert np.array_equal(out[a], planes[a])


def test_binary_planes(rng):
    plane = (rng.random((20, 40)) < 0.05).astype(np.uint8)
    _, out = _roundtrip([plane], PipelineConfig(arity=1, bitdepth=1))
    assert np.array_equal(out[0], plane)


def test_truncated_stream(rng):
    plane = rng.integers(0, 256, (16, 16))
    enc = RangeEncoder()
    encode_plane_set([plane], PipelineConfig(arity=1), enc)
    data = enc.finish()
    with pytest.raises(StreamError):
        decode_plane_set(PipelineConfig(arity=1), RangeDecoder(data[:40]), (16, 16))


def test_mismatched_arity_does_not_reproduce(rng):
    plane = rng.integers(0, 256, (16, 16))
    enc = RangeEncoder()
    encode_plane_set([plane], PipelineConfig(arity=1), enc)
    data = enc.finish()
    try:
        out = decode_plane_set(PipelineConfig(arity=3), RangeDecoder(data), (16, 16))
    except ScfError:
        return
    assert not np.array_equal(out[0], plane)


def test_config_validation():
    with pytest.raises(ParameterError):
        PipelineConfig(arity=4)
    with pytest.raises(ParameterError):
        PipelineConfig(arity=1, lmap_enabled=True, guide=np.zeros((1, 1)))
    with pytest.raises(ParameterError):
        PipelineConfig(arity=2, lmap_enabled=True)
    with pytest.raises(ParameterError):
        encode_plane_set([np.zeros((2, 2))], PipelineConfig(arity=2), RangeEncoder())
    with pytest.raises(DimensionError):
        encode_plane_set([np.zeros((2, 2)), np.zeros((2, 3))], PipelineConfig(arity=2), RangeEncoder())


def test_guided_pair_roundtrip(rng):
    g = rng.integers(0, 4, (24, 24))
    cb = (g * 40 + 10).astype(np.uint8)
    cr = (200 - g * 30).astype(np.uint8)
    cfg = PipelineConfig(arity=2, lmap_enabled=True, boost_enabled=True, guide=g)
    _, out = _roundtrip([cb, cr], cfg)
    assert np.array_equal(out[0], cb) and np.array_equal(out[1], cr)


def test_events_mark_pixel_boundaries():
    events = []
    enc = RangeEncoder()
    encode_plane_set([np.zeros((3, 4))], PipelineConfig(arity=1), enc, events)
    assert [(r, c) for r, c, _ in events] == [(r, c) for r in range(3) for c in range(4)]
    starts = [s for *_, s in events]
    assert starts == sorted(starts) and starts[0] == 0
