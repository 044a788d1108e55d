import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coordrepr.core import HeatmapConfig, ImageDims, Keypoint, SimDRConfig, quantize_coord
from coordrepr.encoders import encode_heatmap, encode_simdr, encode_simdr_sa, smooth_labels


def test_heatmap_exact_peak():
    cfg = HeatmapConfig(4, 2.0, ImageDims(16, 16), peak_mode="exact-eq1")
    t = encode_heatmap(Keypoint(8.0, 8.0), cfg)
    assert t.grid.shape == (4, 4)
    assert t.grid[2, 2] == pytest.approx(1 / (8 * math.pi), rel=1e-12)
    assert t.grid[2, 2] == pytest.approx(0.039789, abs=1e-6)
    assert t.grid.max() == t.grid[2, 2]


def test_heatmap_peak_one():
    cfg = HeatmapConfig(4, 2.0, ImageDims(16, 16))
    t = encode_heatmap(Keypoint(8.0, 8.0), cfg)
    assert t.grid[2, 2] == 1.0


def test_heatmap_off_peak_matches_scalar_formula():
    cfg = HeatmapConfig(4, 2.0, ImageDims(32, 16), peak_mode="exact-eq1")
    t = encode_heatmap(Keypoint(9.0, 5.0), cfg)
    mx, my = 9.0 / 4, 5.0 / 4
    for j in range(t.grid.shape[0]):
        for i in range(t.grid.shape[1]):
            want = math.exp(-((i - mx) ** 2 + (j - my) ** 2) / 8) / (8 * math.pi)
            assert t.grid[j, i] == pytest.approx(want, rel=1e-12)


def test_heatmap_invisible_is_zero():
    cfg = HeatmapConfig(4, 2.0, ImageDims(16, 16))
    assert not encode_heatmap(Keypoint(8.0, 8.0, visible=False), cfg).grid.any()


def test_heatmap_out_of_bounds():
    with pytest.raises(ValueError):
        encode_heatmap(Keypoint(16.0, 2.0), HeatmapConfig(4, 2.0, ImageDims(16, 16)))


@given(st.floats(0, 31.99), st.floats(0, 31.99))
def test_heatmap_transpose_symmetry(x, y):
    cfg = HeatmapConfig(4, 2.0, ImageDims(32, 32))
    a = encode_heatmap(Keypoint(x, y), cfg).grid
    b = encode_heatmap(Keypoint(y, x), cfg).grid
    np.testing.assert_allclose(a, b.T, rtol=0, atol=0)


@pytest.mark.parametrize("kp, dims, k, ix, iy", [
    ((3.7, 1.2), (8, 8), 2, 7, 2),
    ((0.0, 0.0), (4, 4), 1, 0, 0),
    ((3.99, 0.0), (4, 4), 1, 3, 0),
])
def test_simdr_one_hot(kp, dims, k, ix, iy):
    t = encode_simdr(Keypoint(*kp), SimDRConfig(k, ImageDims(*dims)))
    assert t.kind == "one-hot"
    assert len(t.x_vec) == dims[0] * k and len(t.y_vec) == dims[1] * k
    assert t.x_vec[ix] == 1 and t.x_vec.sum() == 1
    assert t.y_vec[iy] == 1 and t.y_vec.sum() == 1


def test_simdr_out_of_bounds():
    with pytest.raises(ValueError):
        encode_simdr(Keypoint(-1.0, 0.0), SimDRConfig(2, ImageDims(8, 8)))


def test_smooth_labels_values():
    t = encode_simdr(Keypoint(3.7, 1.2), SimDRConfig(2, ImageDims(8, 8)))
    s = smooth_labels(t, 0.1)
    # summation oracle: (1 - eps) mass on the target plus eps spread over N bins
    n = 16
    on = sum([0.9] + [0.1 / n])
    off = 0.1 / n
    assert s.x_vec[7] == pytest.approx(on) == pytest.approx(0.90625)
    assert np.delete(s.x_vec, 7) == pytest.approx(np.full(15, off))
    assert off == pytest.approx(0.00625)
    assert s.x_vec.sum() == pytest.approx(1.0, abs=1e-9)
    assert s.kind == "smoothed"


def test_smooth_labels_identity_and_errors():
    t = encode_simdr(Keypoint(2.0, 2.0), SimDRConfig(1, ImageDims(8, 8)))
    np.testing.assert_array_equal(smooth_labels(t, 0.0).x_vec, t.x_vec)
    for eps in (-0.1, 1.0):
        with pytest.raises(ValueError):
            smooth_labels(t, eps)
    with pytest.raises(ValueError):
        smooth_labels(smooth_labels(t, 0.1), 0.1)


@given(st.floats(0, 15.99), st.floats(0, 0.9))
def test_smoothing_preserves_argmax(x, eps):
    t = encode_simdr(Keypoint(x, 0.0), SimDRConfig(2, ImageDims(16, 4)))
    assert smooth_labels(t, eps).x_vec.argmax() == t.x_vec.argmax()


def test_space_aware_raw_values():
    cfg = SimDRConfig(2, ImageDims(16, 16))
    t = encode_simdr_sa(Keypoint(3.6, 3.6), cfg, sigma=2.0, renormalize=False)  # x' = round(7.2) = 7
    peak = 1 / (math.sqrt(2 * math.pi) * 2)
    assert t.x_vec[7] == pytest.approx(peak, rel=1e-12)
    assert t.x_vec[7] == pytest.approx(0.199471, abs=1e-6)
    # two bins from the centre at sigma=2: exponent (9 - 7)^2 / (2 * 2^2) = 1/2
    assert t.x_vec[9] == pytest.approx(peak * math.exp(-0.5), rel=1e-12)
    assert t.x_vec[9] == pytest.approx(0.120985, abs=1e-6)


def test_space_aware_renormalized():
    cfg = SimDRConfig(3, ImageDims(10, 7))
    t = encode_simdr_sa(Keypoint(0.2, 6.9), cfg, sigma=1.5)
    assert t.kind == "space-aware"
    assert t.x_vec.sum() == pytest.approx(1.0, abs=1e-9)
    assert t.y_vec.sum() == pytest.approx(1.0, abs=1e-9)
    assert (t.x_vec >= 0).all()


def test_space_aware_bad_sigma():
    with pytest.raises(ValueError):
        encode_simdr_sa(Keypoint(1, 1), SimDRConfig(1, ImageDims(4, 4)), sigma=0.0)


@given(st.floats(0, 31.99), st.sampled_from([0.5, 1.0, 2.0, 3.0]), st.integers(1, 4))
def test_space_aware_argmax_is_quantized_index(x, sigma, k):
    cfg = SimDRConfig(k, ImageDims(32, 4))
    idx = quantize_coord(x, k, cfg.x_len)
    margin = math.ceil(3 * sigma)
    if margin <= idx <= cfg.x_len - 1 - margin:
        t = encode_simdr_sa(Keypoint(x, 0.0), cfg, sigma=sigma)
        assert t.x_vec.argmax() == idx
