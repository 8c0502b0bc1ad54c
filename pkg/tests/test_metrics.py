import json
import math

import numpy as np
import pytest

from stereosynth.metrics import MetricsReport, disocclusion_fraction, error_map, psnr, ssim
from stereosynth.reproject import ShiftBuffer, SourceBuffer, stage2_scan


def checkerboard(h=64, w=64, period=8):
    yy, xx = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    tile = ((xx // period + yy // period) % 2) * 255.0
    return np.repeat(tile[:, :, None], 3, axis=2).astype(np.float32)


class TestSSIM:
    def test_identical_is_one(self):
        img = checkerboard()
        assert ssim(img, img) == 1.0

    def test_inverted_checkerboard_low(self):
        img = checkerboard()
        assert ssim(img, 255.0 - img) < 0.5

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(0, 255, size=(48, 48, 3))
        b = rng.uniform(0, 255, size=(48, 48, 3))
        assert abs(ssim(a, b) - ssim(b, a)) < 1e-9

    def test_range(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            a = rng.uniform(0, 255, size=(32, 32, 3))
            b = rng.uniform(0, 255, size=(32, 32, 3))
            assert -1.0 <= ssim(a, b) <= 1.0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            ssim(np.zeros((4, 4, 3)), np.zeros((5, 4, 3)))


class TestPSNR:
    def test_identical_is_sentinel(self):
        img = checkerboard()
        assert math.isinf(psnr(img, img))

    def test_black_vs_white_is_zero(self):
        black = np.zeros((16, 16, 3))
        white = np.full((16, 16, 3), 255.0)
        assert psnr(black, white) == pytest.approx(0.0, abs=1e-12)

    def test_uniform_plus_one_offset(self):
        rng = np.random.default_rng(2)
        a = rng.integers(0, 255, size=(32, 32, 3)).astype(np.float64)
        b = a + 1.0
        assert psnr(a, b) == pytest.approx(10 * math.log10(255**2), abs=1e-9)

    def test_monotone_in_noise_amplitude(self):
        rng = np.random.default_rng(3)
        base = rng.uniform(0, 255, size=(32, 32, 3))
        noise = rng.normal(size=base.shape)
        vals = [psnr(base, base + amp * noise) for amp in (1, 2, 4, 8, 16)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestErrorMap:
    def test_identical_all_zero(self):
        img = checkerboard()
        em = error_map(img, img)
        assert em.shape == img.shape[:2]
        assert np.allclose(em, 0.0)

    def test_localized_corruption_stays_local(self):
        img = checkerboard()
        other = img.copy()
        other[28:36, 28:36] = 128.0
        em = error_map(img, other)
        assert em[32, 32] > 0.01
        # outside the corruption plus the 5-pixel window dilation: untouched
        border = 5
        mask = np.ones_like(em, dtype=bool)
        mask[28 - border : 36 + border, 28 - border : 36 + border] = False
        assert np.all(em[mask] < 1e-9)

    def test_mean_tracks_scalar_ssim(self):
        rng = np.random.default_rng(4)
        a = rng.uniform(0, 255, size=(64, 64, 3))
        b = a + rng.normal(scale=12.0, size=a.shape)
        assert abs(error_map(a, b).mean() - (1.0 - ssim(a, b))) < 0.02

    def test_values_clipped_to_unit_range(self):
        img = checkerboard()
        em = error_map(img, 255.0 - img)
        assert em.min() >= 0.0 and em.max() <= 1.0


class TestDisocclusionFraction:
    def test_identity_buffer_zero(self):
        w = 100
        tu = np.tile((np.arange(w) + 0.5) / w, (1, 1))
        imb = stage2_scan(ShiftBuffer(tu, np.full((1, w), 0.5)))
        assert disocclusion_fraction(imb) == 0.0

    def test_ten_pixel_gap_in_hundred(self):
        data = np.zeros((1, 100, 3))
        data[0, 40:50, 2] = 10 / 100.0
        assert disocclusion_fraction(SourceBuffer(data)) == pytest.approx(0.1)

    def test_sentinel_buffer_is_all_gap(self):
        assert disocclusion_fraction(SourceBuffer.sentinel(4, 4)) == 1.0


class TestMetricsReport:
    def test_json_roundtrip_fields(self):
        rep = MetricsReport(
            ssim=0.97, psnr_db=31.5, disocclusion_fraction=0.01,
            triangle_ops=1000, pixel_ops=2000, wall_time_s=0.5,
            counters={"stage1_pixels": 10},
        )
        d = rep.to_json_dict()
        assert set(d) >= {"ssim", "psnr_db", "psnr_identical", "disocclusion_fraction",
                          "triangle_ops", "pixel_ops", "wall_time_s"}
        assert d["psnr_db"] == 31.5
        assert d["psnr_identical"] is False
        json.dumps(d)  # must be serializable

    def test_identical_sentinel_never_serializes_infinity(self):
        rep = MetricsReport(
            ssim=1.0, psnr_db=math.inf, disocclusion_fraction=0.0,
            triangle_ops=0, pixel_ops=0, wall_time_s=0.0,
        )
        d = rep.to_json_dict()
        assert d["psnr_db"] is None
        assert d["psnr_identical"] is True
        text = json.dumps(d)
        assert "Infinity" not in text
