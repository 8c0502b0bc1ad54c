"""Image quality metrics and the per-run report record.

SSIM uses the standard formulation: 11x11 Gaussian window (sigma 1.5),
k1=0.01, k2=0.03, dynamic range 255, computed on Rec. 601 luma; the scalar
score averages only windows fully inside the image. PSNR is
10*log10(255^2/MSE) over all channels in 8-bit space, with math.inf standing
in for identical images (serialized as null plus an ``identical`` flag,
never as a float infinity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import gaussian_filter

from .reproject import SourceBuffer

__all__ = ["ssim", "psnr", "error_map", "disocclusion_fraction", "MetricsReport"]

_SIGMA = 1.5
_RADIUS = 5  # 11x11 window
_K1 = 0.01
_K2 = 0.03
_L = 255.0


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    if a.ndim != 3 or a.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) color images, got {a.shape}")
    return a, b


def _luma(img: np.ndarray) -> np.ndarray:
    return img[:, :, 0] * 0.299 + img[:, :, 1] * 0.587 + img[:, :, 2] * 0.114


def _blur(x: np.ndarray) -> np.ndarray:
    return gaussian_filter(x, sigma=_SIGMA, radius=_RADIUS, mode="reflect")


def _ssim_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ya, yb = _luma(a), _luma(b)
    c1 = (_K1 * _L) ** 2
    c2 = (_K2 * _L) ** 2
    mu_a = _blur(ya)
    mu_b = _blur(yb)
    var_a = _blur(ya * ya) - mu_a * mu_a
    var_b = _blur(yb * yb) - mu_b * mu_b
    cov = _blur(ya * yb) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return num / den


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity of two images; 1.0 iff identical."""
    a, b = _check_pair(a, b)
    smap = _ssim_map(a, b)
    h, w = smap.shape
    if h > 2 * _RADIUS and w > 2 * _RADIUS:
        smap = smap[_RADIUS : h - _RADIUS, _RADIUS : w - _RADIUS]
    return float(smap.mean())


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak SNR in dB over all channels; math.inf for identical images."""
    a, b = _check_pair(a, b)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(_L * _L / mse)


def error_map(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Per-pixel error magnitude 1 - local SSIM, clipped to [0, 1]."""
    a, b = _check_pair(a, b)
    return np.clip(1.0 - _ssim_map(a, b), 0.0, 1.0)


def disocclusion_fraction(imb: SourceBuffer) -> float:
    """Fraction of buffer pixels marked as disocclusion."""
    return float((imb.gap_width > 0.0).mean())


@dataclass
class MetricsReport:
    ssim: float
    psnr_db: float  # math.inf when images are identical
    disocclusion_fraction: float
    triangle_ops: int
    pixel_ops: int
    wall_time_s: float
    counters: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        identical = math.isinf(self.psnr_db)
        d = {
            "ssim": self.ssim,
            "psnr_db": None if identical else self.psnr_db,
            "psnr_identical": identical,
            "disocclusion_fraction": self.disocclusion_fraction,
            "triangle_ops": self.triangle_ops,
            "pixel_ops": self.pixel_ops,
            "wall_time_s": self.wall_time_s,
        }
        if self.counters:
            d["counters"] = dict(self.counters)
        return d
