"""Image file I/O: 8-bit PNG for color, PFM for float data.

Internal arrays keep row 0 at the bottom of the screen (NDC y = -1). PNG
files are flipped on write/read so they display upright; PFM is bottom-up by
definition, so buffers are written in natural row order. PFM handles one- or
three-channel float32 data and both endiannesses on read.
"""

from __future__ import annotations

import numpy as np
from PIL import Image

__all__ = [
    "write_png_color",
    "read_png_color",
    "write_png_gray16",
    "write_pfm",
    "read_pfm",
]


def write_png_color(path, img: np.ndarray) -> None:
    img = np.asarray(img)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) image, got {img.shape}")
    data = np.clip(img, 0, 255).astype(np.uint8)
    Image.fromarray(np.flipud(data), mode="RGB").save(path, format="PNG")


def read_png_color(path) -> np.ndarray:
    with Image.open(path) as im:
        arr = np.asarray(im.convert("RGB"), dtype=np.float32)
    return np.flipud(arr).copy()


def write_png_gray16(path, values: np.ndarray) -> None:
    """16-bit grayscale export of [0, 1] data, for viewing depth maps."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 2:
        raise ValueError(f"expected 2-d array, got shape {values.shape}")
    data = np.clip(values * 65535.0 + 0.5, 0, 65535).astype(np.uint16)
    Image.fromarray(np.flipud(data)).save(path, format="PNG")


def write_pfm(path, data: np.ndarray) -> None:
    data = np.asarray(data, dtype=np.float32)
    if data.ndim == 2:
        header = b"Pf"
    elif data.ndim == 3 and data.shape[2] == 3:
        header = b"PF"
    else:
        raise ValueError(f"PFM supports (H, W) or (H, W, 3) data, got {data.shape}")
    h, w = data.shape[:2]
    with open(path, "wb") as fh:
        fh.write(header + b"\n")
        fh.write(f"{w} {h}\n".encode("ascii"))
        fh.write(b"-1.0\n")  # negative scale = little-endian
        fh.write(data.astype("<f4").tobytes())


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.readline().strip()
        if header == b"PF":
            channels = 3
        elif header == b"Pf":
            channels = 1
        else:
            raise ValueError(f"not a PFM file: {path}")
        dims = fh.readline().split()
        w, h = int(dims[0]), int(dims[1])
        scale = float(fh.readline().strip())
        dtype = "<f4" if scale < 0 else ">f4"
        raw = np.frombuffer(fh.read(w * h * channels * 4), dtype=dtype)
    data = raw.astype(np.float32).reshape(h, w, channels)
    return data[:, :, 0] if channels == 1 else data
