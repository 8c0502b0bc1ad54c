"""Two-stage depth reprojection into resolution-independent buffers.

Stage 1 pushes every depth sample through the reprojection matrix and
records, per buffer pixel, the normalized horizontal coordinate it lands on
in the destination view plus its reprojected depth ("where each pixel
goes"). Stage 2 inverts that into "where each destination pixel comes from"
with a per-row resolve: when several sources land on one column the closest
depth wins, and jumps of more than one column are recorded as disocclusion
runs carrying (left edge, right-edge depth, run width).

Both buffers live at 1/k of the full render resolution (k in {1,2,4,8,16})
and store normalized coordinates, so the patcher can consume them at any
output resolution. Stage 1 is pure per pixel; stage 2 only ever reads and
writes within a single row, so rows can be processed concurrently by
disjoint workers. Nothing here mutates its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counters import OpCounters

__all__ = [
    "DOWNSAMPLE_FACTORS",
    "ReprojectOptions",
    "ShiftBuffer",
    "SourceBuffer",
    "stage1_reproject",
    "stage2_scan",
    "reproject",
]

DOWNSAMPLE_FACTORS = (1, 2, 4, 8, 16)


@dataclass(frozen=True)
class ReprojectOptions:
    """downsample: buffer resolution divisor; direction: (dominant, target) eyes."""

    downsample: int = 1
    direction: tuple[str, str] = ("right", "left")

    def __post_init__(self):
        if self.downsample not in DOWNSAMPLE_FACTORS:
            raise ValueError(f"downsample must be one of {DOWNSAMPLE_FACTORS}, got {self.downsample}")
        d = tuple(self.direction)
        if len(d) != 2 or any(e not in ("left", "right") for e in d) or d[0] == d[1]:
            raise ValueError(f"direction must pair distinct eyes, got {self.direction!r}")
        object.__setattr__(self, "direction", d)


@dataclass
class ShiftBuffer:
    """Stage-1 output: per pixel, destination u and reprojected depth."""

    target_u: np.ndarray  # (H, W) float64, normalized destination coordinate
    depth: np.ndarray  # (H, W) float64, larger = closer

    def __post_init__(self):
        self.target_u = np.asarray(self.target_u, dtype=np.float64)
        self.depth = np.asarray(self.depth, dtype=np.float64)
        if self.target_u.ndim != 2 or self.target_u.shape != self.depth.shape:
            raise ValueError("target_u and depth must be matching 2-d arrays")
        if min(self.target_u.shape) < 1:
            raise ValueError("buffer dimensions must be >= 1")

    @property
    def height(self) -> int:
        return self.target_u.shape[0]

    @property
    def width(self) -> int:
        return self.target_u.shape[1]


# Columns never hit by any source keep this sentinel: marked as disocclusion
# spanning the whole row width, anchored at column 0, with depth 0 (farthest).
_SENTINEL_GAP_WIDTH = 1.0


@dataclass
class SourceBuffer:
    """Stage-2 output: per pixel triple (a, b, c).

    Filled pixels (c == 0): a is the normalized source column the color comes
    from, b its reprojected depth. Disocclusion pixels (c > 0): a is the
    normalized coordinate of the gap's left-edge column, b the depth of the
    first filled column to the right, c the run width in normalized units.
    """

    data: np.ndarray  # (H, W, 3) float64

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError("source buffer must be (H, W, 3)")

    @classmethod
    def sentinel(cls, height: int, width: int) -> "SourceBuffer":
        data = np.empty((height, width, 3), dtype=np.float64)
        data[:, :, 0] = 0.5 / width
        data[:, :, 1] = 0.0
        data[:, :, 2] = _SENTINEL_GAP_WIDTH
        return cls(data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def source_u(self) -> np.ndarray:
        return self.data[:, :, 0]

    @property
    def depth(self) -> np.ndarray:
        return self.data[:, :, 1]

    @property
    def gap_width(self) -> np.ndarray:
        return self.data[:, :, 2]

    @property
    def filled(self) -> np.ndarray:
        return self.data[:, :, 2] == 0.0


def _buffer_shape(full_h: int, full_w: int, k: int) -> tuple[int, int]:
    return (-(-full_h // k), -(-full_w // k))


def stage1_reproject(
    depth: np.ndarray,
    m: np.ndarray,
    opts: ReprojectOptions,
    counters: OpCounters | None = None,
) -> ShiftBuffer:
    """Per-pixel matrix transform of the depth map into a shift buffer.

    For each buffer pixel center (u, v) the NDC point (2u-1, 2v-1, D, 1) is
    transformed by ``m`` with a homogeneous divide when needed; the result's
    x maps back to a normalized destination coordinate and its z is kept as
    the reprojected depth. Depth is sampled nearest-neighbor from the
    full-resolution map, never averaged.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2 or min(depth.shape) < 1:
        raise ValueError(f"depth image must be 2-d and non-empty, got shape {depth.shape}")
    if depth.size and (not np.isfinite(depth).all() or depth.min() < -1e-9 or depth.max() > 1 + 1e-9):
        raise ValueError("depth image values must lie in [0, 1]")
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (4, 4):
        raise ValueError(f"reprojection matrix must be 4x4, got {m.shape}")

    full_h, full_w = depth.shape
    h, w = _buffer_shape(full_h, full_w, opts.downsample)

    u = (np.arange(w, dtype=np.float64) + 0.5) / w
    v = (np.arange(h, dtype=np.float64) + 0.5) / h
    src_x = np.minimum((u * full_w).astype(np.intp), full_w - 1)
    src_y = np.minimum((v * full_h).astype(np.intp), full_h - 1)
    d = depth[np.ix_(src_y, src_x)]

    ndc_x = np.broadcast_to(2.0 * u - 1.0, (h, w))
    ndc_y = np.broadcast_to((2.0 * v - 1.0)[:, None], (h, w))
    ones = np.ones((h, w), dtype=np.float64)
    c = np.stack([ndc_x, ndc_y, d, ones], axis=-1)
    chat = c @ m.T

    with np.errstate(divide="ignore", invalid="ignore"):
        wcol = chat[:, :, 3]
        need_div = np.abs(wcol - 1.0) > 1e-9
        scale = np.where(need_div, 1.0 / wcol, 1.0)
    x = chat[:, :, 0] * scale
    z = chat[:, :, 2] * scale

    if counters is not None:
        counters.stage1_pixels += h * w
    return ShiftBuffer(target_u=(x + 1.0) * 0.5, depth=z)


def stage2_scan(shift: ShiftBuffer, counters: OpCounters | None = None) -> SourceBuffer:
    """Row scan turning destination coordinates into source lookups.

    Per row and destination column, the source with the largest reprojected
    depth wins (ties keep the leftmost source). Maximal runs of columns that
    no source reached, bounded on the right by a filled column, become
    disocclusion runs: every pixel of a run stores the same (left edge,
    right-edge depth, width) triple. A run touching the row's left boundary
    is anchored at column 0; trailing unreached columns keep the sentinel.
    """
    h, w = shift.height, shift.width
    out = SourceBuffer.sentinel(h, w)
    data = out.data

    tu = shift.target_u
    dep = shift.depth
    valid = np.isfinite(tu) & np.isfinite(dep) & (tu >= 0.0) & (tu < 1.0) & (dep > 0.0)

    if valid.any():
        rows, cols = np.nonzero(valid)
        xhat = np.minimum((tu[rows, cols] * w).astype(np.intp), w - 1)
        d = dep[rows, cols]
        # winner per (row, xhat): max depth; equal depths keep the leftmost
        # source, which the stable sort preserves from scan order
        key = rows.astype(np.int64) * w + xhat
        order = np.lexsort((-d, key))
        key, xh, dd, cc = key[order], xhat[order], d[order], cols[order]
        first = np.empty(len(key), dtype=bool)
        first[0] = True
        first[1:] = key[1:] != key[:-1]
        rw = (key[first] // w).astype(np.intp)
        xw, dw, cw = xh[first], dd[first], cc[first]

        data[rw, xw, 0] = (cw + 0.5) / w
        data[rw, xw, 1] = dw
        data[rw, xw, 2] = 0.0

        filled = np.zeros((h, w), dtype=bool)
        filled[rw, xw] = True

        idx = np.broadcast_to(np.arange(w, dtype=np.int64), (h, w))
        prev = np.maximum.accumulate(np.where(filled, idx, -1), axis=1)
        nxt = np.where(filled, idx, w)
        nxt = np.minimum.accumulate(nxt[:, ::-1], axis=1)[:, ::-1]

        gap = ~filled & (nxt < w) & ~((prev == -1) & (idx == 0))
        if gap.any():
            anchor = np.maximum(prev, 0)
            right_depth = np.take_along_axis(data[:, :, 1], np.minimum(nxt, w - 1), axis=1)
            run_len = nxt - anchor - 1
            data[:, :, 0] = np.where(gap, (anchor + 0.5) / w, data[:, :, 0])
            data[:, :, 1] = np.where(gap, right_depth, data[:, :, 1])
            data[:, :, 2] = np.where(gap, run_len / w, data[:, :, 2])

    if counters is not None:
        counters.stage2_pixels += h * w
    return out


def reproject(
    depth: np.ndarray,
    m: np.ndarray,
    opts: ReprojectOptions | None = None,
    counters: OpCounters | None = None,
) -> SourceBuffer:
    """Convenience composition of the two stages."""
    opts = opts or ReprojectOptions()
    return stage2_scan(stage1_reproject(depth, m, opts, counters), counters)
