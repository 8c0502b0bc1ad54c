"""Disocclusion filling at full output resolution.

Filled buffer pixels resolve by sampling the rendered eye's color image at
the recorded source coordinate (bilinear when linear interpolation is on,
nearest otherwise; with downsampled buffers the recorded shift is also
interpolated horizontally between filled neighbors). Disocclusion pixels
accumulate a weighted kernel spanning the gap's width, ending at the gap's
left edge and covering ``kernel_height`` buffer rows; candidates closer than
the gap's right-edge depth are skipped so only background ever contributes.

Weights come from a running remainder: each admitted candidate takes
``w_rem/2 + 0.3*w_rem*(u - a)/c`` of the remaining weight, and the final
divide by the weight actually spent makes every output a convex combination
of admitted samples. Candidates are visited columns-outer (left to right),
rows-inner, which pins the order-dependent weights down deterministically.

All gap pixels of one run share their triple and therefore their fill color,
so the implementation computes each run once; counters still report the cost
of the equivalent per-pixel kernel loop. Inputs are never mutated and output
pixels are independent, so any pixel partition could run concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counters import OpCounters
from .reproject import SourceBuffer

__all__ = ["PatchOptions", "PatchStats", "weight", "patch", "patch_with_stats", "median_patch"]


@dataclass(frozen=True)
class PatchOptions:
    kernel_height: int = 3
    linear_interp: bool = True

    def __post_init__(self):
        h = self.kernel_height
        if h < 1 or h % 2 == 0:
            raise ValueError(f"kernel_height must be odd and >= 1, got {h}")


@dataclass
class PatchStats:
    """Per-output-pixel read accounting plus fallback diagnostics."""

    reads: np.ndarray  # (H, W) int32 texture accesses per output pixel
    gap_pixels: int = 0
    fallback_pixels: int = 0
    black_pixels: int = 0


def weight(u: float, r, w_rem: float) -> float:
    """Kernel weight for a candidate at normalized coordinate ``u``.

    ``r`` is the disocclusion triple (a, b, c) with c > 0; ``w_rem`` the
    remaining weight in [0, 1]. Returns w_rem/2 + 0.3*w_rem*(u - a)/c.
    """
    a, _, c = float(r[0]), float(r[1]), float(r[2])
    if c == 0.0:
        raise ValueError("weight() needs a disocclusion triple (c > 0)")
    if not (0.0 <= w_rem <= 1.0):
        raise ValueError(f"w_rem must be in [0, 1], got {w_rem}")
    return w_rem * 0.5 + 0.3 * w_rem * ((float(u) - a) / c)


def _quantize(img: np.ndarray) -> np.ndarray:
    # round half away from zero; values are non-negative here
    return np.clip(np.floor(img + 0.5), 0.0, 255.0).astype(np.float32)


def _sample_color(color: np.ndarray, us: np.ndarray, vs: np.ndarray, bilinear: bool) -> np.ndarray:
    """Sample (H, W, 3) color at normalized coordinates, clamping at edges."""
    h, w = color.shape[:2]
    flat = color.reshape(-1, 3)
    if not bilinear:
        xi = np.clip(np.floor(us * w).astype(np.intp), 0, w - 1)
        yi = np.clip(np.floor(vs * h).astype(np.intp), 0, h - 1)
        return flat.take(yi * w + xi, axis=0).astype(np.float64)
    px = us * w - 0.5
    py = vs * h - 0.5
    x0 = np.clip(np.floor(px).astype(np.intp), 0, w - 1)
    y0 = np.clip(np.floor(py).astype(np.intp), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    tx = np.clip(px - x0, 0.0, 1.0)[..., None]
    ty = np.clip(py - y0, 0.0, 1.0)[..., None]
    r0 = y0 * w
    r1 = y1 * w
    top = flat.take(r0 + x0, axis=0) * (1.0 - tx) + flat.take(r0 + x1, axis=0) * tx
    bot = flat.take(r1 + x0, axis=0) * (1.0 - tx) + flat.take(r1 + x1, axis=0) * tx
    return top * (1.0 - ty) + bot * ty


def _resolved_buffer_colors(color: np.ndarray, imb: SourceBuffer, bilinear: bool) -> np.ndarray:
    """Color of every buffer pixel, resolved through its source coordinate."""
    hi, wi = imb.height, imb.width
    vs = np.broadcast_to(((np.arange(hi) + 0.5) / hi)[:, None], (hi, wi))
    return _sample_color(color, imb.source_u, vs, bilinear)


def _validate(color: np.ndarray, imb: SourceBuffer) -> np.ndarray:
    color = np.asarray(color)
    if color.ndim != 3 or color.shape[2] != 3 or min(color.shape[:2]) < 1:
        raise ValueError(f"color image must be (H, W, 3), got {color.shape}")
    if min(imb.height, imb.width) < 1:
        raise ValueError("source buffer is empty")
    return color


def patch(
    color: np.ndarray,
    imb: SourceBuffer,
    opts: PatchOptions | None = None,
    counters: OpCounters | None = None,
) -> np.ndarray:
    """Synthesize the target eye's image from the rendered color + buffer."""
    out, _ = patch_with_stats(color, imb, opts, counters)
    return out


def patch_with_stats(
    color: np.ndarray,
    imb: SourceBuffer,
    opts: PatchOptions | None = None,
    counters: OpCounters | None = None,
    quantize: bool = True,
) -> tuple[np.ndarray, PatchStats]:
    opts = opts or PatchOptions()
    color = _validate(color, imb)
    out_h, out_w = color.shape[:2]
    hi, wi = imb.height, imb.width

    u_full = (np.arange(out_w, dtype=np.float64) + 0.5) / out_w
    v_full = (np.arange(out_h, dtype=np.float64) + 0.5) / out_h
    ix_map = np.minimum((u_full * wi).astype(np.intp), wi - 1)
    iy_map = np.minimum((v_full * hi).astype(np.intp), hi - 1)

    gap_w = imb.gap_width
    is_gap_out = gap_w[np.ix_(iy_map, ix_map)] > 0.0

    out = np.empty((out_h, out_w, 3), dtype=np.float64)
    reads = np.full((out_h, out_w), 2, dtype=np.int32)  # buffer read + color sample

    # --- filled pixels, fully vectorized -------------------------------------
    src_a = imb.source_u[np.ix_(iy_map, ix_map)]
    if opts.linear_interp:
        # horizontal interpolation of the recorded shift between filled
        # neighbors recovers sub-buffer-pixel accuracy at downsampled sizes;
        # interpolating across a silhouette would invent ghost sources, so
        # only neighbors with near-adjacent source columns qualify
        s = u_full * wi - 0.5
        i0 = np.clip(np.floor(s).astype(np.intp), 0, wi - 1)
        i1 = np.minimum(i0 + 1, wi - 1)
        t = np.clip(s - i0, 0.0, 1.0)
        a0 = imb.source_u[np.ix_(iy_map, i0)]
        a1 = imb.source_u[np.ix_(iy_map, i1)]
        smooth = (
            (gap_w[np.ix_(iy_map, i0)] == 0.0)
            & (gap_w[np.ix_(iy_map, i1)] == 0.0)
            & (np.abs(a1 - a0) <= 1.5 / wi)
        )
        lerped = a0 * (1.0 - t)[None, :] + a1 * t[None, :]
        src_a = np.where(smooth, lerped, src_a)
    vv = np.broadcast_to(v_full[:, None], (out_h, out_w))
    out[:] = _sample_color(color, src_a, vv, bilinear=opts.linear_interp)

    # --- disocclusion runs ----------------------------------------------------
    stats = PatchStats(reads=reads, gap_pixels=int(is_gap_out.sum()))
    resolved = _resolved_buffer_colors(color, imb, bilinear=opts.linear_interp)
    gap_color, gap_reads, gap_fallback, gap_black = _fill_gap_runs(imb, resolved, opts)

    if is_gap_out.any():
        gap_color_full = gap_color[np.ix_(iy_map, ix_map)]
        out[is_gap_out] = gap_color_full[is_gap_out]
        reads_full = gap_reads[np.ix_(iy_map, ix_map)]
        reads[is_gap_out] = reads_full[is_gap_out]
        fb_full = gap_fallback[np.ix_(iy_map, ix_map)]
        stats.fallback_pixels = int((fb_full & is_gap_out).sum())
        blk_full = gap_black[np.ix_(iy_map, ix_map)]
        stats.black_pixels = int((blk_full & is_gap_out).sum())

    if counters is not None:
        counters.patch_pixels += out_h * out_w
        counters.texture_reads += int(reads.sum())
    return _quantize(out) if quantize else out, stats


def _fill_gap_runs(imb: SourceBuffer, resolved: np.ndarray, opts: PatchOptions):
    """Compute the fill color of every disocclusion buffer pixel.

    All pixels of a run share their triple, so one kernel evaluation per run
    suffices; runs are processed as one flat candidate stream with segmented
    weight products (in log space: a flat cumprod across segments would
    underflow). Returns (colors (hi, wi, 3), per-pixel reads, fallback mask,
    black mask); entries of filled pixels are left at zero/False.
    """
    hi, wi = imb.height, imb.width
    data = imb.data
    depth = imb.depth
    gap_w = imb.gap_width
    h_rows = opts.kernel_height
    half = h_rows // 2

    colors = np.zeros((hi, wi, 3), dtype=np.float64)
    reads = np.zeros((hi, wi), dtype=np.int32)
    fallback = np.zeros((hi, wi), dtype=bool)
    black = np.zeros((hi, wi), dtype=bool)

    gm = gap_w > 0.0
    if not gm.any():
        return colors, reads, fallback, black

    same_as_left = np.zeros_like(gm)
    same_as_left[:, 1:] = gm[:, 1:] & gm[:, :-1] & np.all(
        data[:, 1:] == data[:, :-1], axis=2
    )
    start_mask = gm & ~same_as_left
    run_id = np.cumsum(start_mask.ravel()).reshape(hi, wi) - 1  # valid under gm

    rows_r, cols_r = np.nonzero(start_mask)
    n_runs = len(rows_r)
    a_r = data[rows_r, cols_r, 0]
    b_r = data[rows_r, cols_r, 1]
    c_r = data[rows_r, cols_r, 2]
    anchor = np.round(a_r * wi - 0.5).astype(np.int64)
    gap_pix = np.maximum(np.round(c_r * wi).astype(np.int64), 1)

    # kernel columns end at the anchor and span the gap width, clipped to the
    # image; candidates go columns-outer left-to-right, rows-inner
    lo = np.maximum(anchor - gap_pix + 1, 0)
    hi_col = np.minimum(anchor, wi - 1)
    n_cand = np.maximum(hi_col - lo + 1, 0) * h_rows
    seg_start = np.concatenate(([0], np.cumsum(n_cand)[:-1]))
    total = int(n_cand.sum())

    run_of = np.repeat(np.arange(n_runs), n_cand)
    k = np.arange(total, dtype=np.int64) - seg_start[run_of]
    jc = lo[run_of] + k // h_rows
    jr = np.clip(rows_r[run_of] + (k % h_rows) - half, 0, hi - 1)

    cand_depth = depth[jr, jc]
    admitted = cand_depth <= b_r[run_of]
    u_cand = (jc + 0.5) / wi
    g = np.where(admitted, 0.5 + 0.3 * ((u_cand - a_r[run_of]) / c_r[run_of]), 0.0)

    cs = np.cumsum(np.log1p(-g))
    prev = np.concatenate(([0.0], cs[:-1]))
    w_before = np.exp(prev - prev[seg_start][run_of])
    wts = g * w_before

    spent = np.bincount(run_of, weights=wts, minlength=n_runs)
    cand_col = resolved[jr, jc]
    acc = np.stack(
        [np.bincount(run_of, weights=wts * cand_col[:, ch], minlength=n_runs) for ch in range(3)],
        axis=1,
    )
    fill_r = np.zeros((n_runs, 3), dtype=np.float64)
    ok = spent > 0.0
    fill_r[ok] = acc[ok] / spent[ok, None]
    reads_r = 1 + n_cand.astype(np.int32)

    # runs with no admissible background: nearest admissible filled pixel to
    # the left of the anchor, else black
    fb_r = np.zeros(n_runs, dtype=bool)
    blk_r = np.zeros(n_runs, dtype=bool)
    for r in np.flatnonzero(~ok):
        fb_r[r] = True
        row = rows_r[r]
        found = False
        for j in range(int(anchor[r]), -1, -1):
            reads_r[r] += 1
            if gap_w[row, j] == 0.0 and depth[row, j] <= b_r[r]:
                fill_r[r] = resolved[row, j]
                found = True
                break
        blk_r[r] = not found

    ids = run_id[gm]
    colors[gm] = fill_r[ids]
    reads[gm] = reads_r[ids]
    fallback[gm] = fb_r[ids]
    black[gm] = blk_r[ids]
    return colors, reads, fallback, black


def median_patch(
    color: np.ndarray,
    imb: SourceBuffer,
    window: int = 5,
    opts: PatchOptions | None = None,
    counters: OpCounters | None = None,
) -> np.ndarray:
    """Baseline: disocclusion pixels take the per-channel median of filled
    neighbors in a window x window buffer neighborhood; filled pixels resolve
    exactly as in :func:`patch`.
    """
    if window < 3 or window % 2 == 0:
        raise ValueError(f"window must be odd and >= 3, got {window}")
    opts = opts or PatchOptions()
    color = _validate(color, imb)
    out_h, out_w = color.shape[:2]
    hi, wi = imb.height, imb.width

    u_full = (np.arange(out_w, dtype=np.float64) + 0.5) / out_w
    v_full = (np.arange(out_h, dtype=np.float64) + 0.5) / out_h
    ix_map = np.minimum((u_full * wi).astype(np.intp), wi - 1)
    iy_map = np.minimum((v_full * hi).astype(np.intp), hi - 1)
    is_gap_out = imb.gap_width[np.ix_(iy_map, ix_map)] > 0.0

    base, _ = patch_with_stats(color, imb, opts, None)
    out = base.astype(np.float64)

    resolved = _resolved_buffer_colors(color, imb, bilinear=opts.linear_interp)
    filled = imb.filled
    depth = imb.depth
    gap_w = imb.gap_width
    half = window // 2
    n_reads = 0

    gap_color = np.zeros((hi, wi, 3), dtype=np.float64)
    gy, gx = np.nonzero(~filled)
    for row, col in zip(gy, gx):
        r0, r1 = max(row - half, 0), min(row + half + 1, hi)
        c0, c1 = max(col - half, 0), min(col + half + 1, wi)
        sel = filled[r0:r1, c0:c1]
        n_reads += sel.size + 1
        if sel.any():
            gap_color[row, col] = np.median(resolved[r0:r1, c0:c1][sel], axis=0)
        else:
            b = imb.data[row, col, 1]
            found = False
            for j in range(col, -1, -1):
                n_reads += 1
                if gap_w[row, j] == 0.0 and depth[row, j] <= b:
                    gap_color[row, col] = resolved[row, j]
                    found = True
                    break
            if not found:
                gap_color[row, col] = 0.0

    if is_gap_out.any():
        gap_full = gap_color[np.ix_(iy_map, ix_map)]
        out[is_gap_out] = gap_full[is_gap_out]
    if counters is not None:
        counters.patch_pixels += out_h * out_w
        counters.texture_reads += n_reads + 2 * out_h * out_w
    return _quantize(out)
