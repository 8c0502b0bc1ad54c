"""
Inside the disocclusion patcher
===============================

Reprojection leaves gaps where the target eye sees around the foreground.
This script dissects one row of the intermediate buffer, then fills the
gaps twice: with the background-only weighted kernel and with the median
baseline, and scores both against ground truth.
"""

from pathlib import Path

import numpy as np

from stereosynth import (
    CameraPose,
    PatchOptions,
    PerspectiveProjection,
    ReprojectOptions,
    StereoRig,
    error_map,
    eye_poses,
    gen_scene,
    median_patch,
    patch,
    rasterize,
    reproject,
    reprojection_matrix,
    ssim,
    view_projection,
)
from stereosynth import imgio

out_dir = Path(__file__).parent / "output" / "02_disocclusion_patching"
out_dir.mkdir(parents=True, exist_ok=True)

scene = gen_scene("step", {"fg_distance": 1.0, "bg_distance": 5.0}, seed=3)
rig = StereoRig(ipd=0.07, dominant="right")
proj = PerspectiveProjection()
left_pose, right_pose = eye_poses(rig, CameraPose())

dominant = rasterize(scene, right_pose, proj, 384, 384)
m = reprojection_matrix(view_projection(right_pose, proj), view_projection(left_pose, proj))
imb = reproject(dominant.depth, m, ReprojectOptions())
imgio.write_pfm(out_dir / "source_buffer.pfm", imb.data)

# Anatomy of one disocclusion run: every pixel of a run stores the same
# (left edge, right-edge depth, width) triple. The run whose right edge is
# closest to the camera is the one the foreground strip opened.
row = 192
gap_cols = np.flatnonzero(imb.gap_width[row] > 0)
if gap_cols.size:
    col = gap_cols[np.argmax(imb.depth[row, gap_cols])]
    a, b, c = imb.data[row, col]
    print(f"row {row}: foreground-edge gap at column {col}")
    print(f"  left edge u = {a:.4f} (column {int(round(a * imb.width - 0.5))})")
    print(f"  right-edge depth = {b:.4f}  (larger = closer)")
    print(f"  width = {c:.4f} of the row ({int(round(c * imb.width))} px)")

gt = rasterize(scene, left_pose, proj, 384, 384)
kernel_img = patch(dominant.color, imb, PatchOptions(kernel_height=3))
median_img = median_patch(dominant.color, imb, window=5)

for name, img in (("kernel", kernel_img), ("median", median_img)):
    score = ssim(img, gt.color)
    print(f"{name} patcher: ssim={score:.4f}")
    imgio.write_png_color(out_dir / f"patched_{name}.png", img)
    imgio.write_png_gray16(out_dir / f"error_{name}.png", error_map(img, gt.color))
print(f"outputs in {out_dir}")
