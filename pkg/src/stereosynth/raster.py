"""Minimal software triangle rasterizer used as the ground-truth oracle.

Edge-function rasterization with a z-buffer, near-plane clipping in camera
space and perspective-correct interpolation of vertex colors (no lighting,
no texturing). Depth follows the shared convention: values in [0, 1], larger
means closer, empty pixels stay at 0.

Pixel centers sit at half-integer coordinates; ties on shared edges are
broken by a fixed edge-direction rule so adjacent triangles never both claim
a boundary pixel. The implementation is sequential; every call is pure and
reentrant, and rows could be partitioned across workers without changing the
result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .camera import (
    CameraPose,
    Projection,
    StereoRig,
    eye_poses,
    projection_matrix,
    view_matrix,
)
from .counters import OpCounters
from .scenes import Scene

__all__ = ["Frame", "rasterize", "render_stereo_gt"]


@dataclass
class Frame:
    """One eye's rendered G-buffer subset: color plus depth."""

    color: np.ndarray  # (H, W, 3) float32, quantized 0..255
    depth: np.ndarray  # (H, W) float64 in [0, 1], larger = closer
    camera: tuple[CameraPose, Projection]

    @property
    def width(self) -> int:
        return self.color.shape[1]

    @property
    def height(self) -> int:
        return self.color.shape[0]


def _clip_near(poly_cam: np.ndarray, poly_col: np.ndarray, near: float):
    """Sutherland-Hodgman clip of a camera-space polygon against z <= -near."""
    out_pos, out_col = [], []
    n = len(poly_cam)
    for i in range(n):
        a, b = poly_cam[i], poly_cam[(i + 1) % n]
        ca, cb = poly_col[i], poly_col[(i + 1) % n]
        a_in = a[2] <= -near
        b_in = b[2] <= -near
        if a_in:
            out_pos.append(a)
            out_col.append(ca)
        if a_in != b_in:
            t = (-near - a[2]) / (b[2] - a[2])
            out_pos.append(a + t * (b - a))
            out_col.append(ca + t * (cb - ca))
    return out_pos, out_col


def _edge_accept(dx: float, dy: float) -> bool:
    # fill-convention tie rule: a boundary pixel belongs to the triangle whose
    # edge runs downward (or exactly leftward), never to both neighbors
    return dy < 0.0 or (dy == 0.0 and dx > 0.0)


def rasterize(
    scene: Scene,
    pose: CameraPose,
    proj: Projection,
    width: int,
    height: int,
    counters: OpCounters | None = None,
) -> Frame:
    """Render a scene deterministically; counts one triangle op per scene triangle."""
    if width < 1 or height < 1:
        raise ValueError("render target must be at least 1x1")
    view = view_matrix(pose)
    pmat = projection_matrix(proj)
    near = proj.near
    persp = pmat[3, 2] != 0.0

    color_buf = np.broadcast_to(
        np.asarray(scene.background, dtype=np.float64), (height, width, 3)
    ).copy()
    zbuf = np.zeros((height, width), dtype=np.float64)
    centers_x = np.arange(width, dtype=np.float64) + 0.5
    centers_y = np.arange(height, dtype=np.float64) + 0.5

    if counters is not None:
        counters.triangle_ops += scene.triangle_count()

    for mesh in scene.meshes:
        cam = mesh.vertices @ view[:3, :3].T + view[:3, 3]
        cols = mesh.colors.astype(np.float64)

        tri_cam = cam[mesh.triangles]  # (m, 3, 3)
        in_front = tri_cam[:, :, 2] <= -near
        n_in = in_front.sum(axis=1)

        for ti in range(len(mesh.triangles)):
            if n_in[ti] == 0:
                continue
            if n_in[ti] == 3:
                polys = [(tri_cam[ti], cols[mesh.triangles[ti]])]
            else:
                pos, pcol = _clip_near(tri_cam[ti], cols[mesh.triangles[ti]], near)
                if len(pos) < 3:
                    continue
                pos = np.asarray(pos)
                pcol = np.asarray(pcol)
                polys = [
                    (pos[[0, k, k + 1]], pcol[[0, k, k + 1]])
                    for k in range(1, len(pos) - 1)
                ]
            for tri, tri_col in polys:
                _draw_triangle(
                    tri, tri_col, pmat, persp, width, height,
                    color_buf, zbuf, centers_x, centers_y,
                )

    color = np.clip(np.floor(color_buf + 0.5), 0.0, 255.0).astype(np.float32)
    return Frame(color=color, depth=zbuf, camera=(pose, proj))


def _draw_triangle(tri_cam, tri_col, pmat, persp, width, height, color_buf, zbuf, centers_x, centers_y):
    # scalar setup keeps per-triangle numpy overhead low; only the bbox grid
    # work is vectorized
    v = [None, None, None]
    for i in range(3):
        cx, cy, cz = tri_cam[i]
        px = pmat[0, 0] * cx + pmat[0, 2] * cz
        py = pmat[1, 1] * cy + pmat[1, 2] * cz
        pz = pmat[2, 2] * cz + pmat[2, 3]
        w = -cz if persp else 1.0  # forward distance, > 0 after near clip
        v[i] = (
            (px / w + 1.0) * 0.5 * width,
            (py / w + 1.0) * 0.5 * height,
            pz / w,
            w,
        )

    area = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[1][1] - v[0][1]) * (v[2][0] - v[0][0])
    if area == 0.0:
        return
    if area < 0.0:  # render double-sided: flip winding instead of culling
        v[1], v[2] = v[2], v[1]
        tri_col = tri_col[[0, 2, 1]]
        area = -area

    (ax, ay, az, aw), (bx, by, bz, bw), (cx, cy, cz, cw) = v
    x0 = max(int(min(ax, bx, cx) - 0.5), 0)
    x1 = min(int(np.ceil(max(ax, bx, cx) - 0.5)), width - 1)
    y0 = max(int(min(ay, by, cy) - 0.5), 0)
    y1 = min(int(np.ceil(max(ay, by, cy) - 0.5)), height - 1)
    if x1 < x0 or y1 < y0:
        return

    px = centers_x[x0 : x1 + 1][None, :]
    py = centers_y[y0 : y1 + 1][:, None]

    # edge functions opposite each vertex; boundary rule picks one owner
    e0x, e0y = cx - bx, cy - by
    e1x, e1y = ax - cx, ay - cy
    e2x, e2y = bx - ax, by - ay
    w0 = e0x * (py - by) - e0y * (px - bx)
    w1 = e1x * (py - cy) - e1y * (px - cx)
    w2 = e2x * (py - ay) - e2y * (px - ax)
    inside = (w0 >= 0.0) if _edge_accept(e0x, e0y) else (w0 > 0.0)
    inside &= (w1 >= 0.0) if _edge_accept(e1x, e1y) else (w1 > 0.0)
    inside &= (w2 >= 0.0) if _edge_accept(e2x, e2y) else (w2 > 0.0)
    if not inside.any():
        return
    inv_area = 1.0 / area
    w0 *= inv_area
    w1 *= inv_area
    w2 *= inv_area

    # NDC z is affine in screen space; colors need the perspective divide
    ndc_depth = w0 * az + w1 * bz + w2 * cz
    dval = ndc_depth if persp else (1.0 - ndc_depth) * 0.5

    # depth 1 + epsilon is rounding noise from geometry at the near plane;
    # genuinely out-of-range depths (beyond far) stay culled
    sub_z = zbuf[y0 : y1 + 1, x0 : x1 + 1]
    write = inside & (dval >= 0.0) & (dval <= 1.0 + 1e-9) & (dval > sub_z)
    if not write.any():
        return
    np.minimum(dval, 1.0, out=dval)

    w0w, w1w, w2w = w0[write], w1[write], w2[write]
    if persp:
        inv_w = w0w / aw + w1w / bw + w2w / cw
        col = (
            w0w[:, None] * (tri_col[0] / aw)
            + w1w[:, None] * (tri_col[1] / bw)
            + w2w[:, None] * (tri_col[2] / cw)
        ) / inv_w[:, None]
    else:
        col = w0w[:, None] * tri_col[0] + w1w[:, None] * tri_col[1] + w2w[:, None] * tri_col[2]

    sub_z[write] = dval[write]
    color_buf[y0 : y1 + 1, x0 : x1 + 1][write] = col


def render_stereo_gt(
    scene: Scene,
    rig: StereoRig,
    head: CameraPose,
    proj: Projection,
    width: int,
    height: int,
    counters: OpCounters | None = None,
) -> tuple[Frame, Frame]:
    """Conventional baseline: rasterize both eyes separately (2N triangle ops)."""
    left_pose, right_pose = eye_poses(rig, head)
    left = rasterize(scene, left_pose, proj, width, height, counters)
    right = rasterize(scene, right_pose, proj, width, height, counters)
    return left, right
