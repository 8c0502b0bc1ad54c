"""Synthetic scene generation for ground-truth rendering.

Meshes are triangle soups with per-vertex RGB colors (0..255). Presets are
deterministic for a fixed seed and cover the cases the pipeline needs to be
exercised on: textureless planes, step discontinuities that open disocclusion
gaps, box fields, triangle soups for complexity benchmarks and a single near
object for distance sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TriangleMesh", "Scene", "gen_scene", "load_obj", "save_obj", "PRESETS"]


@dataclass
class TriangleMesh:
    """Indexed triangle mesh with per-vertex colors.

    vertices: (n, 3) float64 world-space positions in meters.
    triangles: (m, 3) int32 vertex indices.
    colors: (n, 3) float32 RGB in [0, 255].
    """

    vertices: np.ndarray
    triangles: np.ndarray
    colors: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int32).reshape(-1, 3)
        self.colors = np.asarray(self.colors, dtype=np.float32).reshape(-1, 3)
        if len(self.triangles) < 1:
            raise ValueError("mesh needs at least one triangle")
        if len(self.colors) != len(self.vertices):
            raise ValueError("need one color per vertex")
        if self.triangles.min(initial=0) < 0 or self.triangles.max(initial=-1) >= len(self.vertices):
            raise ValueError("triangle indices out of range")


@dataclass
class Scene:
    meshes: list[TriangleMesh]
    background: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.meshes:
            raise ValueError("scene needs at least one mesh")

    def triangle_count(self) -> int:
        return int(sum(len(m.triangles) for m in self.meshes))


# ---------------------------------------------------------------------------
# color patterns painted onto grid vertices
# ---------------------------------------------------------------------------

def _pattern_colors(pattern: str, us: np.ndarray, vs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Vertex colors for grid parameters (us, vs) in [0, 1]."""
    if pattern == "flat":
        base = np.array([170.0, 60.0, 60.0])
        return np.broadcast_to(base, (len(us), 3)).copy()
    if pattern == "gradient":
        r = 40.0 + 200.0 * us
        g = 40.0 + 200.0 * vs
        b = 220.0 - 160.0 * us * vs
        return np.stack([r, g, b], axis=1)
    if pattern == "stripes":
        s = 0.5 + 0.5 * np.sin(us * 2.0 * np.pi * 12.0)
        r = 30.0 + 220.0 * s
        g = 30.0 + 220.0 * (1.0 - s)
        b = 80.0 + 120.0 * vs
        return np.stack([r, g, b], axis=1)
    if pattern == "checker":
        s = (0.5 + 0.5 * np.sin(us * 2 * np.pi * 8.0)) * (0.5 + 0.5 * np.sin(vs * 2 * np.pi * 8.0))
        r = 35.0 + 210.0 * s
        g = 200.0 - 150.0 * s
        b = 60.0 + 170.0 * vs
        return np.stack([r, g, b], axis=1)
    if pattern == "random":
        return rng.uniform(20.0, 235.0, size=(len(us), 3))
    raise ValueError(f"unknown color pattern {pattern!r}")


def _grid_quad(center, right, up, half_w, half_h, divisions, pattern, rng) -> TriangleMesh:
    """Planar grid of triangles spanning +-half_w/half_h around center."""
    center = np.asarray(center, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    up = np.asarray(up, dtype=np.float64)
    n = int(divisions) + 1
    us, vs = np.meshgrid(np.linspace(0.0, 1.0, n), np.linspace(0.0, 1.0, n), indexing="xy")
    us, vs = us.ravel(), vs.ravel()
    verts = (
        center[None, :]
        + right[None, :] * ((2.0 * us - 1.0) * half_w)[:, None]
        + up[None, :] * ((2.0 * vs - 1.0) * half_h)[:, None]
    )
    idx = np.arange(n * n).reshape(n, n)
    a, b, c, d = idx[:-1, :-1], idx[:-1, 1:], idx[1:, :-1], idx[1:, 1:]
    tris = np.concatenate(
        [
            np.stack([a.ravel(), b.ravel(), d.ravel()], axis=1),
            np.stack([a.ravel(), d.ravel(), c.ravel()], axis=1),
        ]
    )
    return TriangleMesh(verts, tris, _pattern_colors(pattern, us, vs, rng))


def _box(center, half_extents, color) -> TriangleMesh:
    cx, cy, cz = center
    hx, hy, hz = half_extents
    signs = np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=np.float64,
    )
    verts = signs * np.array([hx, hy, hz]) + np.array([cx, cy, cz])
    faces = np.array(
        [
            [0, 1, 3], [0, 3, 2],  # -x
            [4, 6, 7], [4, 7, 5],  # +x
            [0, 4, 5], [0, 5, 1],  # -y
            [2, 3, 7], [2, 7, 6],  # +y
            [0, 2, 6], [0, 6, 4],  # -z
            [1, 5, 7], [1, 7, 3],  # +z
        ],
        dtype=np.int32,
    )
    # slight per-vertex shading variation so faces remain distinguishable
    shade = 1.0 - 0.18 * (signs[:, 1] < 0)
    colors = np.asarray(color, dtype=np.float64)[None, :] * shade[:, None]
    return TriangleMesh(verts, faces, colors)


def _sphere(center, radius, lat=12, lon=18, pattern="gradient", rng=None) -> TriangleMesh:
    cx, cy, cz = center
    thetas = np.linspace(0.0, np.pi, lat + 1)
    phis = np.linspace(0.0, 2.0 * np.pi, lon, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    verts = np.stack(
        [
            cx + radius * np.sin(tt) * np.cos(pp),
            cy + radius * np.cos(tt),
            cz + radius * np.sin(tt) * np.sin(pp),
        ],
        axis=-1,
    ).reshape(-1, 3)
    idx = np.arange((lat + 1) * lon).reshape(lat + 1, lon)
    tris = []
    for i in range(lat):
        j0 = idx[i]
        j1 = idx[i + 1]
        j0n = np.roll(j0, -1)
        j1n = np.roll(j1, -1)
        tris.append(np.stack([j0, j1, j1n], axis=1))
        tris.append(np.stack([j0, j1n, j0n], axis=1))
    tris = np.concatenate(tris)
    us = (pp.ravel() / (2.0 * np.pi))
    vs = (tt.ravel() / np.pi)
    colors = _pattern_colors(pattern, us, vs, rng or np.random.default_rng(0))
    return TriangleMesh(verts, tris, colors)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _preset_plane(params, rng):
    d = float(params.get("distance", 2.0))
    pattern = params.get("pattern", "gradient")
    if d <= 0:
        raise ValueError("plane distance must be > 0")
    # oversize so the quad covers the view at distance d for fov up to ~75 deg
    half = 1.2 * d * 0.9
    mesh = _grid_quad((0.0, 0.0, d), (1, 0, 0), (0, 1, 0), half, half, 48, pattern, rng)
    return Scene([mesh], background=(12.0, 12.0, 18.0))


def _preset_step(params, rng):
    fg_d = float(params.get("fg_distance", 1.2))
    bg_d = float(params.get("bg_distance", 6.0))
    fg_width = float(params.get("fg_width", 0.22))
    if not (0.0 < fg_d < bg_d):
        raise ValueError("need 0 < fg_distance < bg_distance")
    bg_half = 1.2 * bg_d * 0.9
    bg = _grid_quad((0.0, 0.0, bg_d), (1, 0, 0), (0, 1, 0), bg_half, bg_half, 48,
                    params.get("bg_pattern", "gradient"), rng)
    # vertical foreground strip, slightly left of center so its trailing edge
    # opens a gap in right-dominant reprojection
    strip_half_w = fg_width * fg_d * 0.6
    strip_half_h = 1.2 * fg_d * 0.9
    fg = _grid_quad((-0.15 * fg_d, 0.0, fg_d), (1, 0, 0), (0, 1, 0),
                    strip_half_w, strip_half_h, 16, params.get("fg_pattern", "flat"), rng)
    return Scene([bg, fg], background=(12.0, 12.0, 18.0))


def _preset_boxes(params, rng):
    count = int(params.get("count", 6))
    d_min = float(params.get("min_distance", 1.5))
    spread = float(params.get("spread", 3.0))
    if count < 1:
        raise ValueError("boxes count must be >= 1")
    if d_min <= 0:
        raise ValueError("min_distance must be > 0")
    backdrop_d = d_min + spread + 3.0
    meshes = [
        _grid_quad((0.0, 0.0, backdrop_d), (1, 0, 0), (0, 1, 0),
                   1.2 * backdrop_d, 1.2 * backdrop_d, 48, "gradient", rng)
    ]
    for _ in range(count):
        size = rng.uniform(0.08, 0.22)
        # keep every vertex at z >= d_min; the eye baseline only moves x so
        # euclidean distance to either eye is >= z >= d_min
        z = rng.uniform(d_min + size, d_min + spread)
        x = rng.uniform(-0.45, 0.45) * z
        y = rng.uniform(-0.35, 0.35) * z
        color = rng.uniform(40.0, 230.0, size=3)
        meshes.append(_box((x, y, z), (size, size * rng.uniform(0.8, 2.2), size), color))
    return Scene(meshes, background=(12.0, 12.0, 18.0))


def _preset_random_triangles(params, rng):
    count = int(params.get("count", 1000))
    z0, z1 = params.get("z_range", (2.0, 9.0))
    if count < 1:
        raise ValueError("triangle count must be >= 1")
    z = rng.uniform(float(z0), float(z1), size=count)
    cx = rng.uniform(-0.5, 0.5, size=count) * z
    cy = rng.uniform(-0.5, 0.5, size=count) * z
    centers = np.stack([cx, cy, z], axis=1)
    # small triangles so per-triangle setup cost dominates rasterization
    edge = (0.02 + 0.03 * rng.random(count)) * z
    offsets = rng.normal(size=(count, 3, 3)) * edge[:, None, None] * 0.5
    offsets[:, :, 2] *= 0.02  # keep each triangle nearly depth-planar
    verts = (centers[:, None, :] + offsets).reshape(-1, 3)
    tris = np.arange(count * 3, dtype=np.int32).reshape(-1, 3)
    colors = np.repeat(rng.uniform(30.0, 230.0, size=(count, 3)), 3, axis=0)
    meshes = [TriangleMesh(verts, tris, colors)]
    if params.get("backdrop", False):
        # full-coverage variant for quality tests; benchmarks leave this off
        # so the triangle count stays exactly `count`
        backdrop_d = float(z1) + 2.0
        meshes.insert(
            0,
            _grid_quad((0.0, 0.0, backdrop_d), (1, 0, 0), (0, 1, 0),
                       1.2 * backdrop_d, 1.2 * backdrop_d, 48, "gradient", rng),
        )
    return Scene(meshes, background=(12.0, 12.0, 18.0))


def _preset_obj(params, rng):
    path = params.get("path")
    if not path:
        raise ValueError("obj preset needs a 'path' parameter")
    mesh = load_obj(path, color=params.get("color", (180.0, 180.0, 180.0)))
    return Scene([mesh], background=(12.0, 12.0, 18.0))


def _preset_near_object(params, rng):
    d = float(params.get("distance", 1.0))
    if d <= 0:
        raise ValueError("distance must be > 0")
    # scale with distance so the object covers a constant screen area
    radius = 0.28 * d
    obj = _sphere((0.0, 0.0, d), radius, pattern=params.get("pattern", "checker"), rng=rng)
    backdrop_d = max(6.0, 4.0 * d)
    backdrop = _grid_quad((0.0, 0.0, backdrop_d), (1, 0, 0), (0, 1, 0),
                          1.2 * backdrop_d, 1.2 * backdrop_d, 48, "gradient", rng)
    return Scene([backdrop, obj], background=(12.0, 12.0, 18.0))


PRESETS = {
    "plane": _preset_plane,
    "step": _preset_step,
    "boxes": _preset_boxes,
    "random-triangles": _preset_random_triangles,
    "near-object": _preset_near_object,
    "obj": _preset_obj,
}


def gen_scene(preset: str, params: dict | None = None, seed: int = 0) -> Scene:
    """Build a preset scene, deterministic for a fixed seed."""
    try:
        builder = PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown scene preset {preset!r}; available: {sorted(PRESETS)}") from None
    rng = np.random.default_rng(seed)
    return builder(dict(params or {}), rng)


# ---------------------------------------------------------------------------
# Wavefront OBJ (positions and faces only)
# ---------------------------------------------------------------------------

def load_obj(path, color=(180.0, 180.0, 180.0)) -> TriangleMesh:
    """Minimal OBJ reader: 'v' and 'f' records, faces fan-triangulated."""
    verts: list[list[float]] = []
    faces: list[list[int]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = [int(tok.split("/")[0]) for tok in parts[1:]]
                idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
                for k in range(1, len(idx) - 1):
                    faces.append([idx[0], idx[k], idx[k + 1]])
    if not faces:
        raise ValueError(f"no faces found in {path}")
    colors = np.broadcast_to(np.asarray(color, dtype=np.float32), (len(verts), 3)).copy()
    return TriangleMesh(np.array(verts), np.array(faces, dtype=np.int32), colors)


def save_obj(path, mesh: TriangleMesh) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in mesh.vertices:
            fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")
