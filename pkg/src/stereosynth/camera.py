"""Camera math: quaternions, view/projection matrices, stereo rigs.

All matrices are 4x4 row-major ``numpy.float64`` arrays acting on homogeneous
column vectors (matrix on the left).  The same convention is used by the
rasterizer and the reprojector, which is the only thing that actually matters
for the pipeline to be self-consistent.

Coordinate conventions:

* World space is right-handed; a camera with identity rotation looks down
  world +z with +y up.
* Clip/NDC x and y are in [-1, 1]. Screen u = (x + 1) / 2, v = (y + 1) / 2.
* Depth buffers store values in [0, 1] with larger = closer. For the
  perspective projection this is exactly the matrix's own NDC z (reversed-z),
  so a depth sample can be pushed through a reprojection matrix unchanged.
  For the orthographic variant, depth = (far - z) / (far - near).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Quaternion",
    "CameraPose",
    "PerspectiveProjection",
    "OrthographicProjection",
    "Projection",
    "StereoRig",
    "rotation_matrix",
    "view_matrix",
    "projection_matrix",
    "view_projection",
    "reprojection_matrix",
    "eye_poses",
    "min_object_distance",
    "depth_from_ndc_z",
    "ndc_z_from_depth",
]

UNIT_NORM_TOL = 1e-4


@dataclass(frozen=True)
class Quaternion:
    """Unit quaternion ``s + xi + yj + zk`` (scalar part first)."""

    s: float = 1.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def identity(cls) -> "Quaternion":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis, angle_rad: float) -> "Quaternion":
        """Rotation of ``angle_rad`` about ``axis`` (need not be normalized)."""
        axis = np.asarray(axis, dtype=np.float64)
        n = np.linalg.norm(axis)
        if n == 0.0:
            raise ValueError("rotation axis must be nonzero")
        axis = axis / n
        half = 0.5 * angle_rad
        s = math.sin(half)
        return cls(math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s)

    def norm(self) -> float:
        return math.sqrt(self.s * self.s + self.x * self.x + self.y * self.y + self.z * self.z)

    def normalized(self) -> "Quaternion":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize zero quaternion")
        return Quaternion(self.s / n, self.x / n, self.y / n, self.z / n)

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.s, -self.x, -self.y, -self.z)

    def rotate(self, v) -> np.ndarray:
        """Rotate a 3-vector by this quaternion (local -> world)."""
        r = rotation_matrix(self)
        return r[:3, :3] @ np.asarray(v, dtype=np.float64)


@dataclass(frozen=True)
class CameraPose:
    """World-space camera placement: position in meters plus orientation.

    ``rotation`` maps camera-local directions to world directions; the
    camera's local +z is its viewing direction and local +x its screen-right.
    """

    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rotation: Quaternion = field(default_factory=Quaternion.identity)

    def __post_init__(self):
        pos = tuple(float(c) for c in self.position)
        if len(pos) != 3 or not all(math.isfinite(c) for c in pos):
            raise ValueError(f"camera position must be 3 finite scalars, got {self.position!r}")
        object.__setattr__(self, "position", pos)
        if abs(self.rotation.norm() - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"camera rotation must be a unit quaternion, |q| = {self.rotation.norm():.6g}")


@dataclass(frozen=True)
class PerspectiveProjection:
    """Symmetric perspective frustum with reversed-z depth.

    NDC z equals near*(far - z)/(z*(far - near)): 1 at the near plane, 0 at
    the far plane, larger = closer. That value is what depth buffers store.
    """

    fov_y: float = 60.0  # degrees
    aspect: float = 1.0
    near: float = 0.3
    far: float = 1000.0

    def __post_init__(self):
        if not (0.0 < self.fov_y < 180.0):
            raise ValueError(f"fov_y must be in (0, 180) degrees, got {self.fov_y}")
        _check_frustum(self.aspect, self.near, self.far)


@dataclass(frozen=True)
class OrthographicProjection:
    """Engine-style orthographic frustum slab.

    ``size`` is the half height of the view volume in meters. NDC z runs
    linearly from -1 (near) to +1 (far); depth buffers store the remapped
    (far - z)/(far - near).
    """

    aspect: float = 1.0
    size: float = 1.0
    near: float = 0.3
    far: float = 1000.0

    def __post_init__(self):
        if self.size <= 0.0:
            raise ValueError(f"size must be > 0, got {self.size}")
        _check_frustum(self.aspect, self.near, self.far)


Projection = PerspectiveProjection | OrthographicProjection


def _check_frustum(aspect: float, near: float, far: float) -> None:
    if aspect <= 0.0:
        raise ValueError(f"aspect must be > 0, got {aspect}")
    if not (0.0 < near < far):
        raise ValueError(f"need 0 < near < far, got near={near}, far={far}")


@dataclass(frozen=True)
class StereoRig:
    """Eye geometry: interpupillary distance and which eye gets rendered."""

    ipd: float = 0.063  # meters
    dominant: str = "right"

    def __post_init__(self):
        if self.ipd < 0.0 or not math.isfinite(self.ipd):
            raise ValueError(f"ipd must be >= 0, got {self.ipd}")
        if self.dominant not in ("left", "right"):
            raise ValueError(f"dominant eye must be 'left' or 'right', got {self.dominant!r}")

    @property
    def other(self) -> str:
        return "left" if self.dominant == "right" else "right"


def rotation_matrix(q: Quaternion) -> np.ndarray:
    """4x4 rotation matrix of a unit quaternion (local -> world).

    Raises ValueError if the quaternion norm deviates from 1 by more
    than 1e-4.
    """
    if abs(q.norm() - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"quaternion must be unit norm, |q| = {q.norm():.6g}")
    s, x, y, z = q.s, q.x, q.y, q.z
    return np.array(
        [
            [1 - 2 * y * y - 2 * z * z, 2 * x * y - 2 * s * z, 2 * x * z + 2 * s * y, 0.0],
            [2 * x * y + 2 * s * z, 1 - 2 * x * x - 2 * z * z, 2 * y * z - 2 * s * x, 0.0],
            [2 * x * z - 2 * s * y, 2 * y * z + 2 * s * x, 1 - 2 * x * x - 2 * y * y, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=np.float64,
    )


# Negates the camera-space z axis so that visible points end up at negative z,
# which is what both projection variants expect. Bottom-right element is 1 so
# the matrix stays invertible.
_FLIP_Z = np.diag([1.0, 1.0, -1.0, 1.0])


def view_matrix(pose: CameraPose) -> np.ndarray:
    """World-to-camera transform: Flip . R^T . T(-position).

    After this transform a point at forward distance d from the camera sits
    at camera z = -d, so the projection matrices below see an OpenGL-style
    camera space.
    """
    r_t = rotation_matrix(pose.rotation).T
    t = np.eye(4, dtype=np.float64)
    t[:3, 3] = -np.asarray(pose.position, dtype=np.float64)
    return _FLIP_Z @ r_t @ t


def projection_matrix(p: Projection) -> np.ndarray:
    """Camera-to-clip matrix for either projection variant."""
    if isinstance(p, OrthographicProjection):
        rng = p.far - p.near
        return np.array(
            [
                [1.0 / (p.aspect * p.size), 0.0, 0.0, 0.0],
                [0.0, 1.0 / p.size, 0.0, 0.0],
                [0.0, 0.0, -2.0 / rng, -(p.far + p.near) / rng],
                [0.0, 0.0, 0.0, 1.0],
            ],
            dtype=np.float64,
        )
    if isinstance(p, PerspectiveProjection):
        g = 1.0 / math.tan(math.radians(p.fov_y) * 0.5)
        rng = p.far - p.near
        # Reversed-z rows: z_ndc = near*(far - z)/(z*rng), w = forward distance.
        return np.array(
            [
                [g / p.aspect, 0.0, 0.0, 0.0],
                [0.0, g, 0.0, 0.0],
                [0.0, 0.0, p.near / rng, p.near * p.far / rng],
                [0.0, 0.0, -1.0, 0.0],
            ],
            dtype=np.float64,
        )
    raise TypeError(f"unknown projection type: {type(p).__name__}")


def view_projection(pose: CameraPose, proj: Projection) -> np.ndarray:
    """Combined world-to-clip matrix, P . V."""
    return projection_matrix(proj) @ view_matrix(pose)


def reprojection_matrix(vp_src: np.ndarray, vp_dst: np.ndarray) -> np.ndarray:
    """Matrix mapping source clip coordinates to destination clip coordinates.

    Satisfies M @ (vp_src @ p) == vp_dst @ p for every world point p, so a
    screen-space sample (with its depth) can be carried into the other
    camera with one transform and a homogeneous divide.

    Raises numpy.linalg.LinAlgError when vp_src is singular.
    """
    vp_src = np.asarray(vp_src, dtype=np.float64)
    vp_dst = np.asarray(vp_dst, dtype=np.float64)
    if vp_src.shape != (4, 4) or vp_dst.shape != (4, 4):
        raise ValueError("view-projection matrices must be 4x4")
    inv = np.linalg.inv(vp_src)
    if not np.isfinite(inv).all():
        raise np.linalg.LinAlgError("source view-projection matrix is singular")
    return vp_dst @ inv


def eye_poses(rig: StereoRig, head: CameraPose) -> tuple[CameraPose, CameraPose]:
    """(left, right) camera poses, offset +-ipd/2 along the head's local x."""
    offset = head.rotation.rotate((0.5 * rig.ipd, 0.0, 0.0))
    head_pos = np.asarray(head.position, dtype=np.float64)
    left = CameraPose(tuple(head_pos - offset), head.rotation)
    right = CameraPose(tuple(head_pos + offset), head.rotation)
    return left, right


def min_object_distance(ipd: float, fov_y: float) -> float:
    """Closest object distance the synthesis handles well: (ipd/2)*cot(fov/2).

    ``fov_y`` in degrees. Linear in ipd, decreasing in fov.
    """
    if ipd < 0.0:
        raise ValueError(f"ipd must be >= 0, got {ipd}")
    if not (0.0 < fov_y < 180.0):
        raise ValueError(f"fov_y must be in (0, 180) degrees, got {fov_y}")
    return 0.5 * ipd / math.tan(math.radians(fov_y) * 0.5)


def depth_from_ndc_z(proj: Projection, ndc_z):
    """Buffer depth value for an NDC z of the given projection."""
    if isinstance(proj, OrthographicProjection):
        return (1.0 - np.asarray(ndc_z, dtype=np.float64)) * 0.5
    return np.asarray(ndc_z, dtype=np.float64)


def ndc_z_from_depth(proj: Projection, depth):
    """Inverse of :func:`depth_from_ndc_z`."""
    if isinstance(proj, OrthographicProjection):
        return 1.0 - 2.0 * np.asarray(depth, dtype=np.float64)
    return np.asarray(depth, dtype=np.float64)
