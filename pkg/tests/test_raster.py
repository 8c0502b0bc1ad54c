import math

import numpy as np
import pytest

from stereosynth.camera import (
    CameraPose,
    PerspectiveProjection,
    StereoRig,
    view_projection,
)
from stereosynth.counters import OpCounters
from stereosynth.raster import rasterize, render_stereo_gt
from stereosynth.scenes import Scene, TriangleMesh, gen_scene


def full_screen_quad(z, color=(200.0, 100.0, 50.0), half=50.0):
    verts = np.array(
        [[-half, -half, z], [half, -half, z], [half, half, z], [-half, half, z]]
    )
    tris = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
    colors = np.broadcast_to(np.asarray(color, dtype=np.float32), (4, 3)).copy()
    return TriangleMesh(verts, tris, colors)


class TestRasterize:
    def test_scene_behind_camera_renders_background(self):
        scene = Scene([full_screen_quad(z=-5.0)], background=(7.0, 8.0, 9.0))
        frame = rasterize(scene, CameraPose(), PerspectiveProjection(), 32, 32)
        assert np.all(frame.depth == 0.0)
        assert np.all(frame.color == np.array([7, 8, 9], dtype=np.float32))

    def test_quad_at_near_plane_has_depth_one(self):
        proj = PerspectiveProjection(near=0.5, far=100.0)
        scene = Scene([full_screen_quad(z=0.5)])
        frame = rasterize(scene, CameraPose(), proj, 16, 16)
        assert np.allclose(frame.depth, 1.0, atol=1e-12)

    def test_counter_is_triangle_count_per_call(self):
        scene = gen_scene("boxes", {"count": 4, "min_distance": 1.5}, seed=1)
        counters = OpCounters()
        rasterize(scene, CameraPose(), PerspectiveProjection(), 16, 16, counters)
        assert counters.triangle_ops == scene.triangle_count()
        rasterize(scene, CameraPose(), PerspectiveProjection(), 16, 16, counters)
        assert counters.triangle_ops == 2 * scene.triangle_count()

    def test_deterministic(self):
        scene = gen_scene("boxes", {"count": 5, "min_distance": 1.0}, seed=3)
        a = rasterize(scene, CameraPose(), PerspectiveProjection(), 48, 48)
        b = rasterize(scene, CameraPose(), PerspectiveProjection(), 48, 48)
        assert np.array_equal(a.color, b.color)
        assert np.array_equal(a.depth, b.depth)

    def test_projected_corner_matches_view_projection(self):
        # a small quad corner must land on the pixel the matrix maps it to
        proj = PerspectiveProjection()
        pose = CameraPose()
        corner = np.array([0.31, 0.17, 2.0])
        size = 0.6
        verts = np.array(
            [corner, corner + [-size, 0, 0], corner + [-size, -size, 0], corner + [0, -size, 0]]
        )
        tris = np.array([[0, 1, 2], [0, 2, 3]], dtype=np.int32)
        colors = np.full((4, 3), 250.0, dtype=np.float32)
        scene = Scene([TriangleMesh(verts, tris, colors)], background=(0, 0, 0))
        w = h = 128
        frame = rasterize(scene, pose, proj, w, h)

        clip = view_projection(pose, proj) @ np.append(corner, 1.0)
        ndc = clip[:3] / clip[3]
        px = (ndc[0] + 1.0) * 0.5 * w
        py = (ndc[1] + 1.0) * 0.5 * h
        ys, xs = np.nonzero(frame.depth > 0)
        # corner = top-right extreme of the drawn quad: the last lit pixel
        # center must sit within one pixel inside the predicted corner and
        # never beyond it
        assert px - 1.0 <= xs.max() + 0.5 <= px + 1e-9
        assert py - 1.0 <= ys.max() + 0.5 <= py + 1e-9

    def test_zbuffer_keeps_closest_brute_force(self):
        rng = np.random.default_rng(11)
        scene = gen_scene("random-triangles", {"count": 60, "z_range": (1.0, 4.0)}, seed=11)
        proj = PerspectiveProjection()
        pose = CameraPose()
        w = h = 32
        frame = rasterize(scene, pose, proj, w, h)
        vp = view_projection(pose, proj)

        best = np.zeros((h, w))
        mesh = scene.meshes[0]
        for tri in mesh.triangles:
            pts = mesh.vertices[tri]
            clip = (vp @ np.c_[pts, np.ones(3)].T).T
            if np.any(clip[:, 3] <= 0):
                continue
            ndc = clip[:, :3] / clip[:, 3:4]
            sx = (ndc[:, 0] + 1) * 0.5 * w
            sy = (ndc[:, 1] + 1) * 0.5 * h
            area = (sx[1] - sx[0]) * (sy[2] - sy[0]) - (sy[1] - sy[0]) * (sx[2] - sx[0])
            if area == 0:
                continue
            for iy in range(h):
                for ix in range(w):
                    px, py = ix + 0.5, iy + 0.5
                    w0 = (sx[2] - sx[1]) * (py - sy[1]) - (sy[2] - sy[1]) * (px - sx[1])
                    w1 = (sx[0] - sx[2]) * (py - sy[2]) - (sy[0] - sy[2]) * (px - sx[2])
                    w2 = (sx[1] - sx[0]) * (py - sy[0]) - (sy[1] - sy[0]) * (px - sx[0])
                    lam = np.array([w0, w1, w2]) / area
                    if np.any(lam < 0) or np.any(lam > 1):
                        continue
                    d = float(lam @ ndc[:, 2])
                    if 0 <= d <= 1:
                        best[iy, ix] = max(best[iy, ix], d)
        # strict interior winners must agree; boundary pixels differ only by
        # the fill convention, so compare where the oracle is unambiguous
        inside = best > 0
        assert np.all(frame.depth[inside] >= best[inside] - 1e-9)
        agree = np.isclose(frame.depth, best, atol=1e-9)
        assert agree[inside].mean() > 0.97

    def test_double_sided_winding(self):
        mesh = full_screen_quad(z=2.0)
        flipped = TriangleMesh(mesh.vertices, mesh.triangles[:, ::-1], mesh.colors)
        a = rasterize(Scene([mesh]), CameraPose(), PerspectiveProjection(), 24, 24)
        b = rasterize(Scene([flipped]), CameraPose(), PerspectiveProjection(), 24, 24)
        assert np.array_equal(a.depth > 0, b.depth > 0)
        assert np.allclose(a.depth, b.depth, atol=1e-12)

    def test_shared_edges_paint_once(self):
        # two triangles of a quad: every covered pixel belongs to exactly one
        mesh = full_screen_quad(z=2.0, half=1.0)
        one = TriangleMesh(mesh.vertices, mesh.triangles[:1], mesh.colors)
        two = TriangleMesh(mesh.vertices, mesh.triangles[1:], mesh.colors)
        f1 = rasterize(Scene([one]), CameraPose(), PerspectiveProjection(), 64, 64)
        f2 = rasterize(Scene([two]), CameraPose(), PerspectiveProjection(), 64, 64)
        both = (f1.depth > 0) & (f2.depth > 0)
        assert not both.any()


class TestRenderStereoGT:
    def test_zero_ipd_frames_identical(self):
        scene = gen_scene("step", {}, seed=2)
        left, right = render_stereo_gt(
            scene, StereoRig(ipd=0.0), CameraPose(), PerspectiveProjection(), 32, 32
        )
        assert np.array_equal(left.color, right.color)
        assert np.array_equal(left.depth, right.depth)

    def test_counter_doubles(self):
        scene = gen_scene("plane", {"distance": 2.0}, seed=0)
        counters = OpCounters()
        render_stereo_gt(scene, StereoRig(), CameraPose(), PerspectiveProjection(), 16, 16, counters)
        assert counters.triangle_ops == 2 * scene.triangle_count()

    def test_plane_disparity_matches_analytic(self):
        proj = PerspectiveProjection()
        rig = StereoRig(ipd=0.06)
        scene = gen_scene("plane", {"distance": 1.0, "pattern": "stripes"}, seed=0)
        w = h = 128
        left, right = render_stereo_gt(scene, rig, CameraPose(), proj, w, h)
        g = 1.0 / math.tan(math.radians(proj.fov_y) / 2)
        expected_px = g * rig.ipd / 1.0 * 0.5 * w  # ndc disparity -> pixels
        # cross-correlate middle rows to estimate the shift
        row_l = left.color[h // 2, :, 0].astype(np.float64)
        row_r = right.color[h // 2, :, 0].astype(np.float64)
        shifts = np.arange(0, 16)
        scores = [np.mean((np.roll(row_r, s) - row_l)[16:-16] ** 2) for s in shifts]
        best = shifts[int(np.argmin(scores))]
        assert abs(best - expected_px) <= 1.0


class TestSceneGen:
    def test_random_triangles_deterministic(self):
        a = gen_scene("random-triangles", {"count": 100}, seed=7)
        b = gen_scene("random-triangles", {"count": 100}, seed=7)
        assert np.array_equal(a.meshes[0].vertices, b.meshes[0].vertices)
        assert a.triangle_count() == 100

    def test_boxes_honor_min_distance(self):
        d_min = 1.4
        scene = gen_scene("boxes", {"count": 8, "min_distance": d_min}, seed=9)
        left, right = (
            CameraPose((-0.04, 0, 0)),
            CameraPose((0.04, 0, 0)),
        )
        for mesh in scene.meshes[1:]:  # skip the backdrop
            for eye in (left, right):
                dist = np.linalg.norm(mesh.vertices - np.array(eye.position), axis=1)
                assert np.all(dist >= d_min)

    def test_near_object_centroid(self):
        scene = gen_scene("near-object", {"distance": 0.5}, seed=0)
        obj = scene.meshes[-1]
        centroid = obj.vertices.mean(axis=0)
        extent = np.linalg.norm(obj.vertices - centroid, axis=1).max()
        assert abs(centroid[2] - 0.5) <= extent

    def test_unknown_preset(self):
        with pytest.raises(ValueError, match="unknown scene preset"):
            gen_scene("nope", {}, 0)
