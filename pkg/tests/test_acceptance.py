"""Acceptance criteria for the single-render stereo synthesis pipeline.

Each test covers one numbered criterion at its stated tolerance and prints a
[PASS] line (visible with ``pytest -s`` or in captured output). The heavier
criteria share one cached run of the 512x512 quality suite.

Run with: pytest tests/test_acceptance.py -v -s
"""

import math
import time

import numpy as np
import pytest

from stereosynth.camera import (
    CameraPose,
    PerspectiveProjection,
    Quaternion,
    StereoRig,
    eye_poses,
    min_object_distance,
    reprojection_matrix,
    view_projection,
)
from stereosynth.patch import PatchOptions, patch_with_stats
from stereosynth.pipeline import (
    QUALITY_SUITE,
    PipelineConfig,
    bench_complexity,
    run_pipeline,
    stream_size_estimate,
    suite_config,
)
from stereosynth.reproject import ReprojectOptions, ShiftBuffer, stage1_reproject, stage2_scan

from oracles import patch_reference, splat_scan_reference

SUITE_NAMES = [entry[0] for entry in QUALITY_SUITE]


def _run_suite(**overrides):
    results = {}
    for name in SUITE_NAMES:
        cfg = suite_config(name, **overrides)
        t0 = time.perf_counter()
        results[name] = run_pipeline(cfg, write_artifacts=False)
        results[name].total_s = time.perf_counter() - t0
    return results


@pytest.fixture(scope="module")
def suite_k1():
    return _run_suite()


def test_criterion_01_quality_thresholds(suite_k1):
    ssims = [r.report.ssim for r in suite_k1.values()]
    psnrs = [r.report.psnr_db for r in suite_k1.values()]
    for name, r in suite_k1.items():
        print(f"  scene {name}: ssim={r.report.ssim:.4f} psnr={r.report.psnr_db:.2f} "
              f"disocc={r.report.disocclusion_fraction:.4f} total={r.total_s:.2f}s")
        assert r.total_s < 10.0, f"{name} exceeded the 10 s per-scene budget"
    mean_ssim = float(np.mean(ssims))
    mean_psnr = float(np.mean(psnrs))
    assert mean_ssim >= 0.95, f"mean SSIM {mean_ssim:.4f} < 0.95"
    assert mean_psnr >= 20.0, f"mean PSNR {mean_psnr:.2f} < 20"
    print(f"[PASS] criterion 1: mean SSIM {mean_ssim:.4f} >= 0.95, "
          f"mean PSNR {mean_psnr:.2f} dB >= 20, every scene < 10 s")


def test_criterion_02_identity_exactness():
    cfg = suite_config("step", rig=StereoRig(ipd=0.0, dominant="right"),
                       patch_opts=PatchOptions(linear_interp=False))
    result = run_pipeline(cfg, write_artifacts=False)
    assert np.array_equal(result.synthesized, result.gt_other.color), \
        "zero-baseline synthesis must be bit-identical to ground truth"

    vp = view_projection(CameraPose((0.3, -0.2, 0.5), Quaternion.from_axis_angle((0, 1, 0), 0.4)),
                         PerspectiveProjection())
    m = reprojection_matrix(vp, vp)
    dev = np.abs(m - np.eye(4)).max()
    assert dev <= 1e-6, f"self-reprojection deviates from identity by {dev:.2e}"
    print(f"[PASS] criterion 2: ipd=0 output bit-identical; "
          f"self-reprojection within {dev:.2e} of identity (<= 1e-6)")


def test_criterion_03_complexity():
    counts = [10_000, 50_000, 100_000, 200_000]
    cfg = PipelineConfig(scene_preset="random-triangles", seed=2, width=512, height=512)
    rows = bench_complexity(counts, cfg)
    for row in rows:
        assert row["yoro_triangle_ops"] == row["triangles"]
        assert row["conventional_triangle_ops"] == 2 * row["triangles"]
        print(f"  N={row['triangles']}: conv={row['conventional_wall_s']:.2f}s "
              f"yoro={row['yoro_wall_s']:.2f}s ratio={row['wall_ratio']:.3f}")
    assert len({row["yoro_pixel_ops"] for row in rows}) == 1, "pixel ops must not depend on N"
    final_ratio = rows[-1]["wall_ratio"]
    assert final_ratio <= 0.65, f"ratio at N=200k is {final_ratio:.3f} > 0.65"
    assert final_ratio < rows[0]["wall_ratio"], "ratio must trend downward with N"
    print(f"[PASS] criterion 3: triangle ops N vs 2N exact, pixel ops constant, "
          f"wall ratio {final_ratio:.3f} <= 0.65 and decreasing")


def test_criterion_04_one_sided_displacement():
    rng = np.random.default_rng(1234)
    proj = PerspectiveProjection()
    worst = 0.0
    for case in range(1000):
        ipd = rng.uniform(0.05, 0.075)
        dominant = "right" if case % 2 == 0 else "left"
        head = CameraPose(
            tuple(rng.uniform(-2, 2, size=3)),
            Quaternion.from_axis_angle(rng.normal(size=3), rng.uniform(-0.8, 0.8)),
        )
        rig = StereoRig(ipd=ipd, dominant=dominant)
        left, right = eye_poses(rig, head)
        dom, other = (right, left) if dominant == "right" else (left, right)
        m = reprojection_matrix(view_projection(dom, proj), view_projection(other, proj))
        depth = rng.uniform(0.0, 1.0, size=(12, 24))
        sb = stage1_reproject(depth, m, ReprojectOptions(direction=(dominant, rig.other)))
        u = (np.arange(24) + 0.5) / 24
        disp = sb.target_u - u[None, :]
        signed = disp if dominant == "right" else -disp
        worst = min(worst, float(signed.min()))
        assert signed.min() >= -1e-6, f"case {case}: displacement crossed zero by {signed.min():.2e}"
    print(f"[PASS] criterion 4: 1000 random rigs, zero pixels displaced against "
          f"the expected direction (worst signed margin {worst:.2e} >= -1e-6)")


def test_criterion_05_scan_oracle_equivalence():
    rng = np.random.default_rng(99)
    for case in range(200):
        h = int(rng.integers(1, 65))
        w = int(rng.integers(1, 65))
        tu = rng.uniform(-0.2, 1.2, size=(h, w))
        d = rng.uniform(-0.2, 1.2, size=(h, w))
        if case % 3 == 0 and w >= 4:  # inject exact collisions and ties
            tu[:, 2] = tu[:, 1]
            d[:, 2] = d[:, 1]
        if case % 5 == 0:
            tu.flat[:: max(h * w // 5, 1)] = np.nan
        shift = ShiftBuffer(tu, d)
        got = stage2_scan(shift)
        want = splat_scan_reference(shift)
        assert np.array_equal(got.data, want), f"case {case}: scan differs from splat reference"
    print("[PASS] criterion 5: 200 random shift buffers match the forward-splat "
          "+ max-depth + gap-diff reference field-for-field")


def test_criterion_06_patch_oracle_and_background_only():
    rng = np.random.default_rng(7)
    total_samples = 0
    for case in range(100):
        h = int(rng.integers(6, 24))
        w = int(rng.integers(8, 32))
        color = rng.integers(0, 256, size=(h, w, 3)).astype(np.float32)
        tu = rng.uniform(0, 1.05, size=(h, w))
        d = rng.uniform(0.05, 1.0, size=(h, w))
        imb = stage2_scan(ShiftBuffer(tu, d))
        opts = PatchOptions(kernel_height=int(rng.choice([1, 3, 5])),
                            linear_interp=bool(rng.integers(0, 2)))
        got, _ = patch_with_stats(color, imb, opts, quantize=False)
        want, stream = patch_reference(color, imb, opts)
        err = np.abs(got - want).max()
        assert err <= 1e-6, f"case {case}: patch differs from reference by {err:.2e}"
        assert all(depth <= edge for depth, edge in stream), \
            f"case {case}: a foreground sample contributed"
        total_samples += len(stream)
    print(f"[PASS] criterion 6: 100 random cases match the sequential reference "
          f"within 1e-6/channel; {total_samples} contributing samples, zero foreground")


def test_criterion_07_ipd_robustness():
    means = {}
    for ipd in (0.050, 0.0575, 0.065, 0.075):
        results = _run_suite(rig=StereoRig(ipd=ipd, dominant="right"))
        means[ipd] = float(np.mean([r.report.ssim for r in results.values()]))
        print(f"  ipd={ipd * 100:.2f} cm: mean ssim={means[ipd]:.4f}")
        assert means[ipd] >= 0.95, f"mean SSIM {means[ipd]:.4f} < 0.95 at ipd {ipd}"
    print(f"[PASS] criterion 7: mean SSIM stays >= 0.95 across the ipd sweep "
          f"(min {min(means.values()):.4f})")


def test_criterion_08_distance_robustness():
    ssims = {}
    for dist in (0.5, 1.0, 2.0, 3.0):
        cfg = suite_config("near-object")
        cfg.scene_params = {"distance": dist}
        result = run_pipeline(cfg, write_artifacts=False)
        ssims[dist] = result.report.ssim
        print(f"  distance {dist} m: ssim={ssims[dist]:.4f}")
    for dist in (1.0, 2.0, 3.0):
        assert ssims[dist] >= 0.95, f"SSIM {ssims[dist]:.4f} < 0.95 at {dist} m"
    print(f"[PASS] criterion 8: SSIM >= 0.95 at 1-3 m; 0.5 m reported "
          f"unasserted at {ssims[0.5]:.4f}")


def test_criterion_09_patcher_beats_median_baseline(suite_k1):
    yoro = [suite_k1[name].report.ssim for name in ("step", "boxes")]
    median = []
    for name in ("step", "boxes"):
        cfg = suite_config(name, patcher="median")
        median.append(run_pipeline(cfg, write_artifacts=False).report.ssim)
    mean_yoro = float(np.mean(yoro))
    mean_median = float(np.mean(median))
    print(f"  kernel patcher ssim={mean_yoro:.4f}, median baseline ssim={mean_median:.4f}")
    assert mean_yoro >= mean_median, \
        f"kernel patcher {mean_yoro:.4f} fell below the median baseline {mean_median:.4f}"
    print(f"[PASS] criterion 9: weighted kernel {mean_yoro:.4f} >= median {mean_median:.4f} "
          f"on the disocclusion-heavy subset")


def test_criterion_10_downsampling(suite_k1):
    base_ssim = float(np.mean([r.report.ssim for r in suite_k1.values()]))
    base_s1 = suite_k1["step"].report.counters["stage1_pixels"]
    base_s2 = suite_k1["step"].report.counters["stage2_pixels"]
    for k in (2, 4):
        results = _run_suite(downsample=k)
        mean_k = float(np.mean([r.report.ssim for r in results.values()]))
        print(f"  k={k}: mean ssim={mean_k:.4f} (k=1 baseline {base_ssim:.4f})")
        assert mean_k >= base_ssim - 0.03, \
            f"k={k} degraded mean SSIM by {base_ssim - mean_k:.4f} > 0.03"
        s1 = results["step"].report.counters["stage1_pixels"]
        s2 = results["step"].report.counters["stage2_pixels"]
        required = 0.9 * (1.0 - 1.0 / k**2)
        for label, got, base in (("stage1", s1, base_s1), ("stage2", s2, base_s2)):
            shrink = 1.0 - got / base
            assert shrink >= required, \
                f"k={k} {label} pixel count shrank {shrink:.3f} < {required:.3f}"
    print("[PASS] criterion 10: k in {2,4} stays within 0.03 mean SSIM of k=1 "
          "and stage counters shrink with 1/k^2")


def test_criterion_11_streaming_estimate():
    for w, h in ((100, 100), (512, 512), (1832, 1920)):
        est = stream_size_estimate(w, h, 8, 8)
        assert est["reduction"] == 1.0 / 3.0, f"reduction at {w}x{h} is not exactly 1/3"
    est16 = stream_size_estimate(512, 512, 8, 16)
    assert est16["reduction"] == pytest.approx(1.0 / 6.0)
    print("[PASS] criterion 11: stereo->color+depth stream reduction exactly 1/3 "
          "at equal bit depth (1/6 with 16-bit depth, reported honestly)")


def test_criterion_12_min_distance_formula():
    got = min_object_distance(0.075, 60.0)
    assert math.isclose(got, 0.06495, abs_tol=1e-4), f"formula value {got:.5f} != 0.06495"
    alt = 0.075 / math.tan(math.radians(30.0))  # full-baseline reading
    print(f"  half-baseline form: {got:.5f} m; full-baseline reading would give {alt:.5f} m")
    print(f"[PASS] criterion 12: min distance formula evaluates to {got:.5f} m "
          f"(0.06495 +/- 1e-4); the {alt:.4f} m alternative reading is documented, not asserted")
