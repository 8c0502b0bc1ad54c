"""End-to-end driver: render once, reproject, patch, score, account.

The JSON config is the source of truth for an experiment; CLI flags only
override scalar fields. A pipeline run renders the dominant eye, carries it
into the other eye via the reprojection matrix, patches disocclusions, then
renders the other eye conventionally once more *only* to score the synthesis
- that ground-truth render never enters the cost counters or the timed
section.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import imgio
from .camera import (
    CameraPose,
    OrthographicProjection,
    PerspectiveProjection,
    Projection,
    Quaternion,
    StereoRig,
    eye_poses,
    reprojection_matrix,
    view_projection,
)
from .counters import OpCounters
from .metrics import MetricsReport, disocclusion_fraction, error_map, psnr, ssim
from .patch import PatchOptions, median_patch, patch
from .raster import Frame, rasterize, render_stereo_gt
from .reproject import ReprojectOptions, reproject
from .scenes import Scene, gen_scene

__all__ = [
    "ConfigError",
    "PipelineConfig",
    "PipelineResult",
    "run_pipeline",
    "bench_complexity",
    "stream_size_estimate",
    "QUALITY_SUITE",
    "suite_config",
]

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid pipeline configuration; message names the offending field."""


@dataclass
class PipelineConfig:
    scene_preset: str = "step"
    scene_params: dict = field(default_factory=dict)
    seed: int = 0
    rig: StereoRig = field(default_factory=StereoRig)
    head: CameraPose = field(default_factory=CameraPose)
    projection: Projection = field(default_factory=PerspectiveProjection)
    width: int = 512
    height: int = 512
    downsample: int = 1
    patch_opts: PatchOptions = field(default_factory=PatchOptions)
    patcher: str = "yoro"
    median_window: int = 5
    output_dir: str | None = None

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ConfigError("resolution: width and height must be >= 1")
        if self.patcher not in ("yoro", "median"):
            raise ConfigError(f"patch.patcher: expected 'yoro' or 'median', got {self.patcher!r}")

    # -- JSON round trip ------------------------------------------------------

    @classmethod
    def from_json_dict(cls, raw: dict) -> "PipelineConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"schema_version: expected {SCHEMA_VERSION}, got {version}")

        scene = raw.get("scene", {})
        rig_d = raw.get("rig", {})
        head_d = raw.get("head", {})
        proj_d = raw.get("projection", {})
        res = raw.get("resolution", [512, 512])
        patch_d = raw.get("patch", {})

        try:
            rig = StereoRig(
                ipd=float(rig_d.get("ipd", 0.063)),
                dominant=rig_d.get("dominant", "right"),
            )
        except ValueError as e:
            raise ConfigError(f"rig: {e}") from None

        try:
            rot = head_d.get("rotation", [1.0, 0.0, 0.0, 0.0])
            head = CameraPose(
                position=tuple(head_d.get("position", [0.0, 0.0, 0.0])),
                rotation=Quaternion(*[float(c) for c in rot]).normalized(),
            )
        except (ValueError, TypeError) as e:
            raise ConfigError(f"head: {e}") from None

        try:
            proj = _projection_from_dict(proj_d)
        except ValueError as e:
            raise ConfigError(f"projection: {e}") from None

        if not (isinstance(res, (list, tuple)) and len(res) == 2):
            raise ConfigError("resolution: expected [width, height]")

        try:
            popts = PatchOptions(
                kernel_height=int(patch_d.get("kernel_height", 3)),
                linear_interp=bool(patch_d.get("linear_interp", True)),
            )
        except ValueError as e:
            raise ConfigError(f"patch: {e}") from None

        try:
            cfg = cls(
                scene_preset=scene.get("preset", "step"),
                scene_params=dict(scene.get("params", {})),
                seed=int(scene.get("seed", 0)),
                rig=rig,
                head=head,
                projection=proj,
                width=int(res[0]),
                height=int(res[1]),
                downsample=int(raw.get("downsample", 1)),
                patch_opts=popts,
                patcher=patch_d.get("patcher", "yoro"),
                median_window=int(patch_d.get("median_window", 5)),
                output_dir=raw.get("output_dir"),
            )
        except ValueError as e:
            raise ConfigError(str(e)) from None
        try:
            ReprojectOptions(downsample=cfg.downsample)
        except ValueError as e:
            raise ConfigError(f"downsample: {e}") from None
        return cfg

    @classmethod
    def from_json_file(cls, path) -> "PipelineConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
        return cls.from_json_dict(raw)

    def to_json_dict(self) -> dict:
        q = self.head.rotation
        return {
            "schema_version": SCHEMA_VERSION,
            "scene": {"preset": self.scene_preset, "params": self.scene_params, "seed": self.seed},
            "rig": {"ipd": self.rig.ipd, "dominant": self.rig.dominant},
            "head": {"position": list(self.head.position), "rotation": [q.s, q.x, q.y, q.z]},
            "projection": _projection_to_dict(self.projection),
            "resolution": [self.width, self.height],
            "downsample": self.downsample,
            "patch": {
                "kernel_height": self.patch_opts.kernel_height,
                "linear_interp": self.patch_opts.linear_interp,
                "patcher": self.patcher,
                "median_window": self.median_window,
            },
            "output_dir": self.output_dir,
        }


def _projection_from_dict(d: dict) -> Projection:
    kind = d.get("type", "perspective")
    if kind == "perspective":
        return PerspectiveProjection(
            fov_y=float(d.get("fov_y", 60.0)),
            aspect=float(d.get("aspect", 1.0)),
            near=float(d.get("near", 0.3)),
            far=float(d.get("far", 1000.0)),
        )
    if kind == "orthographic":
        return OrthographicProjection(
            aspect=float(d.get("aspect", 1.0)),
            size=float(d.get("size", 1.0)),
            near=float(d.get("near", 0.3)),
            far=float(d.get("far", 1000.0)),
        )
    raise ValueError(f"type: expected 'perspective' or 'orthographic', got {kind!r}")


def _projection_to_dict(p: Projection) -> dict:
    if isinstance(p, PerspectiveProjection):
        return {"type": "perspective", "fov_y": p.fov_y, "aspect": p.aspect, "near": p.near, "far": p.far}
    return {"type": "orthographic", "aspect": p.aspect, "size": p.size, "near": p.near, "far": p.far}


@dataclass
class PipelineResult:
    report: MetricsReport
    synthesized: np.ndarray
    gt_other: Frame
    dominant: Frame
    artifacts: dict


def _synthesize(cfg: PipelineConfig, scene: Scene, counters: OpCounters):
    """Timed single-render synthesis.

    Returns (dominant frame, other-eye pose, source buffer, synthesized
    image, elapsed seconds).
    """
    left, right = eye_poses(cfg.rig, cfg.head)
    dom_pose, other_pose = (right, left) if cfg.rig.dominant == "right" else (left, right)

    t0 = time.perf_counter()
    dom_frame = rasterize(scene, dom_pose, cfg.projection, cfg.width, cfg.height, counters)
    m = reprojection_matrix(
        view_projection(dom_pose, cfg.projection),
        view_projection(other_pose, cfg.projection),
    )
    opts = ReprojectOptions(downsample=cfg.downsample, direction=(cfg.rig.dominant, cfg.rig.other))
    imb = reproject(dom_frame.depth, m, opts, counters)
    if cfg.patcher == "median":
        synth = median_patch(dom_frame.color, imb, cfg.median_window, cfg.patch_opts, counters)
    else:
        synth = patch(dom_frame.color, imb, cfg.patch_opts, counters)
    elapsed = time.perf_counter() - t0
    return dom_frame, other_pose, imb, synth, elapsed


def run_pipeline(cfg: PipelineConfig, write_artifacts: bool = True) -> PipelineResult:
    """Full run: synthesize the other eye, score against its ground truth."""
    scene = gen_scene(cfg.scene_preset, cfg.scene_params, cfg.seed)
    counters = OpCounters()
    dom_frame, other_pose, imb, synth, elapsed = _synthesize(cfg, scene, counters)

    # scoring render only; deliberately not counted or timed
    gt = rasterize(scene, other_pose, cfg.projection, cfg.width, cfg.height, counters=None)

    report = MetricsReport(
        ssim=ssim(synth, gt.color),
        psnr_db=psnr(synth, gt.color),
        disocclusion_fraction=disocclusion_fraction(imb),
        triangle_ops=counters.triangle_ops,
        pixel_ops=counters.pixel_ops,
        wall_time_s=elapsed,
        counters=counters.as_dict(),
    )

    artifacts: dict = {}
    if write_artifacts and cfg.output_dir is not None:
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        emap = error_map(synth, gt.color)
        writes = {
            "dominant_color": (out / "dominant_color.png", lambda p: imgio.write_png_color(p, dom_frame.color)),
            "dominant_depth": (out / "dominant_depth.pfm", lambda p: imgio.write_pfm(p, dom_frame.depth)),
            "dominant_depth_png": (out / "dominant_depth16.png", lambda p: imgio.write_png_gray16(p, dom_frame.depth)),
            "synthesized": (out / "synthesized.png", lambda p: imgio.write_png_color(p, synth)),
            "gt": (out / "gt.png", lambda p: imgio.write_png_color(p, gt.color)),
            "error_map": (out / "error_map16.png", lambda p: imgio.write_png_gray16(p, emap)),
            "source_buffer": (out / "source_buffer.pfm", lambda p: imgio.write_pfm(p, imb.data)),
        }
        for key, (path, writer) in writes.items():
            writer(path)
            artifacts[key] = str(path)
        report_path = out / "report.json"
        payload = report.to_json_dict()
        payload["config"] = cfg.to_json_dict()
        report_path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        artifacts["report"] = str(report_path)

    return PipelineResult(report=report, synthesized=synth, gt_other=gt, dominant=dom_frame, artifacts=artifacts)


def bench_complexity(triangle_counts, cfg: PipelineConfig) -> list[dict]:
    """Compare conventional two-render cost against single-render synthesis.

    Conventional renders both eyes (2N triangle ops); the synthesis path
    renders once and pays a resolution-dependent constant on top. Returns one
    row per triangle count.
    """
    counts = [int(n) for n in triangle_counts]
    if counts != sorted(counts):
        raise ValueError("triangle counts must be ascending")

    # untimed warmup so first-call allocation costs don't skew the smallest N
    warm = gen_scene("random-triangles", {**cfg.scene_params, "count": 64}, cfg.seed)
    render_stereo_gt(warm, cfg.rig, cfg.head, cfg.projection, cfg.width, cfg.height)
    _synthesize(cfg, warm, OpCounters())

    rows = []
    for n in counts:
        scene = gen_scene("random-triangles", {**cfg.scene_params, "count": n}, cfg.seed)

        conv = OpCounters()
        t0 = time.perf_counter()
        render_stereo_gt(scene, cfg.rig, cfg.head, cfg.projection, cfg.width, cfg.height, conv)
        conv_s = time.perf_counter() - t0

        yoro = OpCounters()
        _, _, _, _, yoro_s = _synthesize(cfg, scene, yoro)

        rows.append(
            {
                "triangles": n,
                "conventional_triangle_ops": conv.triangle_ops,
                "yoro_triangle_ops": yoro.triangle_ops,
                "yoro_pixel_ops": yoro.pixel_ops,
                "yoro_stage1_pixels": yoro.stage1_pixels,
                "yoro_stage2_pixels": yoro.stage2_pixels,
                "conventional_wall_s": conv_s,
                "yoro_wall_s": yoro_s,
                "wall_ratio": yoro_s / conv_s if conv_s > 0 else float("nan"),
            }
        )
    return rows


def bench_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(_csv_cell(r[c]) for c in cols))
    return "\n".join(lines) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def stream_size_estimate(width: int, height: int, color_bits: int = 8, depth_bits: int | None = None) -> dict:
    """Raw per-frame bytes: 6-channel stereo color vs color + depth channel.

    At equal bit depth the single-render stream drops exactly one third of
    the data (4 channels instead of 6); a wider depth channel is reported
    honestly (e.g. 16-bit depth over 8-bit color saves only 1/6).
    """
    if width < 1 or height < 1:
        raise ValueError("resolution must be >= 1x1")
    if depth_bits is None:
        depth_bits = color_bits
    pixels = width * height

    def as_bytes(total_bits: int):
        return total_bits // 8 if total_bits % 8 == 0 else total_bits / 8

    stereo_bytes = as_bytes(pixels * 6 * color_bits)
    mono_bytes = as_bytes(pixels * (3 * color_bits + depth_bits))
    return {
        "width": width,
        "height": height,
        "color_bits": color_bits,
        "depth_bits": depth_bits,
        "stereo_rgb_bytes": stereo_bytes,
        "rgb_depth_bytes": mono_bytes,
        "reduction": (stereo_bytes - mono_bytes) / stereo_bytes,
    }


# Scene suite used for quality evaluation: varied content, everything at
# least one meter away so the synthesis operates in its comfort zone.
QUALITY_SUITE = (
    ("plane-gradient", "plane", {"distance": 2.0, "pattern": "gradient"}, 11),
    ("plane-stripes", "plane", {"distance": 1.5, "pattern": "stripes"}, 12),
    ("step", "step", {"fg_distance": 1.2, "bg_distance": 6.0}, 13),
    ("boxes", "boxes", {"count": 6, "min_distance": 1.5}, 14),
    ("near-object", "near-object", {"distance": 2.0}, 15),
    ("triangle-field", "random-triangles",
     {"count": 400, "z_range": (1.5, 6.0), "backdrop": True}, 16),
)


def suite_config(name: str, **overrides) -> PipelineConfig:
    """Config for one named suite scene (512x512, ipd 0.063, perspective)."""
    for entry, preset, params, seed in QUALITY_SUITE:
        if entry == name:
            base = {
                "scene_preset": preset,
                "scene_params": dict(params),
                "seed": seed,
                "rig": StereoRig(ipd=0.063, dominant="right"),
                "width": 512,
                "height": 512,
            }
            base.update(overrides)
            return PipelineConfig(**base)
    raise ValueError(f"unknown suite scene {name!r}; have {[e[0] for e in QUALITY_SUITE]}")
