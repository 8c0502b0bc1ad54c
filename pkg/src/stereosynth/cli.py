"""Command-line driver.

Every experiment is described by a JSON config (see PipelineConfig); flags
only override scalar fields of it. Exit codes: 0 on success, 2 on
configuration errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import imgio
from .camera import eye_poses, reprojection_matrix, view_projection
from .metrics import disocclusion_fraction, error_map, psnr, ssim
from .pipeline import (
    ConfigError,
    PipelineConfig,
    bench_complexity,
    bench_csv,
    run_pipeline,
    stream_size_estimate,
)
from .raster import rasterize
from .reproject import ReprojectOptions, reproject
from .scenes import gen_scene, save_obj


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="JSON", help="pipeline config file")
    p.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    p.add_argument("--seed", type=int, help="scene seed (overrides config)")
    p.add_argument("--downsample", type=int, choices=(1, 2, 4, 8, 16),
                   help="intermediate buffer downsample factor")
    p.add_argument("--no-linear-interp", action="store_true",
                   help="disable linear interpolation when sampling")
    p.add_argument("--patcher", choices=("yoro", "median"), help="disocclusion patcher")


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = PipelineConfig.from_json_file(args.config)
    else:
        cfg = PipelineConfig()
    raw = cfg.to_json_dict()
    if getattr(args, "out", None) is not None:
        raw["output_dir"] = args.out
    if getattr(args, "seed", None) is not None:
        raw["scene"]["seed"] = args.seed
    if getattr(args, "downsample", None) is not None:
        raw["downsample"] = args.downsample
    if getattr(args, "no_linear_interp", False):
        raw["patch"]["linear_interp"] = False
    if getattr(args, "patcher", None) is not None:
        raw["patch"]["patcher"] = args.patcher
    return PipelineConfig.from_json_dict(raw)


def _require_out(cfg: PipelineConfig) -> Path:
    if not cfg.output_dir:
        raise ConfigError("output_dir: required (set in config or pass --out)")
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _cmd_gen_scene(args) -> int:
    cfg = _load_config(args)
    if args.preset:
        cfg.scene_preset = args.preset
    if args.params:
        try:
            cfg.scene_params = json.loads(args.params)
        except json.JSONDecodeError as e:
            raise ConfigError(f"--params is not valid JSON: {e}") from None
    out = _require_out(cfg)
    scene = gen_scene(cfg.scene_preset, cfg.scene_params, cfg.seed)
    for i, mesh in enumerate(scene.meshes):
        save_obj(out / f"mesh_{i:02d}.obj", mesh)
    info = {
        "preset": cfg.scene_preset,
        "params": cfg.scene_params,
        "seed": cfg.seed,
        "meshes": len(scene.meshes),
        "triangles": scene.triangle_count(),
        "background": list(scene.background),
    }
    (out / "scene.json").write_text(json.dumps(info, indent=2) + "\n", encoding="utf-8")
    print(json.dumps(info))
    return 0


def _cmd_render(args) -> int:
    cfg = _load_config(args)
    out = _require_out(cfg)
    scene = gen_scene(cfg.scene_preset, cfg.scene_params, cfg.seed)
    left, right = eye_poses(cfg.rig, cfg.head)
    for name, pose in (("left", left), ("right", right)):
        frame = rasterize(scene, pose, cfg.projection, cfg.width, cfg.height)
        imgio.write_png_color(out / f"{name}_color.png", frame.color)
        imgio.write_pfm(out / f"{name}_depth.pfm", frame.depth)
    print(f"wrote left/right color+depth to {out}")
    return 0


def _cmd_reproject(args) -> int:
    cfg = _load_config(args)
    out = _require_out(cfg)
    scene = gen_scene(cfg.scene_preset, cfg.scene_params, cfg.seed)
    left, right = eye_poses(cfg.rig, cfg.head)
    dom, other = (right, left) if cfg.rig.dominant == "right" else (left, right)
    frame = rasterize(scene, dom, cfg.projection, cfg.width, cfg.height)
    m = reprojection_matrix(view_projection(dom, cfg.projection), view_projection(other, cfg.projection))
    imb = reproject(frame.depth, m, ReprojectOptions(cfg.downsample, (cfg.rig.dominant, cfg.rig.other)))
    imgio.write_pfm(out / "source_buffer.pfm", imb.data)
    summary = {
        "source_buffer": str(out / "source_buffer.pfm"),
        "disocclusion_fraction": disocclusion_fraction(imb),
    }
    print(json.dumps(summary))
    return 0


def _cmd_patch(args) -> int:
    cfg = _load_config(args)
    out = _require_out(cfg)
    result = run_pipeline(cfg, write_artifacts=False)
    imgio.write_png_color(out / "synthesized.png", result.synthesized)
    print(json.dumps({"synthesized": str(out / "synthesized.png"), "ssim": result.report.ssim}))
    return 0


def _cmd_pipeline(args) -> int:
    cfg = _load_config(args)
    _require_out(cfg)
    result = run_pipeline(cfg, write_artifacts=True)
    print(json.dumps(result.report.to_json_dict(), indent=2))
    return 0


def _cmd_metrics(args) -> int:
    a = imgio.read_png_color(args.image_a)
    b = imgio.read_png_color(args.image_b)
    s = ssim(a, b)
    p = psnr(a, b)
    payload = {"ssim": s, "psnr_db": None if p == float("inf") else p, "psnr_identical": p == float("inf")}
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        imgio.write_png_gray16(out / "error_map16.png", error_map(a, b))
    print(json.dumps(payload))
    return 0


def _cmd_bench(args) -> int:
    cfg = _load_config(args)
    try:
        counts = [int(tok) for tok in args.counts.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError(f"--counts must be comma-separated integers, got {args.counts!r}") from None
    if not counts:
        raise ConfigError("--counts must name at least one triangle count")
    rows = bench_complexity(counts, cfg)
    csv_text = bench_csv(rows)
    if cfg.output_dir:
        out = _require_out(cfg)
        (out / "bench.csv").write_text(csv_text, encoding="utf-8")
    sys.stdout.write(csv_text)
    return 0


def _cmd_stream_size(args) -> int:
    cfg = _load_config(args)
    width = args.width or cfg.width
    height = args.height or cfg.height
    rows = [
        stream_size_estimate(width, height, args.color_bits, args.color_bits),
        stream_size_estimate(width, height, args.color_bits, args.depth_bits),
    ]
    print(json.dumps(rows, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereosynth",
        description="Single-render stereo synthesis pipeline and its oracles",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-scene", help="materialize a scene preset as OBJ + stats")
    _add_common(p)
    p.add_argument("--preset", help="scene preset name")
    p.add_argument("--params", help="preset parameters as a JSON object")
    p.set_defaults(fn=_cmd_gen_scene)

    p = sub.add_parser("render", help="rasterize ground-truth frames for both eyes")
    _add_common(p)
    p.set_defaults(fn=_cmd_render)

    p = sub.add_parser("reproject", help="dump the reprojected source buffer")
    _add_common(p)
    p.set_defaults(fn=_cmd_reproject)

    p = sub.add_parser("patch", help="synthesize the non-dominant eye image")
    _add_common(p)
    p.set_defaults(fn=_cmd_patch)

    p = sub.add_parser("pipeline", help="full run: render once, synthesize, score")
    _add_common(p)
    p.set_defaults(fn=_cmd_pipeline)

    p = sub.add_parser("metrics", help="SSIM/PSNR between two PNG images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--out", metavar="DIR", help="also write metrics.json and an error map")
    p.set_defaults(fn=_cmd_metrics)

    p = sub.add_parser("bench", help="complexity benchmark over triangle counts")
    _add_common(p)
    p.add_argument("--counts", required=True, help="comma-separated triangle counts, ascending")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("stream-size", help="streaming payload estimate")
    _add_common(p)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--color-bits", type=int, default=8)
    p.add_argument("--depth-bits", type=int, default=16)
    p.set_defaults(fn=_cmd_stream_size)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # pragma: no cover - defensive
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
