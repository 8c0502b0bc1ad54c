"""Single-render stereo synthesis.

Render one eye's color+depth, carry it into the other eye with a single
reprojection matrix, and fill the disocclusions that open up - plus the
software rasterizer, scene presets and quality metrics needed to verify the
whole thing against ground truth on the CPU.
"""

from .camera import (
    CameraPose,
    OrthographicProjection,
    PerspectiveProjection,
    Projection,
    Quaternion,
    StereoRig,
    eye_poses,
    min_object_distance,
    projection_matrix,
    reprojection_matrix,
    rotation_matrix,
    view_matrix,
    view_projection,
)
from .counters import OpCounters
from .metrics import MetricsReport, disocclusion_fraction, error_map, psnr, ssim
from .patch import PatchOptions, median_patch, patch, patch_with_stats, weight
from .pipeline import (
    QUALITY_SUITE,
    ConfigError,
    PipelineConfig,
    PipelineResult,
    bench_complexity,
    run_pipeline,
    stream_size_estimate,
    suite_config,
)
from .raster import Frame, rasterize, render_stereo_gt
from .reproject import (
    ReprojectOptions,
    ShiftBuffer,
    SourceBuffer,
    reproject,
    stage1_reproject,
    stage2_scan,
)
from .scenes import Scene, TriangleMesh, gen_scene, load_obj, save_obj

__version__ = "0.1.0"

__all__ = [
    "CameraPose",
    "ConfigError",
    "Frame",
    "MetricsReport",
    "OpCounters",
    "OrthographicProjection",
    "PatchOptions",
    "PerspectiveProjection",
    "PipelineConfig",
    "PipelineResult",
    "Projection",
    "QUALITY_SUITE",
    "Quaternion",
    "ReprojectOptions",
    "Scene",
    "ShiftBuffer",
    "SourceBuffer",
    "StereoRig",
    "TriangleMesh",
    "bench_complexity",
    "disocclusion_fraction",
    "error_map",
    "eye_poses",
    "gen_scene",
    "load_obj",
    "median_patch",
    "min_object_distance",
    "patch",
    "patch_with_stats",
    "projection_matrix",
    "psnr",
    "rasterize",
    "render_stereo_gt",
    "reproject",
    "reprojection_matrix",
    "rotation_matrix",
    "run_pipeline",
    "save_obj",
    "ssim",
    "stage1_reproject",
    "stage2_scan",
    "stream_size_estimate",
    "suite_config",
    "view_matrix",
    "view_projection",
    "weight",
]
