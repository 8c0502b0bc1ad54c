"""
Quality metrics on the scene suite
==================================

Run the full pipeline over every scene of the quality suite and tabulate
SSIM / PSNR / disocclusion fraction, the numbers the acceptance thresholds
are checked against (0.95 SSIM, 20 dB).
"""

import numpy as np

from stereosynth import QUALITY_SUITE, run_pipeline, suite_config

rows = []
for name, preset, params, seed in QUALITY_SUITE:
    cfg = suite_config(name, width=256, height=256)  # smaller here, faster demo
    result = run_pipeline(cfg, write_artifacts=False)
    r = result.report
    rows.append((name, r.ssim, r.psnr_db, r.disocclusion_fraction, r.wall_time_s))

print(f"{'scene':<16} {'ssim':>7} {'psnr':>7} {'disocc':>7} {'synth s':>8}")
for name, s, p, d, t in rows:
    print(f"{name:<16} {s:7.4f} {p:7.2f} {d:7.4f} {t:8.3f}")

mean_ssim = float(np.mean([r[1] for r in rows]))
mean_psnr = float(np.mean([r[2] for r in rows]))
print(f"\nmean ssim = {mean_ssim:.4f}  (threshold 0.95)")
print(f"mean psnr = {mean_psnr:.2f} dB  (threshold 20.0)")
