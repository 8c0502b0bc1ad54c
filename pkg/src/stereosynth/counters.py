"""Operation counters backing the complexity claims.

triangle_ops counts triangles submitted to the rasterizer. The pixel
counters are fixed by buffer resolution alone, never by scene content, so
the synthesis cost ledger stays exactly constant across scene complexity.
texture_reads is a separate diagnostic: it tracks the patcher's per-pixel
sampling work, which does depend on how much disocclusion a scene produces.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class OpCounters:
    triangle_ops: int = 0
    stage1_pixels: int = 0
    stage2_pixels: int = 0
    patch_pixels: int = 0
    texture_reads: int = 0

    @property
    def pixel_ops(self) -> int:
        return self.stage1_pixels + self.stage2_pixels + self.patch_pixels

    def as_dict(self) -> dict:
        return {
            "triangle_ops": self.triangle_ops,
            "stage1_pixels": self.stage1_pixels,
            "stage2_pixels": self.stage2_pixels,
            "patch_pixels": self.patch_pixels,
            "texture_reads": self.texture_reads,
            "pixel_ops": self.pixel_ops,
        }
