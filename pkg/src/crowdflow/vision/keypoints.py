from __future__ import annotations

import numpy as np

from ..core import GrayFrame, Particle, PipelineConfig, Vec2
from .fast import fast_detect
from .flow import lk_flow


def abs_difference(f1: GrayFrame, f2: GrayFrame) -> GrayFrame:
    """Pixelwise ``|f2 - f1|``."""
    if f1.shape != f2.shape:
        raise ValueError(f"frame size mismatch: {f1.shape} vs {f2.shape}")
    return GrayFrame(np.abs(f2.data - f1.data))


def threshold_difference(diff: GrayFrame, level: float) -> GrayFrame:
    """Zero every difference value below ``level``."""
    return GrayFrame(np.where(diff.data >= level, diff.data, 0.0))


def extract_keypoints(f1: GrayFrame, f2: GrayFrame, cfg: PipelineConfig) -> list[Particle]:
    """Seed motion particles from the first two frames of a window.

    FAST corners of the thresholded difference image are tracked with
    Lucas-Kanade; each particle sits at its corner in ``f1`` and carries the
    measured displacement as velocity. Corners too close to the border for a
    full LK window, and corners whose flow is invalid, are dropped.
    """
    diff = threshold_difference(abs_difference(f1, f2), cfg.diff_threshold)
    corners = fast_detect(diff, cfg.fast_threshold, nonmax=True)
    margin = cfg.lk_window // 2
    corners = [(x, y) for x, y in corners
               if margin <= x < f1.width - margin and margin <= y < f1.height - margin]
    estimates = lk_flow(f1, f2, corners, cfg)
    particles = []
    for (x, y), est in zip(corners, estimates):
        if not est.valid:
            continue
        particles.append(Particle.from_motion(len(particles), Vec2(float(x), float(y)),
                                              est.displacement, cfg.bins, cfg.centered_bins))
    return particles
