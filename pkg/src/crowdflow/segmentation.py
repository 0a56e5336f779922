"""Window orchestration and rasterisation of orientation-labelled flow maps."""
from __future__ import annotations

import colorsys
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import STATIC_SPEED, GrayFrame, Particle, PipelineConfig, check_particles
from .dynamics import step
from .metrics import FrameMetrics, flow_errors, iou, labeled_iou
from .vision import extract_keypoints

# fixed colour wheel, one hue per direction bin
PALETTE = np.array(
    [[0, 0, 0]] + [[round(255 * c) for c in colorsys.hsv_to_rgb(k / 8.0, 1.0, 1.0)]
                   for k in range(8)],
    dtype=np.uint8,
)


@dataclass(frozen=True)
class SegmentationMap:
    """Per-pixel labels: 0 is background, ``1..b`` are direction bins plus one."""

    labels: np.ndarray

    def __post_init__(self):
        arr = np.array(self.labels, dtype=np.uint8, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"label map must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @classmethod
    def blank(cls, width: int, height: int) -> SegmentationMap:
        return cls(np.zeros((height, width), dtype=np.uint8))

    def present(self) -> set[int]:
        return {int(v) for v in np.unique(self.labels) if v != 0}

    def colorized(self) -> np.ndarray:
        """RGB image; label ``l`` gets wheel colour ``(l - 1) mod 8``."""
        idx = np.where(self.labels == 0, 0, (self.labels.astype(np.int64) - 1) % 8 + 1)
        return PALETTE[idx]

    def __eq__(self, other):
        return isinstance(other, SegmentationMap) and np.array_equal(self.labels, other.labels)

    __hash__ = None


@dataclass
class WindowResult:
    window_index: int
    start: int
    particle_states: list = field(default_factory=list)
    maps: list = field(default_factory=list)
    metrics: list = field(default_factory=list)

    @property
    def map_frames(self) -> list[int]:
        """Global frame index of each map (the window's first frame has none)."""
        return [self.start + k + 1 for k in range(len(self.maps))]


def disk_offsets(radius: float) -> tuple[np.ndarray, np.ndarray]:
    r = int(math.floor(radius))
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    inside = dx * dx + dy * dy <= radius * radius
    return dx[inside], dy[inside]


def _close3x3(mask: np.ndarray) -> np.ndarray:
    """Binary closing with a 3x3 square on a canvas padded so the border never erodes."""
    h, w = mask.shape
    canvas = np.pad(mask, 2)
    dil = np.zeros_like(canvas)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            dil |= np.roll(canvas, (dy, dx), axis=(0, 1))
    ero = np.ones_like(canvas)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            ero &= np.roll(dil, (dy, dx), axis=(0, 1))
    return ero[2:2 + h, 2:2 + w]


def render_map(particles, width: int, height: int, cfg: PipelineConfig) -> SegmentationMap:
    """Stamp a labelled disk for every alive particle.

    Each disk of radius ``cfg.render_radius`` is centred on the particle's
    rounded position. Where disks overlap, the most frequent label wins, ties
    going to the lower label. Afterwards each label's mask is closed with a
    3x3 square and the closure only fills background pixels, lower labels
    first.
    """
    b = cfg.bins
    counts = np.zeros((b, height, width), dtype=np.int32)
    dx, dy = disk_offsets(cfg.render_radius)
    for p in particles:
        if not p.alive:
            continue
        cx, cy = int(round(p.pos.x)), int(round(p.pos.y))
        xs, ys = cx + dx, cy + dy
        ok = (xs >= 0) & (xs < width) & (ys >= 0) & (ys < height)
        np.add.at(counts[p.bin], (ys[ok], xs[ok]), 1)

    covered = counts.sum(axis=0) > 0
    labels = np.where(covered, counts.argmax(axis=0) + 1, 0).astype(np.uint8)
    for label in sorted(int(v) for v in np.unique(labels) if v != 0):
        fill = _close3x3(labels == label) & (labels == 0)
        labels[fill] = label
    return SegmentationMap(labels)


def _seed_particles(f1: GrayFrame, f2: GrayFrame, cfg: PipelineConfig) -> list[Particle]:
    """Keypoints of the first frame pair, advanced to their second-frame positions."""
    seeded = []
    for p in extract_keypoints(f1, f2, cfg):
        pos = p.pos + p.vel
        alive = p.magnitude >= STATIC_SPEED and f2.contains(pos)
        seeded.append(p.moved(pos, p.vel, cfg.bins, cfg.centered_bins, alive=alive))
    return seeded


def run_window(frames, cfg: PipelineConfig, start: int = 0, window_index: int = 0,
               truths=None, stepper: Callable = step) -> WindowResult:
    """Segment one temporal window.

    Keypoints from the first two frames seed the particles; each further
    frame is reached by one ``stepper`` call. A map is rendered for the
    second frame and for every propagated frame, so a window of ``n`` frames
    yields ``n - 1`` maps.

    Args:
        frames: the window's frames, at least three.
        cfg: pipeline configuration.
        start: global index of ``frames[0]``; keys the noise streams.
        window_index: position of the window in the video.
        truths: optional ground-truth maps aligned with ``frames``.
        stepper: propagation rule, ``step`` or ``ballistic_step``.
    """
    if len(frames) < 3:
        raise ValueError(f"a window needs at least 3 frames, got {len(frames)}")
    first = frames[0]
    for f in frames[1:]:
        if f.shape != first.shape:
            raise ValueError(f"frame size mismatch in window: {f.shape} vs {first.shape}")
    if truths is not None and len(truths) != len(frames):
        raise ValueError("truths must align with frames")
    w, h = first.width, first.height

    result = WindowResult(window_index=window_index, start=start)
    particles = _seed_particles(frames[0], frames[1], cfg)
    for j in range(1, len(frames)):
        if j > 1:
            particles = stepper(particles, cfg, start + j, (w, h))
        check_particles(particles, cfg.bins, cfg.centered_bins)
        seg = render_map(particles, w, h, cfg)
        result.particle_states.append(particles)
        result.maps.append(seg)
        result.metrics.append(_frame_metrics(particles, seg, frames[j - 1], frames[j], cfg,
                                             start + j, truths[j] if truths else None,
                                             propagated=j > 1))
    return result


def _frame_metrics(particles, seg, f_prev, f_cur, cfg, frame_index, truth,
                   propagated: bool) -> FrameMetrics:
    errs = flow_errors(particles, f_prev, f_cur, cfg)
    return FrameMetrics(
        frame_index=frame_index,
        iou=None if truth is None else iou(seg, truth),
        labeled_iou=None if truth is None else labeled_iou(seg, truth),
        flow_error=float(errs.mean()) if errs.size else 0.0,
        keypoint_count=sum(1 for p in particles if p.alive),
        flow_samples=int(errs.size),
        propagated=propagated,
    )


def window_bounds(n_frames: int, window_size: int) -> list[tuple[int, int]]:
    """``[start, stop)`` ranges of consecutive windows.

    A trailing remainder of at least three frames becomes a shorter final
    window; a shorter remainder is dropped.
    """
    if n_frames < 3:
        raise ValueError(f"need at least 3 frames, got {n_frames}")
    if window_size < 3:
        raise ValueError(f"window size must be >= 3, got {window_size}")
    m = n_frames // window_size
    bounds = [(i * window_size, (i + 1) * window_size) for i in range(m)]
    if n_frames - m * window_size >= 3:
        bounds.append((m * window_size, n_frames))
    return bounds


def run_video(frames, cfg: PipelineConfig, truths=None, stepper: Callable = step,
              order=None) -> list[WindowResult]:
    """Split a sequence into windows and segment each independently.

    ``order`` optionally permutes the processing order; results always come
    back sorted by window index.
    """
    bounds = window_bounds(len(frames), cfg.window_size)
    if truths is not None and len(truths) != len(frames):
        raise ValueError("truths must align with frames")
    idx = list(range(len(bounds))) if order is None else list(order)
    results = {}
    for i in idx:
        a, b = bounds[i]
        results[i] = run_window(frames[a:b], cfg, start=a, window_index=i,
                                truths=None if truths is None else truths[a:b],
                                stepper=stepper)
    return [results[i] for i in range(len(bounds))]


def video_metrics(results) -> list[FrameMetrics]:
    return [m for r in results for m in r.metrics]


def video_maps(results) -> list[tuple[int, SegmentationMap]]:
    return [(f, m) for r in results for f, m in zip(r.map_frames, r.maps)]
