"""Synthetic crowd scenes with exactly known motion and ground-truth label maps.

Blobs of random speckle texture move over a dark, static background along
one of three motion fields: a single linear stream, two opposing streams, or
an elliptical track. Ground truth labels every pixel within ``blob_radius`` of
a blob centre with the quantised direction of that blob's motion.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import GrayFrame, Vec2, orientation, quantize_orientation
from .segmentation import SegmentationMap

KINDS = ("linear", "elliptical", "bilinear")
BACKGROUND = 20.0
SPECKLE_RANGE = (60.0, 255.0)
MARGIN = 4


@dataclass
class SceneSpec:
    kind: str = "linear"
    width: int = 200
    height: int = 200
    n_frames: int = 40
    n_blobs: int = 12
    speed: tuple[float, float] = (3.0, 0.0)
    blob_radius: float = 10.0
    texture_seed: int = 0
    # label bins for the ground truth; None picks 4 for elliptical scenes, else 8
    bins: int | None = None
    centered: bool = True

    def __post_init__(self):
        self.speed = (float(self.speed[0]), float(self.speed[1]))
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown scene kind {self.kind!r}; expected one of {KINDS}")
        if self.n_frames < 3:
            raise ValueError("a scene needs at least 3 frames")
        if self.n_blobs < 1:
            raise ValueError("a scene needs at least one blob")
        if not self.blob_radius > 0:
            raise ValueError("blob_radius must be positive")
        if math.hypot(*self.speed) > self.blob_radius:
            raise ValueError(f"speed {math.hypot(*self.speed):g} exceeds blob_radius "
                             f"{self.blob_radius:g}")
        if self.kind == "elliptical" and math.hypot(*self.speed) == 0:
            raise ValueError("elliptical scenes need a non-zero speed")
        side = 2 * (self.blob_radius + MARGIN) + 8
        if self.width < side or self.height < side:
            raise ValueError(f"frame too small for blobs of radius {self.blob_radius:g}")
        if self.label_bins < 2:
            raise ValueError("need at least 2 label bins")

    @property
    def label_bins(self) -> int:
        if self.bins is not None:
            return self.bins
        return 4 if self.kind == "elliptical" else 8

    @property
    def period(self) -> float:
        """Frames per lap of the elliptical track (inf for the straight scenes)."""
        if self.kind != "elliptical":
            return math.inf
        return 2 * math.pi / _ellipse(self)[3]


@dataclass
class Scene:
    spec: SceneSpec
    frames: list
    truths: list
    true_flow: list                 # per frame: list of (centre, displacement to next frame)
    centers: np.ndarray = field(repr=False)     # (n_frames, n_blobs, 2)
    tangents: np.ndarray = field(repr=False)    # instantaneous velocity per blob


def _jittered_grid(rng, n: int, x0: float, x1: float, y0: float, y1: float) -> np.ndarray:
    """``n`` points spread over a box: one per grid cell, jittered within the cell."""
    w, h = max(x1 - x0, 1e-9), max(y1 - y0, 1e-9)
    nx = max(1, round(math.sqrt(n * w / h)))
    ny = math.ceil(n / nx)
    cells = [(i, j) for j in range(ny) for i in range(nx)][:n]
    pts = []
    for i, j in cells:
        u = (i + rng.uniform(0.2, 0.8)) / nx
        v = (j + rng.uniform(0.2, 0.8)) / ny
        pts.append((x0 + u * w, y0 + v * h))
    return np.array(pts)


def _stream_box(spec: SceneSpec, vel, y0: float, y1: float):
    """Start box such that a blob moving at ``vel`` stays inside the frame, else None."""
    r = spec.blob_radius + MARGIN
    travel_x = vel[0] * (spec.n_frames - 1)
    travel_y = vel[1] * (spec.n_frames - 1)
    x0, x1 = r - min(travel_x, 0.0), spec.width - 1 - r - max(travel_x, 0.0)
    y0, y1 = y0 - min(travel_y, 0.0), y1 - max(travel_y, 0.0)
    if x1 < x0 or y1 < y0:
        return None
    return x0, x1, y0, y1


def _straight_centers(spec: SceneSpec, rng, velocities, boxes):
    t = np.arange(spec.n_frames, dtype=np.float64)[:, None, None]
    starts = []
    for (vel, box, n) in zip(velocities, boxes, _split(spec.n_blobs, len(velocities))):
        if box is None:
            box = (0.0, spec.width - 1.0, 0.0, spec.height - 1.0)
        # integer starts keep integer-speed scenes exactly warp-consistent
        starts.append(np.round(_jittered_grid(rng, n, *box)))
    start = np.concatenate(starts)
    vel = np.concatenate([np.tile(v, (n, 1)) for v, n in
                          zip(velocities, _split(spec.n_blobs, len(velocities)))])
    centers = start[None, :, :] + t * vel[None, :, :]
    tangents = np.broadcast_to(vel, centers.shape).copy()
    return centers, tangents


def _split(n: int, parts: int) -> list[int]:
    return [n // parts + (1 if i < n % parts else 0) for i in range(parts)]


def _ellipse(spec: SceneSpec):
    r = spec.blob_radius + MARGIN
    a = spec.width / 2 - r - 0.12 * spec.width
    b = spec.height / 2 - r - 0.12 * spec.height
    omega = math.hypot(*spec.speed) / max(a, b)
    return spec.width / 2, spec.height / 2, (a, b), omega


def _elliptical_centers(spec: SceneSpec, rng):
    cx, cy, (a, b), omega = _ellipse(spec)
    phase = 2 * math.pi * (np.arange(spec.n_blobs) + rng.uniform(-0.15, 0.15, spec.n_blobs))
    phase /= spec.n_blobs
    ang = omega * np.arange(spec.n_frames, dtype=np.float64)[:, None] + phase[None, :]
    centers = np.stack([cx + a * np.cos(ang), cy + b * np.sin(ang)], axis=-1)
    tangents = np.stack([-a * omega * np.sin(ang), b * omega * np.cos(ang)], axis=-1)
    return centers, tangents


def _texture(rng, radius: float) -> np.ndarray:
    """Speckle patch with 2-pixel grains, big enough to cover a blob at any sub-pixel shift."""
    n = 2 * int(math.ceil(radius)) + 4
    coarse = rng.uniform(*SPECKLE_RANGE, size=(n // 2 + 2, n // 2 + 2))
    fine = np.kron(coarse, np.ones((2, 2)))[:n, :n]
    # one binomial pass softens grain edges so gradients stay well defined
    k = np.array([0.25, 0.5, 0.25])
    fine = np.apply_along_axis(lambda r: np.convolve(np.pad(r, 1, mode="edge"), k, "valid"), 1, fine)
    fine = np.apply_along_axis(lambda c: np.convolve(np.pad(c, 1, mode="edge"), k, "valid"), 0, fine)
    return fine


def _sample(tex: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x0 = np.floor(x).astype(np.intp)
    y0 = np.floor(y).astype(np.intp)
    fx, fy = x - x0, y - y0
    return ((tex[y0, x0] * (1 - fx) + tex[y0, x0 + 1] * fx) * (1 - fy)
            + (tex[y0 + 1, x0] * (1 - fx) + tex[y0 + 1, x0 + 1] * fx) * fy)


def _wrap_offsets(spec: SceneSpec, wrap: bool):
    if not wrap:
        return [(0.0, 0.0)]
    return [(ox, oy) for ox in (-spec.width, 0.0, spec.width)
            for oy in (-spec.height, 0.0, spec.height)]


def _render(spec: SceneSpec, centers_t, labels, textures, wrap: bool):
    img = np.full((spec.height, spec.width), BACKGROUND)
    truth = np.zeros((spec.height, spec.width), dtype=np.uint8)
    R = spec.blob_radius
    c = (textures[0].shape[0] - 1) / 2.0
    for (x, y), lab, tex in zip(centers_t, labels, textures):
        for ox, oy in _wrap_offsets(spec, wrap):
            bx, by = x + ox, y + oy
            xa, xb = max(int(math.floor(bx - R)), 0), min(int(math.ceil(bx + R)), spec.width - 1)
            ya, yb = max(int(math.floor(by - R)), 0), min(int(math.ceil(by + R)), spec.height - 1)
            if xa > xb or ya > yb:
                continue
            yy, xx = np.mgrid[ya:yb + 1, xa:xb + 1]
            inside = (xx - bx) ** 2 + (yy - by) ** 2 <= R * R
            if not inside.any():
                continue
            vals = _sample(tex, xx[inside] - bx + c, yy[inside] - by + c)
            img[yy[inside], xx[inside]] = vals
            truth[yy[inside], xx[inside]] = lab
    return np.clip(img, 0.0, 255.0), truth


def generate(spec: SceneSpec) -> Scene:
    """Render all frames, ground-truth maps and exact per-blob displacements."""
    spec.validate()
    rng = np.random.default_rng(spec.texture_seed)
    wrap = False
    if spec.kind == "elliptical":
        centers, tangents = _elliptical_centers(spec, rng)
    else:
        r = spec.blob_radius + MARGIN
        if spec.kind == "linear":
            velocities = [np.array(spec.speed)]
            bands = [(r, spec.height - 1 - r)]
        else:
            velocities = [np.array(spec.speed), -np.array(spec.speed)]
            gap = 2 * spec.blob_radius
            mid = (spec.height - 1) / 2
            bands = [(r, mid - gap / 2), (mid + gap / 2, spec.height - 1 - r)]
        boxes = [_stream_box(spec, v, *band) for v, band in zip(velocities, bands)]
        wrap = any(b is None for b in boxes)
        centers, tangents = _straight_centers(spec, rng, velocities, boxes)
        if wrap:
            centers = np.mod(centers, [spec.width, spec.height])

    textures = [_texture(rng, spec.blob_radius) for _ in range(spec.n_blobs)]
    bins = spec.label_bins
    frames, truths, true_flow = [], [], []
    for t in range(spec.n_frames):
        labels = [quantize_orientation(orientation(Vec2(*tangents[t, i])), bins, spec.centered) + 1
                  for i in range(spec.n_blobs)]
        img, truth = _render(spec, centers[t], labels, textures, wrap)
        frames.append(GrayFrame(img))
        truths.append(SegmentationMap(truth))
        nxt = _next_centers(spec, centers, t, wrap)
        true_flow.append([(Vec2(*centers[t, i]), Vec2(*(nxt[i] - centers[t, i])))
                          for i in range(spec.n_blobs)])
    return Scene(spec, frames, truths, true_flow, centers, tangents)


def _next_centers(spec: SceneSpec, centers: np.ndarray, t: int, wrap: bool) -> np.ndarray:
    """Centres one frame later, unwrapped so displacements never jump across the frame."""
    if t + 1 < spec.n_frames:
        nxt = centers[t + 1]
    elif spec.kind == "elliptical":
        cx, cy, (a, b), omega = _ellipse(spec)
        ang = np.arctan2((centers[t, :, 1] - cy) / b, (centers[t, :, 0] - cx) / a) + omega
        nxt = np.stack([cx + a * np.cos(ang), cy + b * np.sin(ang)], axis=-1)
    else:
        nxt = centers[t] + (centers[t] - centers[t - 1])
    if wrap:
        size = np.array([spec.width, spec.height], dtype=np.float64)
        d = nxt - centers[t]
        d -= size * np.round(d / size)
        nxt = centers[t] + d
    return nxt


def write_scene(scene: Scene, out_dir) -> Path:
    """Write ``frames/NNNNN.pgm``, ``truth/NNNNN.png`` and ``manifest.txt``."""
    from .io import write_label_png, write_pgm

    out = Path(out_dir)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    (out / "truth").mkdir(parents=True, exist_ok=True)
    digits = max(5, len(str(len(scene.frames))))
    for t, (frame, truth) in enumerate(zip(scene.frames, scene.truths)):
        write_pgm(frame, out / "frames" / f"{t:0{digits}d}.pgm")
        write_label_png(truth, out / "truth" / f"{t:0{digits}d}.png")
    lines = [f"# kind={scene.spec.kind} width={scene.spec.width} height={scene.spec.height} "
             f"blobs={scene.spec.n_blobs} radius={scene.spec.blob_radius:g} "
             f"seed={scene.spec.texture_seed} label_bins={scene.spec.label_bins}"]
    for t, flow in enumerate(scene.true_flow):
        disp = " ".join(f"{d.x:.6f},{d.y:.6f}" for _, d in flow)
        lines.append(f"{t} {disp}")
    tmp = out / "manifest.txt.tmp"
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, out / "manifest.txt")
    return out
