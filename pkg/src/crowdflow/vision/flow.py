"""Sparse iterative pyramidal Lucas-Kanade optical flow.

All points are solved together as arrays; each point's result depends only on
its own patch, so the output order always follows the input order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import ZERO, GrayFrame, PipelineConfig, Vec2

# smallest structure-matrix eigenvalue per unit window area
MIN_EIG_PER_AREA = 1e-4

_BINOMIAL = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


@dataclass(frozen=True, slots=True)
class FlowEstimate:
    displacement: Vec2
    valid: bool
    residual: float


INVALID = FlowEstimate(ZERO, False, 0.0)


def _smooth(a: np.ndarray) -> np.ndarray:
    pad = np.pad(a, 2, mode="reflect")
    rows = sum(c * pad[:, i:i + a.shape[1]] for i, c in enumerate(_BINOMIAL))
    return sum(c * rows[i:i + a.shape[0], :] for i, c in enumerate(_BINOMIAL))


def build_pyramid(a: np.ndarray, levels: int, min_size: int = 16) -> list[np.ndarray]:
    """Gaussian pyramid, finest level first.

    Stops early rather than produce a level whose shorter side is below
    ``min_size``.
    """
    pyramid = [np.asarray(a, dtype=np.float64)]
    for _ in range(levels - 1):
        prev = pyramid[-1]
        if min(prev.shape) // 2 < min_size:
            break
        pyramid.append(np.ascontiguousarray(_smooth(prev)[::2, ::2]))
    return pyramid


def gradients(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Central-difference gradients with one-sided differences on the border."""
    gy, gx = np.gradient(a)
    return gx, gy


def _corners(shape, x: np.ndarray, y: np.ndarray):
    """Flat index of the top-left corner plus interpolation weights, border-clamped."""
    h, w = shape
    x = np.clip(x, 0.0, w - 1.0)
    y = np.clip(y, 0.0, h - 1.0)
    x0 = np.minimum(np.floor(x).astype(np.intp), max(w - 2, 0))
    y0 = np.minimum(np.floor(y).astype(np.intp), max(h - 2, 0))
    dx = 1 if w > 1 else 0
    dy = w if h > 1 else 0
    return y0 * w + x0, x - x0, y - y0, dx, dy


def _gather(a: np.ndarray, corners) -> np.ndarray:
    idx, fx, fy, dx, dy = corners
    flat = a.ravel()
    a00 = flat.take(idx)
    a01 = flat.take(idx + dx)
    a10 = flat.take(idx + dy)
    a11 = flat.take(idx + dy + dx)
    top = a00 + fx * (a01 - a00)
    return top + fy * (a10 + fx * (a11 - a10) - top)


def bilinear(a: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sample ``a`` at real coordinates, clamping to the border."""
    return _gather(a, _corners(a.shape, np.asarray(x, dtype=np.float64),
                               np.asarray(y, dtype=np.float64)))


def lk_flow(f1: GrayFrame, f2: GrayFrame, points, cfg: PipelineConfig) -> list[FlowEstimate]:
    """Track ``points`` from ``f1`` to ``f2``.

    Args:
        f1, f2: consecutive frames of identical size.
        points: iterable of ``Vec2`` (or ``(x, y)``) positions in ``f1``.
        cfg: supplies ``lk_window``, ``lk_pyramid_levels``, ``lk_iterations``
            and ``lk_epsilon``.

    Returns:
        One ``FlowEstimate`` per input point, in input order. A point is invalid
        when the finest-level structure matrix is near singular or the tracked
        position leaves the image.
    """
    if f1.shape != f2.shape:
        raise ValueError(f"frame size mismatch: {f1.shape} vs {f2.shape}")
    pts = np.array([tuple(p) for p in points], dtype=np.float64).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        return []

    half = cfg.lk_window // 2
    oy, ox = np.mgrid[-half:half + 1, -half:half + 1]
    ox = ox.ravel().astype(np.float64)
    oy = oy.ravel().astype(np.float64)
    area = float(cfg.lk_window ** 2)
    min_eig = MIN_EIG_PER_AREA * area

    # a coarse level not much wider than the window is mostly clamped border
    min_size = (3 * cfg.lk_window) // 2
    pyr1 = build_pyramid(f1.data, cfg.lk_pyramid_levels, min_size)
    pyr2 = build_pyramid(f2.data, cfg.lk_pyramid_levels, min_size)
    top = len(pyr1) - 1

    guess = np.zeros((n, 2))
    valid = np.ones(n, dtype=bool)
    flow = np.zeros((n, 2))
    residual = np.zeros(n)

    for level in range(top, -1, -1):
        scale = 2.0 ** level
        I, J = pyr1[level], pyr2[level]
        h, w = I.shape
        gx, gy = gradients(I)
        p = pts / scale
        px = p[:, :1] + ox
        py = p[:, 1:] + oy
        at_p = _corners(I.shape, px, py)
        patch = _gather(I, at_p)
        ix = _gather(gx, at_p)
        iy = _gather(gy, at_p)
        gxx = (ix * ix).sum(axis=1)
        gxy = (ix * iy).sum(axis=1)
        gyy = (iy * iy).sum(axis=1)
        # smaller eigenvalue of [[gxx, gxy], [gxy, gyy]]
        lam = 0.5 * (gxx + gyy - np.sqrt((gxx - gyy) ** 2 + 4.0 * gxy ** 2))
        det = gxx * gyy - gxy * gxy
        solvable = (lam >= min_eig) & (det > 0)
        if level == 0:
            valid &= solvable

        v = np.zeros((n, 2))
        active = valid & solvable
        for _ in range(cfg.lk_iterations):
            if not active.any():
                break
            d = guess + v
            qx = px + d[:, :1]
            qy = py + d[:, 1:]
            cx = p[:, 0] + d[:, 0]
            cy = p[:, 1] + d[:, 1]
            inside = (cx >= 0) & (cx <= w - 1) & (cy >= 0) & (cy <= h - 1)
            valid &= inside | ~active
            active &= inside
            err = patch - bilinear(J, qx, qy)
            bx = (err * ix).sum(axis=1)
            by = (err * iy).sum(axis=1)
            with np.errstate(divide="ignore", invalid="ignore"):
                ex = (gyy * bx - gxy * by) / det
                ey = (gxx * by - gxy * bx) / det
            step = np.where(active[:, None], np.column_stack([ex, ey]), 0.0)
            v += step
            active &= np.hypot(step[:, 0], step[:, 1]) >= cfg.lk_epsilon

        d = guess + v
        cx = p[:, 0] + d[:, 0]
        cy = p[:, 1] + d[:, 1]
        valid &= (cx >= 0) & (cx <= w - 1) & (cy >= 0) & (cy <= h - 1)
        if level > 0:
            guess = 2.0 * d
        else:
            flow = d
            residual = np.abs(patch - bilinear(J, px + d[:, :1], py + d[:, 1:])).mean(axis=1)

    out = []
    for i in range(n):
        if valid[i] and np.all(np.isfinite(flow[i])):
            out.append(FlowEstimate(Vec2(float(flow[i, 0]), float(flow[i, 1])), True,
                                    float(residual[i])))
        else:
            out.append(INVALID)
    return out
