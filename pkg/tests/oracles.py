"""Slow, obviously-correct reference implementations used only by the tests."""
from __future__ import annotations

import math

import numpy as np

# radius-3 Bresenham circle, written out independently of the detector
RING = [(0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
        (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3)]


def brute_neighbors(particles, h, k_cap):
    """All-pairs search: (ids, distances) per particle, nearest first, ties by id."""
    out = []
    for p in particles:
        if not p.alive:
            out.append(((), ()))
            continue
        cands = []
        for q in particles:
            if q.id == p.id or not q.alive:
                continue
            d = math.hypot(q.pos.x - p.pos.x, q.pos.y - p.pos.y)
            if d <= h:
                cands.append((d, q.id))
        cands.sort()
        cands = cands[:k_cap]
        out.append((tuple(j for _, j in cands), tuple(d for d, _ in cands)))
    return out


def brute_segment_test(a: np.ndarray, x: int, y: int, t: float) -> float:
    """FAST-9 score of one pixel by walking every start position on the circle."""
    c = a[y, x]
    vals = [a[y + dy, x + dx] for dx, dy in RING]
    best = 0.0
    for sign in (1, -1):
        ok = [sign * (v - c) > t for v in vals]
        if all(ok):
            return float(sum(abs(v - c) for v in vals))
        for start in range(16):
            length = 0
            while length < 16 and ok[(start + length) % 16]:
                length += 1
            if length >= 9:
                s = sum(abs(vals[(start + i) % 16] - c) for i in range(length))
                best = max(best, s)
    return best


def brute_fast(a: np.ndarray, t: float, nonmax: bool = True):
    h, w = a.shape
    score = np.zeros((h, w))
    for y in range(3, h - 3):
        for x in range(3, w - 3):
            score[y, x] = brute_segment_test(a, x, y, t)
    pts = []
    for y in range(h):
        for x in range(w):
            s = score[y, x]
            if s <= 0:
                continue
            if nonmax:
                nb = score[max(0, y - 1):y + 2, max(0, x - 1):x + 2]
                if s < nb.max():
                    continue
            pts.append((x, y))
    return pts


def disk_pixels(cx: int, cy: int, r: float):
    """Integer pixels within distance r of (cx, cy)."""
    R = int(r) + 1
    return {(cx + dx, cy + dy) for dx in range(-R, R + 1) for dy in range(-R, R + 1)
            if dx * dx + dy * dy <= r * r}


def smooth_texture(rng, shape, passes: int = 2) -> np.ndarray:
    """Random texture in [30, 225] with a little box blur so gradients are usable."""
    a = rng.uniform(0, 255, size=shape)
    for _ in range(passes):
        a = (a + np.roll(a, 1, 0) + np.roll(a, -1, 0) + np.roll(a, 1, 1) + np.roll(a, -1, 1)) / 5
    lo, hi = a.min(), a.max()
    return 30 + 195 * (a - lo) / (hi - lo)


def shifted(a: np.ndarray, dx: int, dy: int) -> np.ndarray:
    """Image whose content at (x, y) came from (x - dx, y - dy) (periodic)."""
    return np.roll(a, (dy, dx), axis=(0, 1))


def ellipse_tangent_quadrant(theta: float) -> int:
    """Quadrant bin (0..3, centred on +x, +y, -x, -y) of a tangent direction angle."""
    t = (theta + math.pi / 4) % (2 * math.pi)
    return int(t // (math.pi / 2))
