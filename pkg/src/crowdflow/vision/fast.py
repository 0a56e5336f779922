"""FAST-9 segment-test corner detector on a 16-pixel Bresenham circle."""
from __future__ import annotations

import numpy as np

from ..core import GrayFrame

# (dx, dy) around the radius-3 circle, clockwise from 12 o'clock
CIRCLE = (
    (0, -3), (1, -3), (2, -2), (3, -1), (3, 0), (3, 1), (2, 2), (1, 3),
    (0, 3), (-1, 3), (-2, 2), (-3, 1), (-3, 0), (-3, -1), (-2, -2), (-1, -3),
)
ARC = 9
BORDER = 3


def _arc_scores(mask: np.ndarray, absdiff: np.ndarray) -> np.ndarray:
    """Score of the longest contiguous circular run in ``mask``, 0 if shorter than ARC.

    ``mask`` and ``absdiff`` have shape ``(16, ...)``. The score is the sum of
    ``absdiff`` over the run; at most one run of length >= 9 fits on 16 pixels.
    """
    n = len(CIRCLE)
    run = np.zeros(mask.shape[1:], dtype=np.int32)
    acc = np.zeros(mask.shape[1:], dtype=np.float64)
    best = np.zeros(mask.shape[1:], dtype=np.float64)
    for k in range(2 * n - 1):
        m = mask[k % n]
        run = np.where(m, run + 1, 0)
        acc = np.where(m, acc + absdiff[k % n], 0.0)
        best = np.where(run >= ARC, np.maximum(best, acc), best)
    full = mask.all(axis=0)
    return np.where(full, absdiff.sum(axis=0), best)


def corner_scores(img: GrayFrame, threshold: float) -> np.ndarray:
    """Per-pixel FAST-9 score, zero for non-corners and for the 3-pixel border."""
    a = img.data
    h, w = a.shape
    if h < 2 * BORDER + 1 or w < 2 * BORDER + 1:
        raise ValueError(f"FAST needs an image of at least 7x7, got {w}x{h}")
    centre = a[BORDER:h - BORDER, BORDER:w - BORDER]
    ring = np.stack([a[BORDER + dy:h - BORDER + dy, BORDER + dx:w - BORDER + dx]
                     for dx, dy in CIRCLE])
    delta = ring - centre
    absdiff = np.abs(delta)
    bright = _arc_scores(delta > threshold, absdiff)
    dark = _arc_scores(delta < -threshold, absdiff)
    scores = np.zeros_like(a)
    scores[BORDER:h - BORDER, BORDER:w - BORDER] = np.maximum(bright, dark)
    return scores


def nonmax_suppress(scores: np.ndarray) -> np.ndarray:
    """Keep corners whose score is >= every score in their 3x3 neighbourhood."""
    padded = np.pad(scores, 1)
    h, w = scores.shape
    neighbourhood = np.stack([padded[1 + dy:1 + dy + h, 1 + dx:1 + dx + w]
                              for dy in (-1, 0, 1) for dx in (-1, 0, 1)])
    return (scores > 0) & (scores >= neighbourhood.max(axis=0))


def fast_detect(img: GrayFrame, threshold: int, nonmax: bool = True) -> list[tuple[int, int]]:
    """Detect FAST-9 corners.

    Args:
        img: input frame, at least 7x7.
        threshold: intensity margin a circle pixel must exceed.
        nonmax: suppress corners that are not local score maxima.

    Returns:
        ``(x, y)`` pixel coordinates in row-major order.
    """
    scores = corner_scores(img, threshold)
    keep = nonmax_suppress(scores) if nonmax else scores > 0
    ys, xs = np.nonzero(keep)
    return [(int(x), int(y)) for x, y in zip(xs, ys)]
