"""Evaluation: Jaccard accuracy, label-aware Jaccard, flow error and the beta sweep."""
from __future__ import annotations

import csv
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import GrayFrame, PipelineConfig
from .vision.flow import lk_flow


@dataclass(frozen=True)
class FrameMetrics:
    frame_index: int
    iou: Optional[float]
    labeled_iou: Optional[float]
    flow_error: float
    keypoint_count: int
    flow_samples: int = 0
    propagated: bool = True


@dataclass(frozen=True)
class SweepResult:
    betas: list
    mean_errors: list      # normalised by the largest raw error
    raw_errors: list
    best_beta: float


def _labels(m) -> np.ndarray:
    return m.labels if hasattr(m, "labels") else np.asarray(m)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"map size mismatch: {a.shape[::-1]} vs {b.shape[::-1]}")


def jaccard(a: np.ndarray, b: np.ndarray) -> float:
    """|a & b| / |a | b| for boolean masks; 1 when both are empty."""
    union = np.count_nonzero(a | b)
    if union == 0:
        return 1.0
    return np.count_nonzero(a & b) / union


def iou(segmented, truth) -> float:
    """Binary IoU of the non-background pixels of two label maps."""
    s, g = _labels(segmented), _labels(truth)
    _check_same_shape(s, g)
    return jaccard(s != 0, g != 0)


def labeled_iou(segmented, truth, b: int | None = None) -> float:
    """Mean per-label Jaccard over the truth labels after the best one-to-one relabelling.

    Every injective assignment of predicted labels to truth labels is tried;
    a truth label left without a partner scores 0.
    """
    s, g = _labels(segmented), _labels(truth)
    _check_same_shape(s, g)
    truth_labels = [int(v) for v in np.unique(g) if v != 0]
    pred_labels = [int(v) for v in np.unique(s) if v != 0]
    if b is not None and (len(truth_labels) > b or len(pred_labels) > b):
        raise ValueError(f"more than {b} labels present")
    if not truth_labels:
        return 1.0 if not pred_labels else 0.0
    if not pred_labels:
        return 0.0

    nt, npred = len(truth_labels), len(pred_labels)
    # padding columns stand for "no partner"
    scores = np.zeros((nt, max(npred, nt)))
    for i, t in enumerate(truth_labels):
        gm = g == t
        for j, p in enumerate(pred_labels):
            scores[i, j] = jaccard(s == p, gm)
    perms = np.array(list(itertools.permutations(range(scores.shape[1]), nt)), dtype=np.intp)
    totals = scores[np.arange(nt), perms].sum(axis=1)
    return float(totals.max() / nt)


def flow_errors(predicted, f_t: GrayFrame, f_t1: GrayFrame, cfg: PipelineConfig) -> np.ndarray:
    """Per-particle distance between model displacement and measured LK displacement.

    A particle's model displacement over the frame is its velocity (unit time
    step), so its previous position is ``pos - vel``. Only alive particles
    whose previous position lies in the frame and whose LK estimate is valid
    contribute.
    """
    if f_t.shape != f_t1.shape:
        raise ValueError(f"frame size mismatch: {f_t.shape} vs {f_t1.shape}")
    chosen = [p for p in predicted if p.alive and f_t.contains(p.pos - p.vel)]
    estimates = lk_flow(f_t, f_t1, [p.pos - p.vel for p in chosen], cfg)
    errs = [math.hypot(p.vel.x - e.displacement.x, p.vel.y - e.displacement.y)
            for p, e in zip(chosen, estimates) if e.valid]
    return np.asarray(errs, dtype=np.float64)


def avg_flow_error(predicted, f_t: GrayFrame, f_t1: GrayFrame, cfg: PipelineConfig) -> float:
    errs = flow_errors(predicted, f_t, f_t1, cfg)
    if errs.size == 0:
        warnings.warn("no valid optical-flow estimates; reporting zero flow error",
                      RuntimeWarning, stacklevel=2)
        return 0.0
    return float(errs.mean())


def mean_propagated_flow_error(results) -> float:
    """Mean per-frame flow error over propagated frames that had flow samples."""
    errs = [m.flow_error for r in results for m in r.metrics
            if m.propagated and m.flow_samples > 0]
    return float(np.mean(errs)) if errs else 0.0


def sweep_beta(frames, cfg: PipelineConfig, betas=None) -> SweepResult:
    """Run the whole pipeline once per beta and pick the one with least flow error.

    Ties go to the smaller beta. The returned curve is normalised by its
    largest entry.
    """
    from .segmentation import run_video

    if betas is None:
        betas = [round(0.1 * k, 1) for k in range(1, 10)]
    betas = [float(b) for b in betas]
    if not betas:
        raise ValueError("need at least one beta")
    raw = [mean_propagated_flow_error(run_video(frames, cfg.replace(beta=b))) for b in betas]
    top = max(raw)
    normalised = [e / top if top > 0 else 0.0 for e in raw]
    order = sorted(range(len(betas)), key=lambda i: (raw[i], betas[i]))
    return SweepResult(betas=betas, mean_errors=normalised, raw_errors=raw,
                       best_beta=betas[order[0]])


def write_frame_metrics_csv(metrics, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame", "iou", "labeled_iou", "flow_error", "keypoints"])
        for m in metrics:
            w.writerow([m.frame_index, _fmt(m.iou), _fmt(m.labeled_iou), _fmt(m.flow_error),
                        m.keypoint_count])


def write_sweep_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["beta", "mean_error"])
        for b, e in zip(result.betas, result.mean_errors):
            w.writerow([_fmt(b), _fmt(e)])


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))
