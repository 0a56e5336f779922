"""Keypoint extraction: frame differencing, FAST-9 corners and Lucas-Kanade flow."""
from .fast import corner_scores, fast_detect, nonmax_suppress
from .flow import FlowEstimate, build_pyramid, lk_flow
from .keypoints import abs_difference, extract_keypoints, threshold_difference

__all__ = [
    "FlowEstimate",
    "abs_difference",
    "build_pyramid",
    "corner_scores",
    "extract_keypoints",
    "fast_detect",
    "lk_flow",
    "nonmax_suppress",
    "threshold_difference",
]
