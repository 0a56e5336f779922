"""How much IoU the disk rasteriser can reach at all.

Runs the pipeline with the force model and with a constant-velocity
propagator (perfect motion on the linear scene) for several blob and stamp
radii. The ballistic column is an upper bound set by keypoint placement and
stamping alone.
"""
import argparse

import numpy as np

from crowdflow.core import PipelineConfig
from crowdflow.dynamics import ballistic_step
from crowdflow.segmentation import run_video, video_metrics
from crowdflow.synthgen import SceneSpec, generate


def mean_iou(frames, truths, cfg, **kw):
    return float(np.mean([m.iou for m in video_metrics(run_video(frames, cfg, truths, **kw))]))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--beta", type=float, default=0.3)
    ap.add_argument("--blob-radii", default="10,16,20,25")
    ap.add_argument("--stamp-radii", default="3,5")
    args = ap.parse_args()

    print(f"{'blob R':>6} {'stamp':>5} {'ballistic':>9} {'langevin':>9}")
    for R in (float(r) for r in args.blob_radii.split(",")):
        sc = generate(SceneSpec(kind="linear", blob_radius=R))
        for rho in (float(r) for r in args.stamp_radii.split(",")):
            cfg = PipelineConfig(beta=args.beta, render_radius=rho)
            b = mean_iou(sc.frames, sc.truths, cfg, stepper=ballistic_step)
            lv = mean_iou(sc.frames, sc.truths, cfg)
            print(f"{R:6.0f} {rho:5.0f} {b:9.3f} {lv:9.3f}")


if __name__ == "__main__":
    main()
